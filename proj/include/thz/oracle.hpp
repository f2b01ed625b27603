// Copyright 2026 The thzsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <span>
#include <vector>

#include "thz/beamformer.hpp"
#include "thz/channel.hpp"
#include "thz/config.hpp"
#include "thz/numerics.hpp"

namespace thz {

// End-to-end time-domain simulation of one zero-padded block.

enum class OracleMode {
    direct,  // antenna-domain circular convolution with the channel taps
    fft,     // per-bin W_RF^H H F products, chain-domain noise; for long Monte-Carlo runs
};

struct OracleOptions {
    OracleMode mode = OracleMode::direct;
    bool add_noise = true;
};

struct OracleOutput {
    std::vector<CVector> symbols_freq;  // b[k], N_s
    std::vector<CVector> pre_adc;       // [sample] N_RFR, after RF combining
    std::vector<CVector> post_adc;      // [sample] N_RFR
    std::vector<CVector> received;      // [bin] W_BB[k]^H FFT(post_adc)[k]
    bool zero_input = false;            // some chain saw an all-zero block
};

/// N_d CN(0, sigma_b^2) symbol vectors followed by L-1 zero vectors.
std::vector<CVector> zero_padded_block(const SystemConfig& cfg, Rng& rng);

/// symbols_time holds K vectors of N_s entries. The ADC resolution is cfg.adc;
/// each chain is scaled by its own sample RMS over the block before quantization.
OracleOutput time_domain_oracle(const ChannelRealization& ch, std::span<const HybridPrecoder> precoders,
                                const HybridCombiner& combiner, const SystemConfig& cfg,
                                std::span<const CVector> symbols_time, Rng& rng,
                                const OracleOptions& options = {});

/// Frequency-domain model W_BB[k]^H A W_RF[k]^H H_MU[k] F[k] b[k], noiseless.
std::vector<CVector> frequency_domain_model(const ChannelRealization& ch,
                                            std::span<const HybridPrecoder> precoders,
                                            const HybridCombiner& combiner, double xi,
                                            std::span<const CVector> symbols_freq);

struct BussgangEstimate {
    RVector error_variance;      // per chain, E|Q(z) - xi z|^2
    RVector predicted_variance;  // diag(R)
    RVector input_power;         // per chain, E|z|^2
    double max_abs_correlation = 0.0;  // max over chains of |corr(z, Q(z) - xi z)|
    long samples_per_chain = 0;
};

/// Runs `blocks` random blocks through the fast oracle with cfg.adc and
/// compares the per-chain distortion against the linearized model.
BussgangEstimate bussgang_monte_carlo(const ChannelRealization& ch,
                                      std::span<const HybridPrecoder> precoders,
                                      const HybridCombiner& combiner, const SystemConfig& cfg,
                                      int blocks, Rng& rng);

} // namespace thz
