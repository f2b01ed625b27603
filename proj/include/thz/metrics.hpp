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
#include <string>
#include <vector>

#include "thz/beamformer.hpp"
#include "thz/channel.hpp"
#include "thz/config.hpp"
#include "thz/quantization.hpp"

namespace thz {

struct RatePoint {
    std::string scenario;
    std::string scheme;
    PulseShape pulse_shape = PulseShape::rrc;
    double bandwidth_hz = 0.0;
    double snr_db = 0.0;
    AdcResolution adc;
    double se_mean = 0.0;  // bits/s/Hz
    double se_std = 0.0;   // sample std over trials
    double rate_bps = 0.0; // se_mean * B
    int trials = 0;
};

/// C~[k] = W_BB[k]^H C W_BB[k]
CMatrix effective_noise_cov_per_bin(const CMatrix& w_bb, const CMatrix& c);

/// log2 det(I + C~^-1 S / streams) evaluated through the Cholesky factor of C~.
double bin_spectral_efficiency(const CMatrix& signal, const CMatrix& noise, int streams);

struct ReceiverTerms {
    CMatrix signal;  // (1/K) sum_k W_RF[k]^H Q[k] W_RF[k]
    CMatrix gram;    // (1/K) sum_k W_RF[k]^H W_RF[k]
};

ReceiverTerms receiver_terms(const ChannelRealization& ch, std::span<const HybridPrecoder> precoders,
                             const HybridCombiner& combiner, const SystemConfig& cfg);

/// Bussgang model seen by the given hybrid receiver: the signal term is
/// averaged over bins so per-bin RF combiners and precoders are handled.
QuantizationModel receiver_quantization_model(const ChannelRealization& ch,
                                              std::span<const HybridPrecoder> precoders,
                                              const HybridCombiner& combiner,
                                              const SystemConfig& cfg);

/// Per-bin spectral efficiency of a hybrid design, bits/s/Hz.
std::vector<double> spectral_efficiency_per_bin(const ChannelRealization& ch,
                                                std::span<const HybridPrecoder> precoders,
                                                const HybridCombiner& combiner,
                                                const QuantizationModel& qmodel,
                                                const SystemConfig& cfg);

/// Mean over bins of spectral_efficiency_per_bin.
double sum_spectral_efficiency(const ChannelRealization& ch, std::span<const HybridPrecoder> precoders,
                               const HybridCombiner& combiner, const QuantizationModel& qmodel,
                               const SystemConfig& cfg);

/// Reference: per-user per-bin SVD precoding, unconstrained linear receiver,
/// no quantization. log2 det(I + sigma_b^2/(N_s sigma^2) F^H H^H H F) per bin.
double fully_digital_spectral_efficiency(const ChannelRealization& ch, const SystemConfig& cfg);

struct NagSample {
    int bin = 0;  // 0-based
    double frequency_hz = 0.0;
    double direction_sin = 0.0;
    double nag = 0.0;
};

/// Lambda over (bin, direction) for one subarray beam. With compensate set
/// the TTD version of the beam is evaluated at each bin.
std::vector<NagSample> nag_sweep(const CVector& beam, double steer_sin, bool compensate,
                                 std::span<const double> directions_sin, std::span<const int> bins,
                                 const SystemConfig& cfg);

/// Direction (as a sine) of the largest NAG of beam at freq_hz: grid argmax
/// over [-1, 1] followed by golden-section refinement.
double peak_direction(const CVector& beam, double freq_hz, double carrier_hz, int grid_points = 1024);

} // namespace thz
