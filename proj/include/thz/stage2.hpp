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

namespace thz {

/// (f_k / f_c - 1) * P * theta, theta being a sine-direction.
double rotation_factor(double freq_hz, double carrier_hz, int elements_per_delay, double theta);

/// Delay of each of the M sub-vectors, all nonnegative.
std::vector<double> ttd_delays(double theta, int elements_per_delay, int delays, double carrier_period);

// Delay settings of one RF chain.
struct TtdNetwork {
    double theta = 0.0;  // sine-direction
    int elements_per_delay = 0;
    double carrier_period = 0.0;
    std::vector<double> delays;  // seconds, m = 1..M

    static TtdNetwork make(double theta, int antennas, int delays, double carrier_hz);

    /// Phase factor e^{j pi (m-1) P theta} e^{-j 2 pi f t_m} applied to sub-vector m (0-based).
    Complex phase(int m, double freq_hz) const;
};

/// Phase-only per-bin version of a frequency-flat column: sub-vector m is
/// multiplied by TtdNetwork::phase(m, f).
CVector apply_ttd(const CVector& column, double theta, double freq_hz, double carrier_hz, int delays);

/// Per-bin TTD precoder of one user: phase-shifted columns per bin and the
/// N_su dominant right-singular vectors of H_u[k] F_RF[k] as baseband,
/// rescaled to ||F_RF[k] F_BB[k]||_F^2 = N_su.
HybridPrecoder ttd_precoder_per_bin(std::span<const CMatrix> channel_bins,
                                    const HybridPrecoder& stage1, const SystemConfig& cfg);

/// Same per-bin baseband on top of the unchanged frequency-flat RF precoder.
HybridPrecoder flat_precoder_per_bin(std::span<const CMatrix> channel_bins, const HybridPrecoder& stage1);

/// Receive-side counterpart. W_opt[k] is recomputed against the given (per-bin)
/// precoders and W_BB[k] = (1/xi) W_RF[k]^H W_opt[k].
HybridCombiner ttd_combiner_per_bin(const HybridCombiner& stage1, const ChannelRealization& ch,
                                    std::span<const HybridPrecoder> precoders,
                                    const SystemConfig& cfg, double xi);

/// Flat RF combiner with the baseband recomputed against the given precoders.
HybridCombiner flat_combiner_per_bin(const HybridCombiner& stage1, const ChannelRealization& ch,
                                     std::span<const HybridPrecoder> precoders,
                                     const SystemConfig& cfg, double xi);

/// TTD-compensated RF combiner at every bin, without touching the baseband.
std::vector<CMatrix> ttd_combiner_rf(const HybridCombiner& stage1, const SystemConfig& cfg);

} // namespace thz
