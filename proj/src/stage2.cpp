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

#include "thz/stage2.hpp"

#include <cmath>

#include "thz/errors.hpp"
#include "thz/stage1.hpp"

namespace thz {

double rotation_factor(double freq_hz, double carrier_hz, int elements_per_delay, double theta)
{
    return (freq_hz / carrier_hz - 1.0) * elements_per_delay * theta;
}

std::vector<double> ttd_delays(double theta, int elements_per_delay, int delays, double carrier_period)
{
    if (delays < 1)
        throw ValueError("ttd_delays: need at least one delay element");
    const double step = 0.5 * elements_per_delay * theta * carrier_period;
    // negative directions get a common offset so the last element sits at zero
    const double offset = theta < 0.0 ? (delays - 1) * std::abs(step) : 0.0;
    std::vector<double> t(static_cast<std::size_t>(delays));
    for (int m = 0; m < delays; ++m)
        t[static_cast<std::size_t>(m)] = offset + m * step;
    if (theta < 0.0)
        t.back() = 0.0;  // exact cancellation
    return t;
}

TtdNetwork TtdNetwork::make(double theta, int antennas, int delays, double carrier_hz)
{
    if (delays < 1 || antennas % delays != 0)
        throw DivisibilityError("TTD network: " + std::to_string(antennas) +
                                " elements do not split into " + std::to_string(delays) + " sub-vectors");
    TtdNetwork n;
    n.theta = theta;
    n.elements_per_delay = antennas / delays;
    n.carrier_period = 1.0 / carrier_hz;
    n.delays = ttd_delays(theta, n.elements_per_delay, delays, n.carrier_period);
    return n;
}

Complex TtdNetwork::phase(int m, double freq_hz) const
{
    const double fixed = pi * m * elements_per_delay * theta;
    const double delay = -2.0 * pi * freq_hz * delays[static_cast<std::size_t>(m)];
    return std::polar(1.0, fixed + delay);
}

CVector apply_ttd(const CVector& column, double theta, double freq_hz, double carrier_hz, int delays)
{
    const auto net = TtdNetwork::make(theta, static_cast<int>(column.size()), delays, carrier_hz);
    CVector out = column;
    for (int m = 0; m < delays; ++m)
        out.segment(m * net.elements_per_delay, net.elements_per_delay) *= net.phase(m, freq_hz);
    return out;
}

namespace {

// N_su dominant right-singular vectors of H_u[k] F_RF[k], rescaled to the
// per-bin power constraint.
HybridPrecoder with_svd_baseband(std::span<const CMatrix> channel_bins, const HybridPrecoder& stage1,
                                 std::vector<CMatrix> rf_per_bin)
{
    const int streams = static_cast<int>(stage1.baseband.cols());
    HybridPrecoder p = stage1;
    p.rf_per_bin = std::move(rf_per_bin);
    p.baseband_per_bin.clear();
    p.baseband_per_bin.reserve(channel_bins.size());
    for (std::size_t k = 0; k < channel_bins.size(); ++k) {
        const CMatrix& rf = p.rf_per_bin[k];
        CMatrix bb = svd(channel_bins[k] * rf).v.leftCols(streams);
        const double power = (rf * bb).norm();
        if (power > 0.0)
            bb *= std::sqrt(static_cast<double>(streams)) / power;
        p.baseband_per_bin.push_back(std::move(bb));
    }
    return p;
}

HybridCombiner with_retargeted_baseband(const HybridCombiner& stage1, std::vector<CMatrix> rf_per_bin,
                                        const ChannelRealization& ch,
                                        std::span<const HybridPrecoder> precoders,
                                        const SystemConfig& cfg, double xi)
{
    if (!(xi > 0.0))
        throw ValueError("combiner baseband: Bussgang gain must be positive");
    HybridCombiner c = stage1;
    c.rf_per_bin = std::move(rf_per_bin);
    c.target = mmse_targets(ch, precoders, cfg);
    c.baseband.clear();
    c.baseband.reserve(c.target.size());
    for (std::size_t k = 0; k < c.target.size(); ++k)
        c.baseband.push_back(c.rf_per_bin[k].adjoint() * c.target[k] / xi);
    return c;
}

} // namespace

HybridPrecoder ttd_precoder_per_bin(std::span<const CMatrix> channel_bins,
                                    const HybridPrecoder& stage1, const SystemConfig& cfg)
{
    const auto chains = stage1.rf.cols();
    if (static_cast<std::size_t>(chains) != stage1.selected_sines.size())
        throw ShapeMismatch("ttd_precoder_per_bin: one recorded direction per RF chain required");

    std::vector<CMatrix> rf_per_bin;
    rf_per_bin.reserve(channel_bins.size());
    for (std::size_t k = 0; k < channel_bins.size(); ++k) {
        const double f = bin_frequency(static_cast<int>(k), cfg);
        CMatrix rf(stage1.rf.rows(), chains);
        for (Eigen::Index l = 0; l < chains; ++l)
            rf.col(l) = apply_ttd(stage1.rf.col(l), stage1.selected_sines[static_cast<std::size_t>(l)], f,
                                  cfg.carrier_frequency_hz, cfg.ttd_per_chain);
        rf_per_bin.push_back(std::move(rf));
    }
    return with_svd_baseband(channel_bins, stage1, std::move(rf_per_bin));
}

HybridPrecoder flat_precoder_per_bin(std::span<const CMatrix> channel_bins, const HybridPrecoder& stage1)
{
    return with_svd_baseband(channel_bins, stage1,
                             std::vector<CMatrix>(channel_bins.size(), stage1.rf));
}

std::vector<CMatrix> ttd_combiner_rf(const HybridCombiner& stage1, const SystemConfig& cfg)
{
    const int n_sub = cfg.bs_antennas_per_subarray;
    const int subarrays = cfg.bs_rf_chains;
    if (stage1.selected_sines.size() != static_cast<std::size_t>(subarrays))
        throw ShapeMismatch("ttd_combiner_rf: one recorded direction per subarray required");

    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(cfg.num_bins));
    for (int k = 0; k < cfg.num_bins; ++k) {
        const double f = bin_frequency(k, cfg);
        CMatrix rf = CMatrix::Zero(stage1.rf.rows(), stage1.rf.cols());
        for (int s = 0; s < subarrays; ++s) {
            const CVector block = stage1.rf.block(s * n_sub, s, n_sub, 1);
            rf.block(s * n_sub, s, n_sub, 1) =
                apply_ttd(block, stage1.selected_sines[static_cast<std::size_t>(s)], f,
                          cfg.carrier_frequency_hz, cfg.ttd_per_chain);
        }
        out.push_back(std::move(rf));
    }
    return out;
}

HybridCombiner ttd_combiner_per_bin(const HybridCombiner& stage1, const ChannelRealization& ch,
                                    std::span<const HybridPrecoder> precoders,
                                    const SystemConfig& cfg, double xi)
{
    return with_retargeted_baseband(stage1, ttd_combiner_rf(stage1, cfg), ch, precoders, cfg, xi);
}

HybridCombiner flat_combiner_per_bin(const HybridCombiner& stage1, const ChannelRealization& ch,
                                     std::span<const HybridPrecoder> precoders,
                                     const SystemConfig& cfg, double xi)
{
    return with_retargeted_baseband(stage1, std::vector<CMatrix>(ch.mu.size(), stage1.rf), ch,
                                    precoders, cfg, xi);
}

} // namespace thz
