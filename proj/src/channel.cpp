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

#include "thz/channel.hpp"

#include <cmath>

#include "thz/errors.hpp"

namespace thz {

namespace {

constexpr double max_angle = pi / 3.0;

// Root-raised-cosine impulse response, peak-unnormalized, at t = x * T.
double rrc(double x, double beta)
{
    if (beta == 0.0)
        return x == 0.0 ? 1.0 : std::sin(pi * x) / (pi * x);
    if (x == 0.0)
        return 1.0 - beta + 4.0 * beta / pi;
    if (std::abs(std::abs(x) - 1.0 / (4.0 * beta)) < 1e-12) {
        const double a = pi / (4.0 * beta);
        return beta / std::sqrt(2.0) *
               ((1.0 + 2.0 / pi) * std::sin(a) + (1.0 - 2.0 / pi) * std::cos(a));
    }
    const double num = std::sin(pi * x * (1.0 - beta)) + 4.0 * beta * x * std::cos(pi * x * (1.0 + beta));
    const double den = pi * x * (1.0 - (4.0 * beta * x) * (4.0 * beta * x));
    return num / den;
}

} // namespace

double subcarrier_frequency(int k, const SystemConfig& cfg)
{
    if (k < 1 || k > cfg.num_bins)
        throw IndexError("subcarrier index " + std::to_string(k) + " outside 1.." +
                         std::to_string(cfg.num_bins));
    const double K = cfg.num_bins;
    return cfg.carrier_frequency_hz + (k - (K + 1.0) / 2.0) * cfg.bandwidth_hz / K;
}

double bin_frequency(int bin, const SystemConfig& cfg)
{
    return subcarrier_frequency(bin + 1, cfg);
}

CVector array_response(int antennas, double theta_rad, double freq_hz, double carrier_hz)
{
    CVector a(antennas);
    const double step = pi * (freq_hz / carrier_hz) * std::sin(theta_rad);
    const double norm = 1.0 / std::sqrt(static_cast<double>(antennas));
    for (int n = 0; n < antennas; ++n)
        a(n) = std::polar(norm, -step * n);
    return a;
}

double normalized_array_gain(const CVector& steer, double theta_rad, double freq_hz,
                             double carrier_hz)
{
    const CVector a = array_response(static_cast<int>(steer.size()), theta_rad, freq_hz, carrier_hz);
    return std::abs(a.dot(steer));  // dot() conjugates the left operand
}

double pulse_sample(double x, PulseShape shape, double roll_off)
{
    if (shape == PulseShape::rect)
        return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0;
    return rrc(x, roll_off);
}

Complex pulse_coefficient(int bin, double delay_s, const SystemConfig& cfg)
{
    const double ts = cfg.sampling_interval();
    const double max_delay = (cfg.channel_taps - 1) * ts;
    if (delay_s < 0.0 || delay_s > max_delay * (1.0 + 1e-12))
        throw DelayOutOfRange("path delay outside [0, (L-1) T_s]");
    const int K = cfg.num_bins;
    const double shift = delay_s / ts;
    Complex sum = 0.0;
    for (int z = 0; z < K; ++z) {
        const double p = pulse_sample(z - shift, cfg.pulse_shape, cfg.rrc_roll_off);
        if (p != 0.0) {
            // reduce bin*z mod K to keep the phase argument small
            const long long idx = (static_cast<long long>(bin) * z) % K;
            sum += p * std::polar(1.0, -2.0 * pi * static_cast<double>(idx) / K);
        }
    }
    return sum;
}

Complex path_gain(double freq_hz, double path_length_m, bool is_los, const SystemConfig& cfg,
                  double phase_rad)
{
    const double spreading = speed_of_light / (4.0 * pi * freq_hz * path_length_m);
    const double absorption = std::exp(-0.5 * cfg.absorption_coefficient * path_length_m);
    const double reflection = is_los ? 1.0 : std::pow(10.0, cfg.reflection_loss_db / 20.0);
    return std::polar(spreading * absorption * reflection, phase_rad);
}

double antenna_gain_amplitude(double gain_dbi)
{
    return std::sqrt(std::pow(10.0, gain_dbi / 10.0));
}

std::vector<std::vector<PathParams>> draw_paths(const SystemConfig& cfg, Rng& rng)
{
    const double max_delay = (cfg.channel_taps - 1) * cfg.sampling_interval();
    std::vector<std::vector<PathParams>> paths(cfg.num_users);
    for (auto& user : paths) {
        PathParams los;
        los.aoa_rad = rng.uniform(-max_angle, max_angle);
        los.aod_rad = rng.uniform(-max_angle, max_angle);
        los.delay_s = 0.0;
        los.path_length_m = cfg.distance_m;
        user.push_back(los);

        for (int q = 1; q <= cfg.num_nlos_clusters; ++q) {
            // Unit fraction of the delay window, so the geometry in units of T_s
            // is independent of the bandwidth.
            const double fraction = rng.uniform(0.0, 1.0);
            const double aoa = rng.uniform(-max_angle, max_angle);
            const double aod = rng.uniform(-max_angle, max_angle);
            for (int j = 1; j <= cfg.rays_per_cluster; ++j) {
                PathParams p;
                p.is_los = false;
                p.cluster = q;
                p.ray = j;
                p.aoa_rad = aoa;
                p.aod_rad = aod;
                p.delay_s = fraction * max_delay;
                p.path_length_m = cfg.distance_m + speed_of_light * p.delay_s;
                p.phase_rad = rng.uniform(0.0, 2.0 * pi);
                user.push_back(p);
            }
        }
    }
    return paths;
}

ChannelRealization synthesize_channel(const SystemConfig& cfg,
                                      std::vector<std::vector<PathParams>> paths)
{
    if (static_cast<int>(paths.size()) != cfg.num_users)
        throw ShapeMismatch("path list does not cover every user");

    const int K = cfg.num_bins;
    const int n_bs = cfg.bs_antennas;
    const int n_sub = cfg.bs_antennas_per_subarray;
    const int n_tx = cfg.tx_antennas_per_user;
    const double fc = cfg.carrier_frequency_hz;
    const double gains = antenna_gain_amplitude(cfg.tx_gain_per_user_dbi()) *
                         antenna_gain_amplitude(cfg.rx_gain_dbi);
    const double los_scale = std::sqrt(static_cast<double>(n_tx * n_sub));
    const int nlos_rays = cfg.num_nlos_clusters * cfg.rays_per_cluster;
    const double nlos_scale = nlos_rays > 0 ? std::sqrt(static_cast<double>(n_tx * n_sub) / nlos_rays) : 0.0;

    ChannelRealization ch;
    ch.freq.assign(cfg.num_users, std::vector<CMatrix>(K, CMatrix::Zero(n_bs, n_tx)));

    for (int u = 0; u < cfg.num_users; ++u) {
        for (const auto& path : paths[u]) {
            std::vector<Complex> beta(K);
            for (int k = 0; k < K; ++k)
                beta[k] = pulse_coefficient(k, path.delay_s, cfg);
            for (int k = 0; k < K; ++k) {
                const double f = bin_frequency(k, cfg);
                const Complex coef = (path.is_los ? los_scale : nlos_scale) *
                                     path_gain(f, path.path_length_m, path.is_los, cfg, path.phase_rad) *
                                     beta[k] * gains;
                const CVector a_tx = array_response(n_tx, path.aod_rad, f, fc);
                const CVector a_sub = array_response(n_sub, path.aoa_rad, f, fc);
                const CMatrix block = coef * a_sub * a_tx.adjoint();
                // subarray s sees the full-array slice starting at element s*n_sub
                const double step = pi * (f / fc) * std::sin(path.aoa_rad);
                for (int s = 0; s < cfg.bs_rf_chains; ++s) {
                    const Complex offset = std::polar(1.0, -step * s * n_sub);
                    ch.freq[u][k].block(s * n_sub, 0, n_sub, n_tx) += offset * block;
                }
            }
        }
    }

    ch.taps.resize(cfg.num_users);
    for (int u = 0; u < cfg.num_users; ++u)
        ch.taps[u] = idft_sequence(std::span<const CMatrix>(ch.freq[u]), K);

    ch.mu.assign(K, CMatrix(n_bs, cfg.total_tx_antennas()));
    for (int k = 0; k < K; ++k) {
        for (int u = 0; u < cfg.num_users; ++u)
            ch.mu[k].middleCols(u * n_tx, n_tx) = ch.freq[u][k];
    }
    ch.paths = std::move(paths);
    return ch;
}

ChannelRealization generate_channel(const SystemConfig& cfg, Rng& rng)
{
    return synthesize_channel(cfg, draw_paths(cfg, rng));
}

} // namespace thz
