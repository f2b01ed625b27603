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

#include <string>
#include <vector>

#include "thz/config.hpp"
#include "thz/numerics.hpp"

namespace thz {

/// One propagation path of one user.
///
/// The base station is a single co-located ULA cut into subarrays, so the
/// arrival angle is shared by all subarrays; each subarray observes its own
/// slice of the full-array response.
struct PathParams {
    double aoa_rad = 0.0;
    double aod_rad = 0.0;
    double delay_s = 0.0;
    double path_length_m = 0.0;
    double phase_rad = 0.0;  // frequency-flat phase of the complex gain
    bool is_los = true;
    int cluster = 0;  // 0 for the LoS path, 1..N_NLoS otherwise
    int ray = 0;
};

struct ChannelRealization {
    std::vector<std::vector<PathParams>> paths;  // [user][path]
    std::vector<std::vector<CMatrix>> freq;      // [user][bin], N_BS x N_Tu
    std::vector<std::vector<CMatrix>> taps;      // [user][tap], K taps, N_BS x N_Tu
    std::vector<CMatrix> mu;                     // [bin], N_BS x N_T

    int num_users() const { return static_cast<int>(freq.size()); }
    int num_bins() const { return freq.empty() ? 0 : static_cast<int>(freq[0].size()); }
};

/// Subcarrier frequency for the 1-based subcarrier index k.
double subcarrier_frequency(int k, const SystemConfig& cfg);

/// Frequency of FFT bin 0..K-1 (bin b is subcarrier b + 1).
double bin_frequency(int bin, const SystemConfig& cfg);

/// Half-wavelength ULA response with the spatial-wideband factor f/fc.
CVector array_response(int antennas, double theta_rad, double freq_hz, double carrier_hz);

/// Lambda = |a(N, theta, f)^H steer|.
double normalized_array_gain(const CVector& steer, double theta_rad, double freq_hz,
                             double carrier_hz);

/// Pulse sample at t = x * T_s.
double pulse_sample(double x, PulseShape shape, double roll_off);

/// beta_tau[bin] = sum_z p(z T_s - tau) exp(-j 2 pi bin z / K).
Complex pulse_coefficient(int bin, double delay_s, const SystemConfig& cfg);

/// Complex path gain without antenna gains: spreading, absorption and, for
/// NLoS paths, the reflection loss.
Complex path_gain(double freq_hz, double path_length_m, bool is_los, const SystemConfig& cfg,
                  double phase_rad = 0.0);

double antenna_gain_amplitude(double gain_dbi);

/// Draws the path geometry of every user.
std::vector<std::vector<PathParams>> draw_paths(const SystemConfig& cfg, Rng& rng);

/// Builds frequency responses, taps and H_MU from given path geometry.
ChannelRealization synthesize_channel(const SystemConfig& cfg,
                                      std::vector<std::vector<PathParams>> paths);

ChannelRealization generate_channel(const SystemConfig& cfg, Rng& rng);

// ---------- Fixture dump ----------
//
// <prefix>.paths.csv holds the geometry; <prefix>.bin holds the per-bin
// frequency responses (format in docs/formats.md).

void dump_channel(const ChannelRealization& ch, const SystemConfig& cfg, const std::string& prefix);
ChannelRealization read_channel_dump(const SystemConfig& cfg, const std::string& prefix);

} // namespace thz
