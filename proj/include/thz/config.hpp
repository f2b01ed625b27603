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

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace thz {

enum class PulseShape { rrc, rect };

std::string to_string(PulseShape shape);
PulseShape parse_pulse_shape(std::string_view text);

// ADC resolution: a finite bit count or the unquantized ("ideal") receiver.
class AdcResolution {
public:
    static constexpr int max_bits = 12;

    constexpr AdcResolution() = default;

    static constexpr AdcResolution ideal() { return AdcResolution(); }
    static AdcResolution bits(int b);
    static AdcResolution parse(std::string_view text);

    constexpr bool is_ideal() const { return bits_ == 0; }
    int bit_count() const;
    std::string to_string() const;

    friend constexpr bool operator==(AdcResolution, AdcResolution) = default;

private:
    int bits_ = 0;
};

/// Complete simulation configuration of the uplink.
///
/// Field defaults reproduce the four-user 1 THz scenario. Fields under
/// "derived" are recomputed by validate() and never read from disk.
struct SystemConfig {
    int num_users = 4;
    int tx_antennas_per_user = 4;
    int tx_rf_chains_per_user = 2;
    int streams_per_user = 2;
    int bs_antennas = 96;
    int bs_rf_chains = 16;  // one subarray per RF chain
    int ttd_per_chain = 2;

    double carrier_frequency_hz = 1e12;
    double bandwidth_hz = 1e10;
    int num_bins = 128;
    int data_block_len = 125;
    int channel_taps = 4;

    int tx_grid_size = 8;
    int rx_grid_size_per_subarray = 12;

    double tx_gain_total_dbi = 28.0;  // summed over all users
    double rx_gain_dbi = 28.0;        // per subarray
    double distance_m = 15.0;
    int num_nlos_clusters = 3;
    int rays_per_cluster = 1;

    AdcResolution adc = AdcResolution::bits(3);
    double noise_variance = 0.1;
    double symbol_variance = 1.0;

    PulseShape pulse_shape = PulseShape::rrc;
    double rrc_roll_off = 0.3;
    double absorption_coefficient = 0.0033;  // 1/m
    double reflection_loss_db = -10.0;       // NLoS amplitude factor

    std::uint64_t rng_seed = 7;

    // derived
    int bs_antennas_per_subarray = 0;
    int phase_shifters_per_ttd = 0;
    int total_streams = 0;

    double sampling_interval() const { return 1.0 / bandwidth_hz; }
    double carrier_period() const { return 1.0 / carrier_frequency_hz; }
    int total_tx_antennas() const { return num_users * tx_antennas_per_user; }
    int total_tx_rf_chains() const { return num_users * tx_rf_chains_per_user; }
    int num_subarrays() const { return bs_rf_chains; }
    double tx_gain_per_user_dbi() const;
    double snr_db() const;
};

/// Checks every dimensional relation and fills the derived fields.
/// Throws DivisibilityError, DimensionError, ValueError or UnsupportedResolution.
SystemConfig validate(SystemConfig raw);

SystemConfig default_config();

void to_json(nlohmann::json& j, const SystemConfig& cfg);
void from_json(const nlohmann::json& j, SystemConfig& cfg);

SystemConfig load_config(const std::string& path);
void save_config(const SystemConfig& cfg, const std::string& path);

// Applies "key=value" overrides on top of a config. Values are parsed as JSON
// when possible and taken as strings otherwise.
SystemConfig apply_overrides(const SystemConfig& cfg, const std::vector<std::string>& assignments);

// FNV-1a over the canonical JSON form, as 16 lowercase hex digits.
std::string config_hash(const SystemConfig& cfg);

double noise_variance_from_snr_db(double snr_db);

} // namespace thz
