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

#include "thz/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "thz/errors.hpp"

namespace thz {

namespace {

using nlohmann::json;

void require_positive(int value, const char* name)
{
    if (value <= 0)
        throw ValueError(std::string(name) + " must be positive, got " + std::to_string(value));
}

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value))
        throw ValueError(std::string(name) + " must be positive and finite");
}

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys = {
        "num_users", "tx_antennas_per_user", "tx_rf_chains_per_user", "streams_per_user",
        "bs_antennas", "bs_rf_chains", "ttd_per_chain", "carrier_frequency_hz", "bandwidth_hz",
        "num_bins", "data_block_len", "channel_taps", "tx_grid_size", "rx_grid_size_per_subarray",
        "tx_gain_total_dbi", "rx_gain_dbi", "distance_m", "num_nlos_clusters", "rays_per_cluster",
        "adc_bits", "noise_variance", "symbol_variance", "pulse_shape", "rrc_roll_off",
        "absorption_coefficient", "reflection_loss_db", "rng_seed"};
    return keys;
}

} // namespace

std::string to_string(PulseShape shape)
{
    return shape == PulseShape::rrc ? "rrc" : "rect";
}

PulseShape parse_pulse_shape(std::string_view text)
{
    if (text == "rrc")
        return PulseShape::rrc;
    if (text == "rect")
        return PulseShape::rect;
    throw ConfigParseError("unknown pulse shape '" + std::string(text) + "' (expected rrc or rect)");
}

AdcResolution AdcResolution::bits(int b)
{
    if (b < 1)
        throw ValueError("ADC resolution must be at least one bit");
    if (b > max_bits)
        throw UnsupportedResolution("ADC resolution above " + std::to_string(max_bits) +
                                    " bits is not tabulated; use \"ideal\"");
    AdcResolution r;
    r.bits_ = b;
    return r;
}

AdcResolution AdcResolution::parse(std::string_view text)
{
    if (text == "ideal" || text == "inf")
        return ideal();
    int value = 0;
    for (char c : text) {
        if (c < '0' || c > '9')
            throw ConfigParseError("bad ADC resolution '" + std::string(text) + "'");
        value = value * 10 + (c - '0');
        if (value > 1000)
            break;
    }
    if (text.empty())
        throw ConfigParseError("empty ADC resolution");
    return bits(value);
}

int AdcResolution::bit_count() const
{
    if (is_ideal())
        throw ValueError("ideal ADC has no finite bit count");
    return bits_;
}

std::string AdcResolution::to_string() const
{
    return is_ideal() ? "ideal" : std::to_string(bits_);
}

double SystemConfig::tx_gain_per_user_dbi() const
{
    // The total transmit gain is split evenly over the users.
    return tx_gain_total_dbi - 10.0 * std::log10(static_cast<double>(num_users));
}

double SystemConfig::snr_db() const
{
    return 10.0 * std::log10(1.0 / noise_variance);
}

double noise_variance_from_snr_db(double snr_db)
{
    return std::pow(10.0, -snr_db / 10.0);
}

SystemConfig validate(SystemConfig c)
{
    require_positive(c.num_users, "num_users");
    require_positive(c.tx_antennas_per_user, "tx_antennas_per_user");
    require_positive(c.tx_rf_chains_per_user, "tx_rf_chains_per_user");
    require_positive(c.streams_per_user, "streams_per_user");
    require_positive(c.bs_antennas, "bs_antennas");
    require_positive(c.bs_rf_chains, "bs_rf_chains");
    require_positive(c.ttd_per_chain, "ttd_per_chain");
    require_positive(c.channel_taps, "channel_taps");
    require_positive(c.tx_grid_size, "tx_grid_size");
    require_positive(c.rx_grid_size_per_subarray, "rx_grid_size_per_subarray");
    require_positive(c.carrier_frequency_hz, "carrier_frequency_hz");
    require_positive(c.bandwidth_hz, "bandwidth_hz");
    require_positive(c.distance_m, "distance_m");
    require_positive(c.symbol_variance, "symbol_variance");

    if (c.bandwidth_hz >= 2.0 * c.carrier_frequency_hz)
        throw ValueError("bandwidth must be below twice the carrier frequency");
    if (c.num_nlos_clusters < 0 || c.rays_per_cluster < 0)
        throw ValueError("NLoS cluster and ray counts must be nonnegative");
    if (c.num_nlos_clusters > 0 && c.rays_per_cluster == 0)
        throw ValueError("NLoS clusters need at least one ray");
    if (!(c.noise_variance >= 0.0) || !std::isfinite(c.noise_variance))
        throw ValueError("noise_variance must be nonnegative and finite");
    if (!(c.rrc_roll_off >= 0.0 && c.rrc_roll_off <= 1.0))
        throw ValueError("rrc_roll_off must lie in [0, 1]");
    if (!(c.absorption_coefficient >= 0.0) || !std::isfinite(c.absorption_coefficient))
        throw ValueError("absorption_coefficient must be nonnegative");
    if (!std::isfinite(c.reflection_loss_db))
        throw ValueError("reflection_loss_db must be finite");

    if (c.bs_antennas % c.bs_rf_chains != 0)
        throw DivisibilityError("bs_antennas (" + std::to_string(c.bs_antennas) +
                                ") is not divisible by bs_rf_chains (" +
                                std::to_string(c.bs_rf_chains) + ")");
    c.bs_antennas_per_subarray = c.bs_antennas / c.bs_rf_chains;
    if (c.bs_antennas_per_subarray % c.ttd_per_chain != 0)
        throw DivisibilityError("subarray size " + std::to_string(c.bs_antennas_per_subarray) +
                                " is not divisible by ttd_per_chain " +
                                std::to_string(c.ttd_per_chain));
    if (c.tx_antennas_per_user % c.ttd_per_chain != 0)
        throw DivisibilityError("tx_antennas_per_user " + std::to_string(c.tx_antennas_per_user) +
                                " is not divisible by ttd_per_chain " +
                                std::to_string(c.ttd_per_chain));
    c.phase_shifters_per_ttd = c.bs_antennas_per_subarray / c.ttd_per_chain;

    if (c.streams_per_user > c.tx_rf_chains_per_user)
        throw DimensionError("streams_per_user exceeds tx_rf_chains_per_user");
    if (c.tx_rf_chains_per_user > c.tx_antennas_per_user)
        throw DimensionError("tx_rf_chains_per_user exceeds tx_antennas_per_user");
    c.total_streams = c.num_users * c.streams_per_user;
    if (c.total_streams > c.bs_rf_chains)
        throw DimensionError("total streams (" + std::to_string(c.total_streams) +
                             ") exceed bs_rf_chains (" + std::to_string(c.bs_rf_chains) + ")");

    // Zero padding: K = N_d + L - 1.
    require_positive(c.data_block_len, "data_block_len");
    const int bins = c.data_block_len + c.channel_taps - 1;
    if (c.num_bins != 0 && c.num_bins != bins)
        throw DimensionError("num_bins " + std::to_string(c.num_bins) +
                             " violates num_bins = data_block_len + channel_taps - 1 = " +
                             std::to_string(bins));
    c.num_bins = bins;

    if (!c.adc.is_ideal())
        (void)AdcResolution::bits(c.adc.bit_count());
    return c;
}

SystemConfig default_config()
{
    return validate(SystemConfig{});
}

void to_json(json& j, const SystemConfig& c)
{
    j = json{
        {"num_users", c.num_users},
        {"tx_antennas_per_user", c.tx_antennas_per_user},
        {"tx_rf_chains_per_user", c.tx_rf_chains_per_user},
        {"streams_per_user", c.streams_per_user},
        {"bs_antennas", c.bs_antennas},
        {"bs_rf_chains", c.bs_rf_chains},
        {"ttd_per_chain", c.ttd_per_chain},
        {"carrier_frequency_hz", c.carrier_frequency_hz},
        {"bandwidth_hz", c.bandwidth_hz},
        {"num_bins", c.num_bins},
        {"data_block_len", c.data_block_len},
        {"channel_taps", c.channel_taps},
        {"tx_grid_size", c.tx_grid_size},
        {"rx_grid_size_per_subarray", c.rx_grid_size_per_subarray},
        {"tx_gain_total_dbi", c.tx_gain_total_dbi},
        {"rx_gain_dbi", c.rx_gain_dbi},
        {"distance_m", c.distance_m},
        {"num_nlos_clusters", c.num_nlos_clusters},
        {"rays_per_cluster", c.rays_per_cluster},
        {"noise_variance", c.noise_variance},
        {"symbol_variance", c.symbol_variance},
        {"pulse_shape", to_string(c.pulse_shape)},
        {"rrc_roll_off", c.rrc_roll_off},
        {"absorption_coefficient", c.absorption_coefficient},
        {"reflection_loss_db", c.reflection_loss_db},
        {"rng_seed", c.rng_seed},
    };
    if (c.adc.is_ideal())
        j["adc_bits"] = "ideal";
    else
        j["adc_bits"] = c.adc.bit_count();
}

void from_json(const json& j, SystemConfig& c)
{
    if (!j.is_object())
        throw ConfigParseError("config must be a flat JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known_keys().count(key))
            throw ConfigParseError("unknown config key '" + key + "'");
    }

    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) {
            try {
                j.at(key).get_to(field);
            } catch (const json::exception& e) {
                throw ConfigParseError(std::string("bad value for '") + key + "': " + e.what());
            }
        }
    };

    get("num_users", c.num_users);
    get("tx_antennas_per_user", c.tx_antennas_per_user);
    get("tx_rf_chains_per_user", c.tx_rf_chains_per_user);
    get("streams_per_user", c.streams_per_user);
    get("bs_antennas", c.bs_antennas);
    get("bs_rf_chains", c.bs_rf_chains);
    get("ttd_per_chain", c.ttd_per_chain);
    get("carrier_frequency_hz", c.carrier_frequency_hz);
    get("bandwidth_hz", c.bandwidth_hz);
    get("channel_taps", c.channel_taps);
    get("tx_grid_size", c.tx_grid_size);
    get("rx_grid_size_per_subarray", c.rx_grid_size_per_subarray);
    get("tx_gain_total_dbi", c.tx_gain_total_dbi);
    get("rx_gain_dbi", c.rx_gain_dbi);
    get("distance_m", c.distance_m);
    get("num_nlos_clusters", c.num_nlos_clusters);
    get("rays_per_cluster", c.rays_per_cluster);
    get("noise_variance", c.noise_variance);
    get("symbol_variance", c.symbol_variance);
    get("rrc_roll_off", c.rrc_roll_off);
    get("absorption_coefficient", c.absorption_coefficient);
    get("reflection_loss_db", c.reflection_loss_db);
    get("rng_seed", c.rng_seed);

    // Either block length may be given alone; the other follows from K = N_d + L - 1.
    const bool has_bins = j.contains("num_bins");
    const bool has_block = j.contains("data_block_len");
    get("num_bins", c.num_bins);
    get("data_block_len", c.data_block_len);
    if (has_bins && !has_block)
        c.data_block_len = c.num_bins - c.channel_taps + 1;
    else if (has_block && !has_bins)
        c.num_bins = 0;

    if (j.contains("pulse_shape")) {
        if (!j["pulse_shape"].is_string())
            throw ConfigParseError("pulse_shape must be \"rrc\" or \"rect\"");
        c.pulse_shape = parse_pulse_shape(j["pulse_shape"].get<std::string>());
    }
    if (j.contains("adc_bits")) {
        const auto& v = j["adc_bits"];
        if (v.is_string())
            c.adc = AdcResolution::parse(v.get<std::string>());
        else if (v.is_number_integer())
            c.adc = AdcResolution::bits(v.get<int>());
        else
            throw ConfigParseError("adc_bits must be an integer or \"ideal\"");
    }
}

SystemConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigParseError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigParseError("malformed config '" + path + "': " + e.what());
    }
    SystemConfig cfg;
    from_json(j, cfg);
    return cfg;
}

void save_config(const SystemConfig& cfg, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigParseError("cannot write config file '" + path + "'");
    out << json(cfg).dump(2) << '\n';
}

SystemConfig apply_overrides(const SystemConfig& cfg, const std::vector<std::string>& assignments)
{
    json j = cfg;
    for (const auto& assignment : assignments) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigParseError("override '" + assignment + "' is not of the form key=value");
        const std::string key = assignment.substr(0, eq);
        const std::string text = assignment.substr(eq + 1);
        if (!known_keys().count(key))
            throw ConfigParseError("unknown config key '" + key + "'");
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded())
            value = text;
        j[key] = value;
        // Keep K = N_d + L - 1 consistent with whichever side was changed.
        if (key == "num_bins" || key == "channel_taps")
            j.erase("data_block_len");
        else if (key == "data_block_len")
            j.erase("num_bins");
    }
    if (!j.contains("data_block_len") && !j.contains("num_bins"))
        j["num_bins"] = cfg.num_bins;
    SystemConfig out;
    from_json(j, out);
    return out;
}

std::string config_hash(const SystemConfig& cfg)
{
    const std::string canonical = json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace thz
