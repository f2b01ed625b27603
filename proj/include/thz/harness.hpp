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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thz/config.hpp"
#include "thz/csv.hpp"
#include "thz/metrics.hpp"
#include "thz/pipeline.hpp"

namespace thz {

inline constexpr const char* version_string = "thzsim 0.1.0";

enum class PlanKind { rate, nag };

struct ExperimentPlan {
    std::string scenario = "custom";
    PlanKind kind = PlanKind::rate;
    SystemConfig base;  // validated

    // rate sweeps; empty axes fall back to the base config
    std::vector<double> snr_db;
    std::vector<AdcResolution> adc;
    std::vector<PulseShape> pulse_shapes;
    std::vector<double> bandwidths_hz;
    std::vector<Scheme> schemes;
    int trials = 100;

    // nag tables
    int directions = 1024;
    std::vector<int> subarrays;  // 0-based; empty = all
    std::vector<int> bins;       // 1-based subcarrier indices; empty = {1, K/2, K}

    std::string output;
};

/// Plan from JSON. Config fields go under "config" (partial object) and/or
/// "set" (list of "key=value"), applied on top of `base`.
ExperimentPlan parse_plan(const nlohmann::json& j, const SystemConfig& base);
ExperimentPlan load_plan(const std::string& path, const SystemConfig& base);

/// fig2a | fig2b | fig2c | fig2d
ExperimentPlan canned_plan(const std::string& name, const SystemConfig& base);

struct NagRow {
    int subarray = 0;
    bool compensated = false;
    int k = 0;  // 1-based subcarrier
    double frequency_hz = 0.0;
    double direction_sin = 0.0;
    double nag = 0.0;
};

struct ExperimentResult {
    std::vector<RatePoint> rates;
    std::vector<std::string> rate_hashes;  // per rate row
    std::vector<NagRow> nag;
    std::string config_hash;
    std::uint64_t seed = 0;
};

/// Runs every sweep point and trial; `jobs` worker threads (>= 1).
ExperimentResult run_plan(const ExperimentPlan& plan, int jobs = 1);

CsvWriter rate_table(const ExperimentResult& result);
CsvWriter nag_table(const ExperimentResult& result);
CsvWriter result_table(const ExperimentPlan& plan, const ExperimentResult& result);

/// Delay settings of every transmit chain and receive subarray for one
/// realization (seed, trial 0).
CsvWriter delay_table(const SystemConfig& cfg);

CsvWriter codebook_table(int bits);

/// "# generated <UTC time> by <version>" or nothing.
std::optional<std::string> timestamp_comment(bool enabled);

} // namespace thz
