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


#include <cstdio>
#include <fstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "helpers.hpp"
#include "thz/errors.hpp"
#include "thz/harness.hpp"
#include "thz/quantization.hpp"

using namespace thz;
using nlohmann::json;
using thz::test::small_config;

namespace {

ExperimentPlan small_rate_plan()
{
    const json j = {{"scenario", "small"},
                    {"snr_db", {0, 20}},
                    {"adc_bits", {1, 3, "ideal"}},
                    {"schemes", {"proposed-ttd", "stage1-somp", "fully-digital-ideal-adc"}},
                    {"trials", 3},
                    {"seed", 5}};
    return parse_plan(j, small_config());
}

double mean_of(const ExperimentResult& r, const std::string& scheme, double snr, const std::string& bits)
{
    for (const auto& p : r.rates) {
        if (p.scheme == scheme && p.snr_db == snr && p.adc.to_string() == bits)
            return p.se_mean;
    }
    FAIL("no row for " << scheme << " " << snr << " " << bits);
    return 0.0;
}

} // namespace

TEST_CASE("plan parsing")
{
    const auto base = small_config();
    SUBCASE("fields and config layering")
    {
        const json j = {{"scenario", "sweep"},
                        {"config", {{"bandwidth_hz", 2e9}}},
                        {"set", {"rrc_roll_off=0.5"}},
                        {"seed", 11},
                        {"snr_db", {-5, 5}},
                        {"adc_bits", {2, "ideal"}},
                        {"pulse_shapes", {"rect"}},
                        {"schemes", {"stage1-only"}},
                        {"trials", 4}};
        const auto p = parse_plan(j, base);
        CHECK(p.scenario == "sweep");
        CHECK(p.kind == PlanKind::rate);
        CHECK(p.base.bandwidth_hz == 2e9);
        CHECK(p.base.rrc_roll_off == 0.5);
        CHECK(p.base.rng_seed == 11);
        CHECK(p.base.num_bins == 16);
        CHECK(p.snr_db == std::vector<double>{-5, 5});
        REQUIRE(p.adc.size() == 2);
        CHECK(p.adc[0].bit_count() == 2);
        CHECK(p.adc[1].is_ideal());
        CHECK(p.pulse_shapes == std::vector<PulseShape>{PulseShape::rect});
        CHECK(p.schemes == std::vector<Scheme>{Scheme::stage1_only});
        CHECK(p.trials == 4);
        CHECK(p.output == "sweep.csv");
    }
    SUBCASE("rejections")
    {
        CHECK_THROWS_AS(parse_plan(json::array(), base), PlanError);
        CHECK_THROWS_AS(parse_plan({{"snr", {1}}}, base), PlanError);
        CHECK_THROWS_AS(parse_plan({{"snr_db", json::array()}}, base), PlanError);
        CHECK_THROWS_AS(parse_plan({{"schemes", json::array()}}, base), PlanError);
        CHECK_THROWS_AS(parse_plan({{"snr_db", "10"}}, base), PlanError);
        CHECK_THROWS_AS(parse_plan({{"snr_db", {"ten"}}}, base), PlanError);
        CHECK_THROWS_AS(parse_plan({{"trials", 0}}, base), PlanError);
        CHECK_THROWS_AS(parse_plan({{"trials", "many"}}, base), PlanError);
        CHECK_THROWS_AS(parse_plan({{"kind", "movie"}}, base), PlanError);
        CHECK_THROWS_AS(parse_plan({{"bandwidths_hz", {-1.0}}}, base), PlanError);
        CHECK_THROWS_AS(parse_plan({{"schemes", {"dpp"}}}, base), ValueError);
        CHECK_THROWS_AS(parse_plan({{"adc_bits", {40}}}, base), UnsupportedResolution);
        CHECK_THROWS_AS(parse_plan({{"config", {{"bs_rf_chains", 5}}}}, base), DivisibilityError);
    }
    SUBCASE("files")
    {
        CHECK_THROWS_AS(load_plan("/nonexistent/plan.json", base), PlanError);
        const std::string path = "harness_bad_plan.json";
        {
            std::ofstream(path) << "{\"trials\": 3,";
        }
        CHECK_THROWS_AS(load_plan(path, base), PlanError);
        {
            std::ofstream(path) << "{\"trials\": 3, \"kind\": \"nag\"}";
        }
        const auto p = load_plan(path, base);
        CHECK(p.kind == PlanKind::nag);
        CHECK(p.trials == 3);
        std::remove(path.c_str());
    }
}

TEST_CASE("canned plans")
{
    const auto base = default_config();
    const auto a = canned_plan("fig2a", base);
    CHECK(a.kind == PlanKind::nag);
    CHECK(a.output == "fig2a.csv");

    const auto b = canned_plan("fig2b", base);
    CHECK(b.kind == PlanKind::rate);
    CHECK(b.snr_db.size() == 9);
    CHECK(b.snr_db.front() == -10);
    CHECK(b.snr_db.back() == 30);
    CHECK(b.schemes.size() == 4);

    const auto c = canned_plan("fig2c", base);
    CHECK(c.pulse_shapes == std::vector<PulseShape>{PulseShape::rrc, PulseShape::rect});
    CHECK(c.schemes == std::vector<Scheme>{Scheme::proposed_ttd, Scheme::stage1_only});

    const auto d = canned_plan("fig2d", base);
    REQUIRE(d.adc.size() == 5);
    CHECK(d.adc.back().is_ideal());
    CHECK(d.adc.front().bit_count() == 1);

    CHECK_THROWS_AS(canned_plan("fig3", base), PlanError);
}

TEST_CASE("rate runs are reproducible and independent of the job count")
{
    const auto plan = small_rate_plan();
    const auto one = rate_table(run_plan(plan, 1)).str();
    CHECK(one == rate_table(run_plan(plan, 1)).str());
    CHECK(one == rate_table(run_plan(plan, 3)).str());
    CHECK_THROWS_AS(run_plan(plan, 0), PlanError);

    auto other = plan;
    other.base.rng_seed = 6;
    CHECK(one != rate_table(run_plan(other, 1)).str());
}

TEST_CASE("rate table layout")
{
    const auto plan = small_rate_plan();
    const auto res = run_plan(plan, 2);
    // two hybrid schemes x 2 SNR x 3 ADCs, plus the fully digital row per SNR
    REQUIRE(res.rates.size() == 2 * 2 * 3 + 2);
    REQUIRE(res.rate_hashes.size() == res.rates.size());

    const auto table = parse_csv(rate_table(res).str());
    CHECK(table.header == std::vector<std::string>{"scenario", "scheme", "pulse_shape", "bandwidth_hz", "snr_dB",
                                                   "bits", "se_mean", "se_std", "rate_gbps", "trials", "seed",
                                                   "config_hash"});
    const auto bits = table.column("bits");
    const auto scheme = table.column("scheme");
    const auto se = table.column("se_mean");
    const auto rate = table.column("rate_gbps");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        CHECK(row[table.column("scenario")] == "small");
        CHECK(row[table.column("trials")] == "3");
        CHECK(row[table.column("seed")] == "5");
        CHECK_FALSE(row[table.column("config_hash")].empty());
        if (row[scheme] == "fully-digital-ideal-adc")
            CHECK(row[bits] == "ideal");
        CHECK(std::stod(row[rate]) == doctest::Approx(std::stod(row[se]) * plan.base.bandwidth_hz / 1e9));
        CHECK(std::stod(row[se]) > 0.0);
    }
    // the hash tracks the point, not only the base config
    CHECK(res.rate_hashes[0] != res.rate_hashes[1]);

    for (const char* s : {"proposed-ttd", "stage1-somp"}) {
        for (double snr : {0.0, 20.0}) {
            CHECK(mean_of(res, s, snr, "1") <= mean_of(res, s, snr, "3"));
            CHECK(mean_of(res, s, snr, "3") <= mean_of(res, s, snr, "ideal"));
        }
        CHECK(mean_of(res, s, 0.0, "3") < mean_of(res, s, 20.0, "3"));
    }
    CHECK(mean_of(res, "proposed-ttd", 20.0, "ideal") <= mean_of(res, "fully-digital-ideal-adc", 20.0, "ideal"));
}

TEST_CASE("module errors carry the trial and sweep point")
{
    auto plan = small_rate_plan();
    plan.base.tx_grid_size = 1;  // too small for two RF chains
    try {
        run_plan(plan, 1);
        FAIL("expected an error");
    } catch (const GridTooSmall&) {
        FAIL("the annotated error is rethrown with its kind, not its type");
    } catch (const Error& e) {
        CHECK(e.kind() == "GridTooSmall");
        const std::string msg = e.what();
        CHECK(msg.find("trial 0") != std::string::npos);
        CHECK(msg.find("pulse rrc") != std::string::npos);
        CHECK(msg.find("bandwidth") != std::string::npos);
    }
}

TEST_CASE("nag plan yields uncompensated and compensated tables")
{
    auto base = default_config();
    base.rng_seed = 7;
    auto plan = canned_plan("fig2a", base);
    plan.directions = 65;
    const auto res = run_plan(plan, 2);
    const int subarrays = base.bs_rf_chains;
    REQUIRE(res.nag.size() == static_cast<std::size_t>(subarrays * 2 * 3 * 65));

    int uncompensated = 0, compensated = 0;
    for (const auto& r : res.nag) {
        (r.compensated ? compensated : uncompensated)++;
        CHECK((r.k == 1 || r.k == 64 || r.k == 128));
        CHECK(r.nag >= 0.0);
        CHECK(r.nag <= 1.0 + 1e-12);
    }
    CHECK(uncompensated == compensated);

    const auto table = parse_csv(nag_table(res).str());
    CHECK(table.header == std::vector<std::string>{"subarray", "beam", "k", "frequency_hz", "direction_sin",
                                                   "direction_rad", "nag", "config_hash"});
    CHECK(table.rows.front()[table.column("beam")] == "uncompensated");
    CHECK(table.rows.back()[table.column("beam")] == "compensated");
    CHECK(nag_table(res).str() == nag_table(run_plan(plan, 1)).str());

    plan.bins = {0};
    CHECK_THROWS_AS(run_plan(plan, 1), PlanError);
    plan.bins = {5};
    plan.subarrays = {base.bs_rf_chains};
    CHECK_THROWS_AS(run_plan(plan, 1), PlanError);
}

TEST_CASE("delay and codebook tables")
{
    const auto cfg = small_config();
    const auto delays = parse_csv(delay_table(cfg).str());
    CHECK(delays.header == std::vector<std::string>{"side", "user", "chain", "theta_sin", "m", "delay_s"});
    // tx: users x RF chains x P, rx: subarrays x P
    const std::size_t expect = static_cast<std::size_t>(
        (cfg.num_users * cfg.tx_rf_chains_per_user + cfg.bs_rf_chains) * cfg.ttd_per_chain);
    CHECK(delays.rows.size() == expect);
    for (const auto& row : delays.rows) {
        CHECK(std::stod(row[delays.column("delay_s")]) >= 0.0);
        CHECK(std::abs(std::stod(row[delays.column("theta_sin")])) <= 1.0);
    }

    const auto cb = parse_csv(codebook_table(2).str());
    REQUIRE(cb.rows.size() == 4);
    CHECK(cb.rows.front()[cb.column("low")] == "-inf");
    CHECK(cb.rows.back()[cb.column("high")] == "inf");
    const auto& ref = lloyd_max_codebook(2);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::stod(cb.rows[i][cb.column("level")]) == ref.levels[i]);
    CHECK_THROWS_AS(codebook_table(0), ValueError);
}

TEST_CASE("timestamp comment")
{
    CHECK_FALSE(timestamp_comment(false).has_value());
    const auto c = timestamp_comment(true);
    REQUIRE(c.has_value());
    CHECK(c->rfind("generated ", 0) == 0);
    CHECK(c->find(version_string) != std::string::npos);
}

TEST_CASE("hybrid stage-1 only never beats the TTD design at the default scenario")
{
    auto plan = canned_plan("fig2b", default_config());
    plan.schemes = {Scheme::proposed_ttd, Scheme::stage1_only};
    plan.trials = 4;
    const auto res = run_plan(plan, 1);
    for (double snr : plan.snr_db) {
        CAPTURE(snr);
        const double ttd = mean_of(res, "proposed-ttd", snr, "3");
        const double flat = mean_of(res, "stage1-only", snr, "3");
        CHECK(flat <= ttd);
        if (snr >= 0.0)
            CHECK(flat < ttd);
    }
}

TEST_CASE("3-bit ADC loss within 2% at the top of the SNR grid")
{
    auto plan = canned_plan("fig2d", default_config());
    plan.trials = 10;
    const auto res = run_plan(plan, 1);
    const double top = plan.snr_db.back();
    const double ratio = mean_of(res, "proposed-ttd", top, "3") / mean_of(res, "proposed-ttd", top, "ideal");
    MESSAGE("SE(3-bit)/SE(ideal) at " << top << " dB = " << ratio);
    CHECK(ratio >= 0.98);
}
