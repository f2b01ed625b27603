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


// One PASS/FAIL line per acceptance criterion. `acceptance --only <id>` runs
// a single criterion; the exit status is nonzero if any checked line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../unit/helpers.hpp"
#include "../unit/reference_oracles.hpp"
#include "thz/channel.hpp"
#include "thz/harness.hpp"
#include "thz/metrics.hpp"
#include "thz/oracle.hpp"
#include "thz/pipeline.hpp"
#include "thz/quantization.hpp"
#include "thz/stage1.hpp"
#include "thz/stage2.hpp"

using namespace thz;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::string failures;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            failures += " [failed: " + what + "]";
        }
    }
};

int jobs()
{
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

double mean_of(const ExperimentResult& r, const std::string& scheme, double snr, const std::string& bits,
               double bandwidth = 0.0)
{
    for (const auto& p : r.rates) {
        if (p.scheme == scheme && p.snr_db == snr && p.adc.to_string() == bits &&
            (bandwidth == 0.0 || p.bandwidth_hz == bandwidth))
            return p.se_mean;
    }
    throw std::runtime_error("missing row " + scheme);
}

// --- beam split --------------------------------------------------------------

void beam_split(Outcome& o)
{
    auto cfg = default_config();
    cfg.rng_seed = 7;
    Rng rng = Rng::stream(cfg.rng_seed, {0});
    const auto ch = generate_channel(cfg, rng);
    const auto pre = design_precoders(ch, cfg);
    const auto comb = design_combiner(ch, pre, cfg, bussgang_gain(cfg.adc));
    const int n = cfg.bs_antennas_per_subarray;
    const double fc = cfg.carrier_frequency_hz;

    double worst_comp = 1.0, worst_flat_edge = 1.0, min_shift = 1.0;
    for (int s = 0; s < cfg.bs_rf_chains; ++s) {
        const CVector beam = comb.rf.block(s * n, s, n, 1);
        const double steer = comb.selected_sines[static_cast<std::size_t>(s)];
        const double theta = std::asin(steer);
        for (int k = 0; k < cfg.num_bins; ++k) {
            const double f = bin_frequency(k, cfg);
            const double comp = normalized_array_gain(apply_ttd(beam, steer, f, fc, cfg.ttd_per_chain), theta, f, fc);
            worst_comp = std::min(worst_comp, comp);
        }
        for (int k : {0, cfg.num_bins - 1}) {
            const double f = bin_frequency(k, cfg);
            const double flat = normalized_array_gain(beam, theta, f, fc);
            const double comp = normalized_array_gain(apply_ttd(beam, steer, f, fc, cfg.ttd_per_chain), theta, f, fc);
            worst_flat_edge = std::min(worst_flat_edge, flat);
            o.require(flat < comp, "subarray " + std::to_string(s) + " edge gain not below compensated");
            const double shift = std::abs(peak_direction(beam, f, fc) - steer);
            min_shift = std::min(min_shift, shift);
            o.require(shift > 1e-9, "subarray " + std::to_string(s) + " peak not displaced");
        }
    }
    o.require(worst_comp >= 0.95, "compensated NAG below 0.95");
    o.detail << "min compensated NAG " << worst_comp << ", min uncompensated edge NAG " << worst_flat_edge
             << ", min edge peak shift (sine) " << min_shift;
}

// --- ADC gap ----------------------------------------------------------------

void adc_gap(Outcome& o)
{
    auto plan = canned_plan("fig2d", default_config());
    plan.trials = 100;
    const auto res = run_plan(plan, jobs());
    const double ratio = mean_of(res, "proposed-ttd", 10.0, "3") / mean_of(res, "proposed-ttd", 10.0, "ideal");
    o.require(ratio >= 0.95, "SE(3-bit)/SE(ideal) at 10 dB below 0.95");
    for (double snr : plan.snr_db) {
        double prev = 0.0;
        for (const char* b : {"1", "2", "3", "4", "ideal"}) {
            const double v = mean_of(res, "proposed-ttd", snr, b);
            o.require(v >= prev, "SE not monotone in bits at " + std::to_string(snr) + " dB");
            prev = v;
        }
    }
    o.detail << "SE(3-bit)/SE(ideal) at 10 dB = " << ratio;
}

// --- TTD gain ----------------------------------------------------------------

void ttd_gain(Outcome& o)
{
    const auto base = default_config();
    {
        ExperimentPlan plan;
        plan.scenario = "ttd-gain";
        plan.base = base;
        plan.snr_db = {0, 5, 10, 15, 20, 25, 30};
        plan.bandwidths_hz = {10e9};
        plan.schemes = {Scheme::proposed_ttd, Scheme::stage1_only};
        plan.trials = 100;
        const auto res = run_plan(plan, jobs());
        double worst = INFINITY;
        for (double snr : plan.snr_db) {
            const double g = mean_of(res, "proposed-ttd", snr, base.adc.to_string()) /
                                 mean_of(res, "stage1-only", snr, base.adc.to_string()) -
                             1.0;
            worst = std::min(worst, g);
        }
        o.require(worst >= 0.05, "gain at 10 GHz below 5%");
        o.detail << "min relative gain at 10 GHz, SNR >= 0 dB: " << 100.0 * worst << "%";
    }
    {
        ExperimentPlan plan;
        plan.scenario = "ttd-gain-bandwidth";
        plan.base = base;
        plan.snr_db = {10};
        plan.bandwidths_hz = {10e9, 5e9, 2e9, 1e9, 0.5e9, 0.2e9, 0.1e9};
        plan.schemes = {Scheme::proposed_ttd, Scheme::stage1_only};
        plan.trials = 100;
        const auto res = run_plan(plan, jobs());
        double prev = INFINITY;
        o.detail << "; gain vs B at 10 dB:";
        for (double b : plan.bandwidths_hz) {
            const double g = mean_of(res, "proposed-ttd", 10.0, base.adc.to_string(), b) /
                                 mean_of(res, "stage1-only", 10.0, base.adc.to_string(), b) -
                             1.0;
            o.detail << " " << b / 1e9 << "GHz " << 100.0 * g << "%";
            o.require(g <= prev, "gain does not shrink at " + std::to_string(b / 1e9) + " GHz");
            prev = g;
        }
    }
}

// --- oracle equivalence ------------------------------------------------------

void oracle_equivalence(Outcome& o)
{
    Rng pick(2024);
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        auto cfg = default_config();
        cfg.num_users = 2;
        cfg.tx_antennas_per_user = 4;
        cfg.tx_rf_chains_per_user = 2;
        cfg.streams_per_user = 1;
        cfg.bs_rf_chains = inst % 2 == 0 ? 2 : 3;
        cfg.bs_antennas = cfg.bs_rf_chains * (inst % 4 < 2 ? 4 : 2);
        cfg.ttd_per_chain = 2;
        cfg.channel_taps = 2 + inst % 3;
        cfg.data_block_len = 6 + static_cast<int>(pick.uniform(0.0, 9.0));  // K <= 16
        cfg.num_bins = 0;
        cfg.tx_grid_size = 8;
        cfg.rx_grid_size_per_subarray = 8;
        cfg.bandwidth_hz = pick.uniform(1e9, 2e10);
        cfg.pulse_shape = inst % 2 == 0 ? PulseShape::rrc : PulseShape::rect;
        cfg.adc = AdcResolution::ideal();
        cfg = validate(cfg);

        Rng rng = Rng::stream(99, {static_cast<std::uint64_t>(inst)});
        const auto ch = generate_channel(cfg, rng);
        const Scheme scheme = inst % 3 == 0 ? Scheme::stage1_somp : Scheme::proposed_ttd;
        const auto t = design_transceiver(ch, cfg, scheme);
        const auto symbols = zero_padded_block(cfg, rng);
        for (OracleMode mode : {OracleMode::direct, OracleMode::fft}) {
            const auto out = time_domain_oracle(ch, t.precoders, t.combiner, cfg, symbols, rng, {mode, false});
            const auto model = frequency_domain_model(ch, t.precoders, t.combiner, 1.0, out.symbols_freq);
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < model.size(); ++k) {
                num += (out.received[k] - model[k]).squaredNorm();
                den += model[k].squaredNorm();
            }
            worst = std::max(worst, std::sqrt(num / den));
        }
    }
    o.require(worst <= 1e-9, "relative error above 1e-9");
    o.detail << "max relative error " << worst << " over 20 instances";
}

// --- Bussgang -----------------------------------------------------------------

void bussgang(Outcome& o)
{
    auto cfg = default_config();
    Rng rng = Rng::stream(cfg.rng_seed, {0});
    const auto ch = generate_channel(cfg, rng);
    const int blocks = static_cast<int>(std::ceil(1e6 / cfg.num_bins));
    for (int b = 1; b <= 4; ++b) {
        cfg.adc = AdcResolution::bits(b);
        const auto t = design_transceiver(ch, cfg, Scheme::proposed_ttd);
        Rng mc = Rng::stream(cfg.rng_seed, {1, static_cast<std::uint64_t>(b)});
        const auto est = bussgang_monte_carlo(ch, t.precoders, t.combiner, cfg, blocks, mc);
        double worst = 0.0;
        for (Eigen::Index c = 0; c < est.error_variance.size(); ++c)
            worst = std::max(worst, std::abs(est.error_variance(c) / est.predicted_variance(c) - 1.0));
        o.require(worst <= 0.05, std::to_string(b) + "-bit variance off by more than 5%");
        o.require(est.max_abs_correlation < 0.01, std::to_string(b) + "-bit correlation above 0.01");
        o.detail << (b > 1 ? "; " : "") << b << "-bit: max var dev " << 100.0 * worst << "%, max |corr| "
                 << est.max_abs_correlation;
    }
    o.detail << " (" << blocks * cfg.num_bins << " samples per chain)";
}

// --- Lloyd-Max ----------------------------------------------------------------

void lloyd_max(Outcome& o)
{
    const double rho1 = distortion_factor(AdcResolution::bits(1));
    const double err = std::abs(rho1 - (1.0 - 2.0 / M_PI));
    o.require(err <= 1e-6, "rho(1) off");
    for (int b = 1; b < AdcResolution::max_bits; ++b)
        o.require(distortion_factor(AdcResolution::bits(b + 1)) < distortion_factor(AdcResolution::bits(b)),
                  "rho not strictly decreasing at b=" + std::to_string(b));
    o.detail << "|rho(1) - (1 - 2/pi)| = " << err << ", rho(1.." << AdcResolution::max_bits << ") decreasing";
}

// --- algorithm fixtures -----------------------------------------------------------

void algorithms(Outcome& o)
{
    Rng rng(31);
    const double fc = 1e12;
    int combiner_ok = 0, somp_ok = 0;
    double worst_res = 0.0;
    const auto sub = build_dictionary(3, 4, fc);
    for (int t = 0; t < 50; ++t) {
        std::vector<CMatrix> w_opt{test::random_matrix(6, 2, rng), test::random_matrix(6, 2, rng)};
        CMatrix target(6, 4);
        target << w_opt[0], w_opt[1];
        const auto c = spatially_sparse_combiner(w_opt, sub, 2, 0.8);
        const auto ref = test::sequential_oracle(target, sub.atoms, 2);
        if (c.selected_indices == ref.picks && test::rel_err(c.rf, ref.rf) < 1e-12)
            ++combiner_ok;
    }
    const auto dict = build_dictionary(6, 6, fc);
    for (int t = 0; t < 50; ++t) {
        const CMatrix f = test::random_matrix(6, 2, rng);
        const auto p = somp_precoder(f, dict, 2);
        const auto ref = test::greedy_somp(f, dict.atoms, 2);
        const double d = std::abs(p.residual - ref.residuals.back());
        worst_res = std::max(worst_res, d);
        if (p.selected_indices == ref.picks && d <= 1e-12)
            ++somp_ok;
    }
    o.require(combiner_ok == 50, "combiner disagrees with the sequential oracle");
    o.require(somp_ok == 50, "SOMP disagrees with the greedy reference");
    o.detail << "combiner " << combiner_ok << "/50, SOMP " << somp_ok << "/50, max residual gap " << worst_res;
}

// --- pulse comparison ----------------------------------------------------------

void pulse_rows(Outcome& o)
{
    auto plan = canned_plan("fig2c", default_config());
    plan.trials = 10;
    const auto res = run_plan(plan, jobs());
    const auto table = parse_csv(result_table(plan, res).str());
    const auto scheme = table.column("scheme");
    const auto pulse = table.column("pulse_shape");
    const auto rate = table.column("rate_gbps");
    std::map<std::pair<std::string, std::string>, int> count;
    bool finite = true;
    for (const auto& row : table.rows) {
        ++count[{row[scheme], row[pulse]}];
        finite = finite && std::isfinite(std::stod(row[rate])) && std::stod(row[rate]) > 0.0;
    }
    for (const char* s : {"proposed-ttd", "stage1-only"})
        for (const char* p : {"rrc", "rect"})
            o.require(count[{s, p}] == static_cast<int>(plan.snr_db.size()),
                      std::string("missing rows for ") + s + "/" + p);
    o.require(finite, "non-finite or nonpositive rate");
    const double top = plan.snr_db.back();
    double rrc = 0.0, rect = 0.0;
    for (const auto& r : res.rates) {
        if (r.scheme == "proposed-ttd" && r.snr_db == top)
            (r.pulse_shape == PulseShape::rrc ? rrc : rect) = r.rate_bps / 1e9;
    }
    o.detail << table.rows.size() << " rows; proposed-ttd at " << top << " dB: rrc " << rrc << " Gbps, rect "
             << rect << " Gbps";
}

struct Criterion {
    const char* id;
    const char* title;
    double budget_s;  // 0 = none
    std::function<void(Outcome&)> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {"nag", "beam-split compensation (seed 7, all bins)", 10.0, beam_split},
        {"adc", "ADC-resolution gap at 10 dB", 600.0, adc_gap},
        {"ttd", "TTD gain over stage-1-only at 10 GHz", 0.0, ttd_gain},
        {"oracle", "time-domain oracle equals the per-bin model", 30.0, oracle_equivalence},
        {"bussgang", "Bussgang error variance and orthogonality", 0.0, bussgang},
        {"lloyd", "Lloyd-Max constants", 0.0, lloyd_max},
        {"algorithms", "combiner and SOMP reference fixtures", 0.0, algorithms},
        {"pulse", "RRC vs rect rate rows", 0.0, pulse_rows},
    };

    std::string only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
            only = argv[++i];
        else {
            std::fprintf(stderr, "usage: acceptance [--only <id>]\n");
            return 2;
        }
    }

    int failed = 0, ran = 0;
    for (const auto& c : all) {
        if (!only.empty() && only != c.id)
            continue;
        ++ran;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures += std::string(" [threw: ") + e.what() + "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) {
            o.pass = false;
            o.failures += " [over the " + std::to_string(c.budget_s) + " s budget]";
        }
        std::printf("%s  %-10s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                    (o.detail.str() + o.failures).c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    if (ran == 0) {
        std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
        return 2;
    }
    return failed == 0 ? 0 : 1;
}
