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

#include "thz/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include "thz/errors.hpp"
#include "thz/quantization.hpp"
#include "thz/stage1.hpp"
#include "thz/stage2.hpp"

namespace thz {

using nlohmann::json;

namespace {

const std::vector<double> snr_grid = {-10, -5, 0, 5, 10, 15, 20, 25, 30};

template <typename T, typename F>
std::vector<T> parse_list(const json& j, const char* key, F convert)
{
    std::vector<T> out;
    if (!j.contains(key))
        return out;
    const auto& v = j.at(key);
    if (!v.is_array() || v.empty())
        throw PlanError(std::string("'") + key + "' must be a nonempty list");
    for (const auto& item : v) {
        try {
            out.push_back(convert(item));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw PlanError(std::string("bad entry in '") + key + "': " + e.what());
        }
    }
    return out;
}

AdcResolution adc_from_json(const json& v)
{
    if (v.is_string())
        return AdcResolution::parse(v.get<std::string>());
    return AdcResolution::bits(v.get<int>());
}

std::string pulse_label(PulseShape p)
{
    return to_string(p);
}

// Points of a rate sweep in output order.
struct RateKey {
    Scheme scheme;
    PulseShape pulse;
    double bandwidth;
    double snr;
    AdcResolution adc;
};

SystemConfig point_config(const SystemConfig& base, PulseShape pulse, double bandwidth, double snr,
                          AdcResolution adc)
{
    SystemConfig c = base;
    c.pulse_shape = pulse;
    c.bandwidth_hz = bandwidth;
    c.noise_variance = noise_variance_from_snr_db(snr);
    c.adc = adc;
    return validate(c);
}

void run_parallel(std::size_t tasks, int jobs, const std::function<void(std::size_t)>& body)
{
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks || failed)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(tasks)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (error)
        std::rethrow_exception(error);
}

std::string describe(const std::exception& e)
{
    return e.what();
}

[[noreturn]] void rethrow_annotated(const std::string& where)
{
    try {
        throw;
    } catch (const Error& e) {
        throw Error(e.kind(), describe(e) + " (" + where + ")");
    } catch (const std::exception& e) {
        throw Error("RuntimeError", describe(e) + " (" + where + ")");
    }
}

ExperimentResult run_rate_plan(const ExperimentPlan& plan, int jobs)
{
    const SystemConfig& base = plan.base;
    const auto pulses = plan.pulse_shapes.empty() ? std::vector<PulseShape>{base.pulse_shape} : plan.pulse_shapes;
    const auto bands = plan.bandwidths_hz.empty() ? std::vector<double>{base.bandwidth_hz} : plan.bandwidths_hz;
    const auto snrs = plan.snr_db.empty() ? std::vector<double>{base.snr_db()} : plan.snr_db;
    const auto adcs = plan.adc.empty() ? std::vector<AdcResolution>{base.adc} : plan.adc;
    const auto schemes = plan.schemes.empty() ? std::vector<Scheme>{Scheme::proposed_ttd} : plan.schemes;

    std::vector<RateKey> keys;
    for (Scheme s : schemes)
        for (PulseShape p : pulses)
            for (double b : bands)
                for (double snr : snrs) {
                    if (s == Scheme::fully_digital) {
                        keys.push_back({s, p, b, snr, AdcResolution::ideal()});
                        continue;
                    }
                    for (AdcResolution a : adcs)
                        keys.push_back({s, p, b, snr, a});
                }
    std::map<std::tuple<int, int, std::size_t, std::size_t, int>, std::size_t> index;
    auto key_of = [&](Scheme s, std::size_t p, std::size_t b, std::size_t snr, AdcResolution a) {
        return std::make_tuple(static_cast<int>(s), static_cast<int>(p), b, snr,
                               a.is_ideal() ? 0 : a.bit_count());
    };
    {
        std::size_t i = 0;
        for (Scheme s : schemes)
            for (std::size_t p = 0; p < pulses.size(); ++p)
                for (std::size_t b = 0; b < bands.size(); ++b)
                    for (std::size_t n = 0; n < snrs.size(); ++n) {
                        if (s == Scheme::fully_digital) {
                            index[key_of(s, p, b, n, AdcResolution::ideal())] = i++;
                            continue;
                        }
                        for (AdcResolution a : adcs)
                            index[key_of(s, p, b, n, a)] = i++;
                    }
    }

    const auto trials = static_cast<std::size_t>(plan.trials);
    std::vector<std::vector<double>> values(keys.size(), std::vector<double>(trials, 0.0));

    // one task per (pulse, bandwidth, trial); the channel and stage-1
    // precoders are shared by every SNR, resolution and scheme of the task
    const std::size_t tasks = pulses.size() * bands.size() * trials;
    run_parallel(tasks, jobs, [&](std::size_t task) {
        const std::size_t t = task % trials;
        const std::size_t b = (task / trials) % bands.size();
        const std::size_t p = task / (trials * bands.size());
        try {
            const SystemConfig chan_cfg = point_config(base, pulses[p], bands[b], snrs[0], adcs[0]);
            Rng rng = Rng::stream(base.rng_seed, {static_cast<std::uint64_t>(t)});
            const auto ch = generate_channel(chan_cfg, rng);
            const auto stage1 = design_precoders(ch, chan_cfg);
            for (std::size_t n = 0; n < snrs.size(); ++n) {
                for (Scheme s : schemes) {
                    if (s == Scheme::fully_digital) {
                        const auto cfg = point_config(base, pulses[p], bands[b], snrs[n], AdcResolution::ideal());
                        values[index.at(key_of(s, p, b, n, AdcResolution::ideal()))][t] =
                            fully_digital_spectral_efficiency(ch, cfg);
                        continue;
                    }
                    const auto cfg = point_config(base, pulses[p], bands[b], snrs[n], adcs[0]);
                    auto tr = design_transceiver(ch, cfg, s, stage1);
                    for (AdcResolution a : adcs) {
                        set_resolution(tr, a, cfg);
                        values[index.at(key_of(s, p, b, n, a))][t] = transceiver_spectral_efficiency(tr, cfg);
                    }
                }
            }
        } catch (...) {
            rethrow_annotated("trial " + std::to_string(t) + ", pulse " + pulse_label(pulses[p]) +
                              ", bandwidth " + csv_double(bands[b]) + " Hz");
        }
    });

    ExperimentResult res;
    res.seed = base.rng_seed;
    res.config_hash = config_hash(base);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto& k = keys[i];
        const auto& v = values[i];
        double mean = 0.0;
        for (double x : v)
            mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v)
            var += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;

        RatePoint r;
        r.scenario = plan.scenario;
        r.scheme = to_string(k.scheme);
        r.pulse_shape = k.pulse;
        r.bandwidth_hz = k.bandwidth;
        r.snr_db = k.snr;
        r.adc = k.adc;
        r.se_mean = mean;
        r.se_std = sd;
        r.rate_bps = mean * k.bandwidth;
        r.trials = plan.trials;
        res.rates.push_back(r);
        res.rate_hashes.push_back(config_hash(point_config(base, k.pulse, k.bandwidth, k.snr, k.adc)));
    }
    return res;
}

std::vector<int> nag_bins(const ExperimentPlan& plan)
{
    if (!plan.bins.empty())
        return plan.bins;
    const int k = plan.base.num_bins;
    std::vector<int> out{1, k / 2, k};
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ExperimentResult run_nag_plan(const ExperimentPlan& plan, int jobs)
{
    const SystemConfig& cfg = plan.base;
    Rng rng = Rng::stream(cfg.rng_seed, {0});
    const auto ch = generate_channel(cfg, rng);
    const auto precoders = design_precoders(ch, cfg);
    const auto combiner = design_combiner(ch, precoders, cfg, bussgang_gain(cfg.adc));

    std::vector<int> subarrays = plan.subarrays;
    if (subarrays.empty()) {
        for (int s = 0; s < cfg.bs_rf_chains; ++s)
            subarrays.push_back(s);
    }
    const auto bins1 = nag_bins(plan);
    std::vector<int> bins0;
    for (int k : bins1) {
        if (k < 1 || k > cfg.num_bins)
            throw PlanError("NAG bin " + std::to_string(k) + " outside 1.." + std::to_string(cfg.num_bins));
        bins0.push_back(k - 1);
    }
    std::vector<double> dirs;
    for (int i = 0; i < plan.directions; ++i)
        dirs.push_back(plan.directions == 1 ? 0.0 : -1.0 + 2.0 * i / (plan.directions - 1));

    std::vector<std::vector<NagRow>> parts(subarrays.size());
    run_parallel(subarrays.size(), jobs, [&](std::size_t i) {
        const int s = subarrays[i];
        if (s < 0 || s >= cfg.bs_rf_chains)
            throw PlanError("subarray " + std::to_string(s) + " does not exist");
        const int n = cfg.bs_antennas_per_subarray;
        const CVector beam = combiner.rf.block(s * n, s, n, 1);
        const double steer = combiner.selected_sines[static_cast<std::size_t>(s)];
        for (bool comp : {false, true}) {
            for (const auto& smp : nag_sweep(beam, steer, comp, dirs, bins0, cfg))
                parts[i].push_back({s, comp, smp.bin + 1, smp.frequency_hz, smp.direction_sin, smp.nag});
        }
    });

    ExperimentResult res;
    res.seed = cfg.rng_seed;
    res.config_hash = config_hash(cfg);
    for (auto& p : parts)
        res.nag.insert(res.nag.end(), p.begin(), p.end());
    return res;
}

} // namespace

ExperimentPlan parse_plan(const json& j, const SystemConfig& base)
{
    if (!j.is_object())
        throw PlanError("plan must be a JSON object");
    static const std::set<std::string> keys = {
        "scenario", "kind",   "config", "set",    "snr_db",     "adc_bits", "pulse_shapes", "bandwidths_hz",
        "schemes",  "trials", "seed",   "output", "directions", "subarrays", "bins"};
    for (const auto& [k, v] : j.items()) {
        if (!keys.count(k))
            throw PlanError("unknown plan key '" + k + "'");
    }

    ExperimentPlan p;
    try {
        SystemConfig cfg = base;
        if (j.contains("config"))
            from_json(j.at("config"), cfg);
        if (j.contains("set"))
            cfg = apply_overrides(cfg, j.at("set").get<std::vector<std::string>>());
        if (j.contains("seed"))
            cfg.rng_seed = j.at("seed").get<std::uint64_t>();
        p.base = validate(cfg);

        p.scenario = j.value("scenario", std::string("custom"));
        const std::string kind = j.value("kind", std::string("rate"));
        if (kind == "rate")
            p.kind = PlanKind::rate;
        else if (kind == "nag")
            p.kind = PlanKind::nag;
        else
            throw PlanError("plan kind must be 'rate' or 'nag'");

        p.snr_db = parse_list<double>(j, "snr_db", [](const json& v) { return v.get<double>(); });
        p.adc = parse_list<AdcResolution>(j, "adc_bits", adc_from_json);
        p.pulse_shapes = parse_list<PulseShape>(
            j, "pulse_shapes", [](const json& v) { return parse_pulse_shape(v.get<std::string>()); });
        p.bandwidths_hz = parse_list<double>(j, "bandwidths_hz", [](const json& v) { return v.get<double>(); });
        p.schemes = parse_list<Scheme>(j, "schemes", [](const json& v) { return parse_scheme(v.get<std::string>()); });
        p.subarrays = parse_list<int>(j, "subarrays", [](const json& v) { return v.get<int>(); });
        p.bins = parse_list<int>(j, "bins", [](const json& v) { return v.get<int>(); });
        p.trials = j.value("trials", 100);
        p.directions = j.value("directions", 1024);
        p.output = j.value("output", p.scenario + ".csv");
    } catch (const json::exception& e) {
        throw PlanError(std::string("malformed plan: ") + e.what());
    }
    if (p.trials < 1)
        throw PlanError("trials must be positive");
    if (p.directions < 1)
        throw PlanError("directions must be positive");
    for (double b : p.bandwidths_hz) {
        if (!(b > 0.0))
            throw PlanError("bandwidths must be positive");
    }
    return p;
}

ExperimentPlan load_plan(const std::string& path, const SystemConfig& base)
{
    std::ifstream in(path);
    if (!in)
        throw PlanError("cannot open plan '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw PlanError("plan '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_plan(j, base);
}

ExperimentPlan canned_plan(const std::string& name, const SystemConfig& base)
{
    ExperimentPlan p;
    p.scenario = name;
    p.base = validate(base);
    p.output = name + ".csv";
    if (name == "fig2a") {
        p.kind = PlanKind::nag;
        p.trials = 1;
        return p;
    }
    p.kind = PlanKind::rate;
    p.snr_db = snr_grid;
    if (name == "fig2b") {
        p.schemes = {Scheme::proposed_ttd, Scheme::stage1_only, Scheme::stage1_somp, Scheme::fully_digital};
    } else if (name == "fig2c") {
        p.schemes = {Scheme::proposed_ttd, Scheme::stage1_only};
        p.pulse_shapes = {PulseShape::rrc, PulseShape::rect};
    } else if (name == "fig2d") {
        p.schemes = {Scheme::proposed_ttd};
        p.adc = {AdcResolution::bits(1), AdcResolution::bits(2), AdcResolution::bits(3), AdcResolution::bits(4),
                 AdcResolution::ideal()};
    } else {
        throw PlanError("unknown canned plan '" + name + "'");
    }
    return p;
}

ExperimentResult run_plan(const ExperimentPlan& plan, int jobs)
{
    if (jobs < 1)
        throw PlanError("jobs must be positive");
    return plan.kind == PlanKind::nag ? run_nag_plan(plan, jobs) : run_rate_plan(plan, jobs);
}

CsvWriter rate_table(const ExperimentResult& result)
{
    CsvWriter w({"scenario", "scheme", "pulse_shape", "bandwidth_hz", "snr_dB", "bits", "se_mean", "se_std",
                 "rate_gbps", "trials", "seed", "config_hash"});
    for (std::size_t i = 0; i < result.rates.size(); ++i) {
        const auto& r = result.rates[i];
        w.row({r.scenario, r.scheme, to_string(r.pulse_shape), csv_double(r.bandwidth_hz), csv_double(r.snr_db),
               r.adc.to_string(), csv_double(r.se_mean), csv_double(r.se_std), csv_double(r.rate_bps / 1e9),
               csv_int(r.trials), std::to_string(result.seed), result.rate_hashes[i]});
    }
    return w;
}

CsvWriter nag_table(const ExperimentResult& result)
{
    CsvWriter w({"subarray", "beam", "k", "frequency_hz", "direction_sin", "direction_rad", "nag", "config_hash"});
    for (const auto& r : result.nag) {
        w.row({csv_int(r.subarray), r.compensated ? "compensated" : "uncompensated", csv_int(r.k),
               csv_double(r.frequency_hz), csv_double(r.direction_sin), csv_double(std::asin(r.direction_sin)),
               csv_double(r.nag), result.config_hash});
    }
    return w;
}

CsvWriter result_table(const ExperimentPlan& plan, const ExperimentResult& result)
{
    return plan.kind == PlanKind::nag ? nag_table(result) : rate_table(result);
}

CsvWriter delay_table(const SystemConfig& raw)
{
    const SystemConfig cfg = validate(raw);
    Rng rng = Rng::stream(cfg.rng_seed, {0});
    const auto ch = generate_channel(cfg, rng);
    const auto precoders = design_precoders(ch, cfg);
    const auto combiner = design_combiner(ch, precoders, cfg, bussgang_gain(cfg.adc));

    CsvWriter w({"side", "user", "chain", "theta_sin", "m", "delay_s"});
    auto emit = [&](const char* side, const std::string& user, int chain, double theta, int antennas) {
        const auto net = TtdNetwork::make(theta, antennas, cfg.ttd_per_chain, cfg.carrier_frequency_hz);
        for (std::size_t m = 0; m < net.delays.size(); ++m)
            w.row({side, user, csv_int(chain), csv_double(theta), csv_int(static_cast<long long>(m) + 1),
                   csv_double(net.delays[m])});
    };
    for (std::size_t u = 0; u < precoders.size(); ++u) {
        for (std::size_t l = 0; l < precoders[u].selected_sines.size(); ++l)
            emit("tx", std::to_string(u), static_cast<int>(l), precoders[u].selected_sines[l],
                 cfg.tx_antennas_per_user);
    }
    for (std::size_t s = 0; s < combiner.selected_sines.size(); ++s)
        emit("rx", "", static_cast<int>(s), combiner.selected_sines[s], cfg.bs_antennas_per_subarray);
    return w;
}

CsvWriter codebook_table(int bits)
{
    const auto& cb = lloyd_max_codebook(bits);
    CsvWriter w({"index", "low", "high", "level"});
    for (std::size_t i = 0; i < cb.levels.size(); ++i) {
        const double lo = i == 0 ? -INFINITY : cb.thresholds[i - 1];
        const double hi = i + 1 == cb.levels.size() ? INFINITY : cb.thresholds[i];
        w.row({csv_int(static_cast<long long>(i)), csv_double(lo), csv_double(hi), csv_double(cb.levels[i])});
    }
    return w;
}

std::optional<std::string> timestamp_comment(bool enabled)
{
    if (!enabled)
        return std::nullopt;
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return std::string("generated ") + buf + " by " + version_string;
}

} // namespace thz
