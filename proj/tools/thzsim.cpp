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
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thz/channel.hpp"
#include "thz/config.hpp"
#include "thz/errors.hpp"
#include "thz/harness.hpp"

namespace {

constexpr int exit_runtime = 1;
constexpr int exit_usage = 2;

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    std::string out;
    bool no_timestamp = false;

    std::string plan_path;
    int codebook_bits = 3;
};

void report(const std::string& kind, const std::string& message)
{
    nlohmann::json j{{"error", kind}, {"message", message}};
    std::cerr << j.dump() << '\n';
}

// config errors and bad plans are the caller's fault
bool is_usage_error(const std::string& kind)
{
    return kind == "PlanError" || kind == "ConfigParseError";
}

thz::SystemConfig base_config(const Options& o)
{
    thz::SystemConfig cfg = o.config_path.empty() ? thz::default_config() : thz::load_config(o.config_path);
    if (!o.overrides.empty())
        cfg = thz::apply_overrides(cfg, o.overrides);
    if (o.seed)
        cfg.rng_seed = *o.seed;
    return thz::validate(cfg);
}

int jobs_of(const Options& o)
{
    if (o.jobs > 0)
        return o.jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

void run_experiment(thz::ExperimentPlan plan, const Options& o)
{
    if (o.trials)
        plan.trials = *o.trials;
    if (plan.trials < 1)
        throw thz::PlanError("trials must be positive");
    if (!o.out.empty())
        plan.output = o.out;
    const auto result = thz::run_plan(plan, jobs_of(o));
    const auto table = thz::result_table(plan, result);
    table.write_file(plan.output, thz::timestamp_comment(!o.no_timestamp));
    std::printf("%s: %zu rows -> %s\n", plan.scenario.c_str(), table.size(), plan.output.c_str());
}

void add_common(CLI::App& app, Options& o)
{
    app.add_option("--config", o.config_path, "JSON config file (defaults to the built-in scenario)");
    app.add_option("--set", o.overrides, "Config override key=value (repeatable)");
    app.add_option("--trials", o.trials, "Channel realizations per point");
    app.add_option("--seed", o.seed, "Master RNG seed");
    app.add_option("--jobs", o.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", o.out, "Output file (or prefix for dump-channel)");
    app.add_flag("--no-timestamp", o.no_timestamp, "Omit the generated-at comment line");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"THz wideband MU-MIMO uplink simulator"};
    app.set_version_flag("--version", thz::version_string);
    app.require_subcommand(1);
    Options o;
    add_common(app, o);

    auto* run = app.add_subcommand("run", "Run an experiment plan (JSON)");
    run->add_option("plan", o.plan_path, "Plan file")->required();
    std::vector<CLI::App*> figures;
    for (const char* name : {"fig2a", "fig2b", "fig2c", "fig2d"})
        figures.push_back(app.add_subcommand(name, std::string("Canned experiment ") + name));
    auto* dump_channel = app.add_subcommand("dump-channel", "Write one channel realization (trial 0)");
    auto* dump_delays = app.add_subcommand("dump-delays", "Write the TTD delays of one realization");
    auto* dump_codebook = app.add_subcommand("dump-codebook", "Write the Lloyd-Max codebook for b bits");
    dump_codebook->add_option("bits", o.codebook_bits, "ADC bits")->required();

    for (auto* sub : app.get_subcommands({}))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report("UsageError", e.what());
        return exit_usage;
    }

    try {
        if (run->parsed()) {
            const auto base = base_config(o);
            run_experiment(thz::load_plan(o.plan_path, base), o);
        } else if (dump_channel->parsed()) {
            const auto cfg = base_config(o);
            thz::Rng rng = thz::Rng::stream(cfg.rng_seed, {0});
            const auto ch = thz::generate_channel(cfg, rng);
            const std::string prefix = o.out.empty() ? "channel" : o.out;
            thz::dump_channel(ch, cfg, prefix);
            std::printf("channel -> %s.paths.csv, %s.bin\n", prefix.c_str(), prefix.c_str());
        } else if (dump_delays->parsed()) {
            const auto table = thz::delay_table(base_config(o));
            const std::string path = o.out.empty() ? "delays.csv" : o.out;
            table.write_file(path, thz::timestamp_comment(!o.no_timestamp));
            std::printf("delays: %zu rows -> %s\n", table.size(), path.c_str());
        } else if (dump_codebook->parsed()) {
            const auto table = thz::codebook_table(o.codebook_bits);
            const std::string path =
                o.out.empty() ? "codebook_b" + std::to_string(o.codebook_bits) + ".csv" : o.out;
            table.write_file(path, thz::timestamp_comment(!o.no_timestamp));
            std::printf("codebook: %zu levels -> %s\n", table.size(), path.c_str());
        } else {
            for (auto* fig : figures) {
                if (fig->parsed())
                    run_experiment(thz::canned_plan(fig->get_name(), base_config(o)), o);
            }
        }
    } catch (const thz::Error& e) {
        report(e.kind(), e.what());
        return is_usage_error(e.kind()) ? exit_usage : exit_runtime;
    } catch (const std::exception& e) {
        report("RuntimeError", e.what());
        return exit_runtime;
    }
    return 0;
}
