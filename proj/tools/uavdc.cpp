// uavdc: scenario generation, mission planning, mode comparison and timing.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "uavdc/clustering.hpp"
#include "uavdc/config.hpp"
#include "uavdc/errors.hpp"
#include "uavdc/planner.hpp"
#include "uavdc/report.hpp"
#include "uavdc/rng.hpp"
#include "uavdc/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Globals {
    std::uint64_t seed = 1;
    std::string config_path;
    std::string output;
    bool quiet = false;
    std::vector<std::string> argv;
};

struct GenerateFlags {
    int n = 128;
    int q = 4;
    double field = 3400.0;
    std::optional<double> field_height;
    std::optional<double> battery;
};

struct PlanFlags {
    std::string mode = "non-collaborative";
    std::string scenario;
    std::optional<int> fail_uav;
    int fail_after = 0;
    bool append_only = false;
    int threads = 1;
};

struct CompareFlags {
    std::string scenario;
    std::string seeds;
    GenerateFlags gen;
    int jobs = 1;
};

struct BenchFlags {
    std::vector<int> sizes{32, 64, 128};
    int q = 4;
    int repeats = 3;
    int threads = 1;
};

/// Collects what a run read, wrote and how long each stage took.
class Manifest {
public:
    Manifest(std::string command, const Globals& g, const uavdc::RunConfig& config) {
        doc_["command"] = std::move(command);
        doc_["argv"] = g.argv;
        doc_["config"] = uavdc::config_to_json(config);
        doc_["config_path"] = g.config_path;
        doc_["seeds"] = {{"master", g.seed}};
        doc_["inputs"] = json::object();
        doc_["outputs"] = json::object();
        doc_["timings_s"] = json::object();
    }

    json& seeds() { return doc_["seeds"]; }

    void input(const fs::path& path) {
        doc_["inputs"][path.string()] = uavdc::hex64(uavdc::fnv1a64(uavdc::read_text_file(path)));
    }

    void output(const fs::path& path, const std::string& content) {
        uavdc::write_text_file(path, content);
        doc_["outputs"][path.string()] = uavdc::hex64(uavdc::fnv1a64(content));
    }

    void timing(const std::string& stage, Clock::time_point since) {
        doc_["timings_s"][stage] = std::chrono::duration<double>(Clock::now() - since).count();
    }

    void save(const fs::path& path) const { uavdc::write_text_file(path, doc_.dump(2) + "\n"); }

private:
    json doc_;
};

uavdc::RunConfig resolve_config(const Globals& g) {
    uavdc::RunConfig config;
    if (!g.config_path.empty()) config = uavdc::load_config(g.config_path, config);
    config.planner.seed = g.seed;
    return config;
}

uavdc::Scenario generate(const GenerateFlags& f, std::uint64_t seed, uavdc::GeneratorConfig gen) {
    if (f.battery) gen.battery_s = *f.battery;
    return uavdc::generate_scenario(f.n, f.q, {f.field, f.field_height.value_or(f.field)}, seed, gen);
}

void log(const Globals& g, const std::string& text) {
    if (!g.quiet) std::cout << text << std::flush;
}

int cmd_generate(const Globals& g, const GenerateFlags& f) {
    const uavdc::RunConfig config = resolve_config(g);
    const fs::path out = g.output.empty() ? fs::path("scenario.json") : fs::path(g.output);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    Manifest manifest("generate", g, config);
    const auto t = Clock::now();
    const uavdc::Scenario scenario = generate(f, g.seed, config.generator);
    manifest.timing("generate", t);
    manifest.output(out, uavdc::serialize_scenario(scenario));
    fs::path manifest_path = out;
    manifest_path.replace_extension(".manifest.json");
    manifest.save(manifest_path);
    log(g, "wrote " + out.string() + " (" + std::to_string(scenario.sensors.size()) + " sensors, " +
               std::to_string(scenario.uavs.size()) + " UAVs)\n");
    return 0;
}

std::string uav_traces_csv(const std::vector<uavdc::UavTrace>& traces) {
    std::ostringstream out;
    out << "uav,stage,generation,best_cost,mean_cost,violation_sum,tdiff_sum\n";
    char buf[256];
    for (const auto& t : traces)
        for (const auto& r : t.rows) {
            std::snprintf(buf, sizeof buf, "%d,%s,%d,%.6f,%.6f,%.6f,%.6f\n", t.uav_id, t.stage.c_str(), r.generation,
                          r.best_cost, r.mean_cost, r.violation_sum, r.tdiff_sum);
            out << buf;
        }
    return out.str();
}

int cmd_plan(const Globals& g, const PlanFlags& f) {
    uavdc::RunConfig config = resolve_config(g);
    config.planner.mode = uavdc::parse_plan_mode(f.mode);
    if (f.append_only) config.planner.append_only = true;
    if (f.threads > 1) config.planner.threads = f.threads;
    config.planner.validate();

    const fs::path dir = g.output.empty() ? fs::path("out") : fs::path(g.output);
    fs::create_directories(dir);
    Manifest manifest("plan", g, config);
    manifest.input(f.scenario);
    manifest.seeds()["clustering"] = uavdc::derive_seed(g.seed, "clustering");

    auto t = Clock::now();
    const uavdc::Scenario scenario = uavdc::load_scenario(f.scenario);
    const uavdc::DistanceMatrix dm(scenario);
    manifest.timing("load", t);

    t = Clock::now();
    uavdc::PlanResult result = uavdc::plan_mission(scenario, config.planner);
    manifest.timing("plan", t);

    if (f.fail_uav) {
        t = Clock::now();
        uavdc::Plan failed = uavdc::fail_uav(result.plan, *f.fail_uav, f.fail_after, scenario, dm);
        result.plan = uavdc::reassign_abandoned(std::move(failed), scenario, dm, {config.planner.append_only});
        result.metrics = uavdc::plan_metrics(result.plan, scenario, dm, config.planner.weights);
        result.cost = uavdc::mission_cost(result.plan, scenario, dm, config.planner.weights);
        manifest.timing("failover", t);
    }
    uavdc::check_plan(result.plan, scenario);

    manifest.output(dir / "plan.json", uavdc::serialize_plan(result.plan));
    manifest.output(dir / "metrics.csv", uavdc::metrics_csv(result.metrics));
    manifest.output(dir / "trace.csv", uavdc::trace_csv(uavdc::fleet_trace(result.traces)));
    manifest.output(dir / "trace_uav.csv", uav_traces_csv(result.traces));
    manifest.output(dir / "plan.svg", uavdc::render_svg(result.plan, scenario));
    manifest.save(dir / "manifest.json");

    const auto& fleet = result.metrics.fleet;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: cost %.2f, visited %d/%zu, tdiff %.1f s, violation %.1f s -> %s\n",
                  uavdc::to_string(result.plan.mode).c_str(), result.cost.total(), fleet.visited,
                  scenario.sensors.size(), fleet.time_difference, fleet.time_violation, dir.string().c_str());
    log(g, buf);
    return fleet.time_violation > 0.0 ? 3 : 0;
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text, std::uint64_t fallback) {
    if (text.empty()) return {fallback};
    const std::size_t dots = text.find("..");
    try {
        if (dots == std::string::npos) return {std::stoull(text)};
        const std::uint64_t a = std::stoull(text.substr(0, dots));
        const std::uint64_t b = std::stoull(text.substr(dots + 2));
        if (b < a) throw uavdc::ValidationError("--seeds", "range end precedes start");
        std::vector<std::uint64_t> out;
        for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
        return out;
    } catch (const std::logic_error&) {
        throw uavdc::ValidationError("--seeds", "expected `a..b` or a single seed, got `" + text + "`");
    }
}

std::vector<double> split_numbers(const std::string& row) {
    std::vector<double> out;
    std::stringstream ss(row);
    std::string cell;
    std::getline(ss, cell, ',');  // label
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int cmd_compare(const Globals& g, const CompareFlags& f) {
    const uavdc::RunConfig config = resolve_config(g);
    const std::vector<std::uint64_t> seeds = parse_seed_range(f.seeds, g.seed);
    const fs::path dir = g.output.empty() ? fs::path("compare") : fs::path(g.output);
    fs::create_directories(dir);
    Manifest manifest("compare", g, config);
    manifest.seeds()["runs"] = seeds;

    std::optional<uavdc::Scenario> fixed;
    if (!f.scenario.empty()) {
        manifest.input(f.scenario);
        fixed = uavdc::load_scenario(f.scenario);
    }

    const auto t = Clock::now();
    std::vector<uavdc::ComparisonReport> reports(seeds.size());
    uavdc::detail::parallel_for(seeds.size(), f.jobs, [&](std::size_t i) {
        const uavdc::Scenario scenario = fixed ? *fixed : generate(f.gen, seeds[i], config.generator);
        uavdc::PlannerConfig pc = config.planner;
        pc.seed = seeds[i];
        reports[i] = uavdc::compare_modes(scenario, pc);
    });
    manifest.timing("compare", t);

    std::string csv = uavdc::comparison_csv_header();
    std::vector<std::vector<double>> columns;
    std::string tables;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const std::string row = uavdc::comparison_csv_row("seed-" + std::to_string(seeds[i]), reports[i]);
        csv += row;
        const std::vector<double> values = split_numbers(row);
        columns.resize(values.size());
        for (std::size_t c = 0; c < values.size(); ++c) columns[c].push_back(values[c]);
        tables += "seed " + std::to_string(seeds[i]) + "\n" + uavdc::comparison_table(reports[i]) + "\n";
    }
    std::string median_row = "median";
    char buf[64];
    for (const auto& col : columns) {
        std::snprintf(buf, sizeof buf, ",%.6f", median(col));
        median_row += buf;
    }
    csv += median_row + "\n";

    manifest.output(dir / "compare.csv", csv);
    manifest.output(dir / "compare.txt", tables);
    manifest.save(dir / "manifest.json");

    if (!g.quiet) {
        std::cout << tables;
        std::snprintf(buf, sizeof buf, "median cost reduction %.2f%% over %zu seed(s)\n", 100.0 * median(columns[2]),
                      seeds.size());
        std::cout << buf;
    }
    for (const auto& r : reports)
        if (r.non_collaborative.metrics.fleet.time_violation > 0.0 || r.collaborative.metrics.fleet.time_violation > 0.0)
            return 3;
    return 0;
}

int cmd_bench(const Globals& g, const BenchFlags& f) {
    uavdc::RunConfig config = resolve_config(g);
    if (f.threads > 1) config.planner.threads = f.threads;
    const fs::path dir = g.output.empty() ? fs::path("bench") : fs::path(g.output);
    fs::create_directories(dir);
    Manifest manifest("bench", g, config);

    std::string csv = "n,q,repeat,stage,seconds\n";
    char buf[128];
    const auto seconds = [](Clock::time_point since) {
        return std::chrono::duration<double>(Clock::now() - since).count();
    };
    const auto t_all = Clock::now();
    for (const int n : f.sizes) {
        for (int rep = 0; rep < f.repeats; ++rep) {
            const std::uint64_t seed = uavdc::derive_seed(g.seed, "bench", static_cast<std::uint64_t>(rep));
            const auto row = [&](const char* stage, double s) {
                std::snprintf(buf, sizeof buf, "%d,%d,%d,%s,%.6f\n", n, f.q, rep, stage, s);
                csv += buf;
                log(g, buf);
            };
            auto t = Clock::now();
            const uavdc::Scenario scenario = uavdc::generate_scenario(n, f.q, {3400.0, 3400.0}, seed, config.generator);
            const uavdc::DistanceMatrix dm(scenario);
            row("generate", seconds(t));

            t = Clock::now();
            (void)uavdc::cluster_sensors(scenario, dm, std::min(f.q, n), config.planner.cluster_restarts, seed);
            row("clustering", seconds(t));

            uavdc::PlannerConfig pc = config.planner;
            pc.seed = seed;
            t = Clock::now();
            const uavdc::PlanResult nc = uavdc::plan_non_collaborative(scenario, pc);
            row("plan-non-collaborative", seconds(t));

            t = Clock::now();
            (void)uavdc::plan_collaborative(scenario, pc);
            row("plan-collaborative", seconds(t));
            (void)nc;
        }
    }
    manifest.timing("bench", t_all);
    manifest.output(dir / "bench.csv", csv);
    manifest.save(dir / "manifest.json");
    return 0;
}

void add_generate_flags(CLI::App* cmd, GenerateFlags& f) {
    cmd->add_option("--n", f.n, "Number of sensors")->check(CLI::Range(1, 100000))->capture_default_str();
    cmd->add_option("--q", f.q, "Number of UAVs")->check(CLI::Range(1, 1000))->capture_default_str();
    cmd->add_option("--field", f.field, "Field width in metres")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--field-height", f.field_height, "Field height in metres (defaults to the width)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--battery", f.battery, "Battery budget per UAV in seconds")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV sensor data-collection mission planner"};
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);

    Globals g;
    g.argv.assign(argv, argv + argc);
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--config", g.config_path, "TOML or JSON config file")->check(CLI::ExistingFile);
    app.add_option("-o,--output", g.output, "Output file (generate) or directory");
    app.add_flag("--quiet", g.quiet, "Suppress progress output");

    GenerateFlags gen;
    CLI::App* generate_cmd = app.add_subcommand("generate", "Generate a random scenario file");
    add_generate_flags(generate_cmd, gen);

    PlanFlags plan;
    CLI::App* plan_cmd = app.add_subcommand("plan", "Plan a mission for one scenario");
    plan_cmd->add_option("--mode", plan.mode, "collaborative | non-collaborative")
        ->check(CLI::IsMember({"collaborative", "non-collaborative"}))
        ->capture_default_str();
    plan_cmd->add_option("--scenario", plan.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    plan_cmd->add_option("--fail-uav", plan.fail_uav, "UAV that fails after --fail-after visits")->check(CLI::PositiveNumber);
    plan_cmd->add_option("--fail-after", plan.fail_after, "Visits the failing UAV completes")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    plan_cmd->add_flag("--append-only", plan.append_only, "Reassign by appending instead of cheapest insertion");
    plan_cmd->add_option("--threads", plan.threads, "Worker threads")->check(CLI::PositiveNumber);

    CompareFlags cmp;
    CLI::App* compare_cmd = app.add_subcommand("compare", "Compare both planning modes over one or more seeds");
    compare_cmd->add_option("--scenario", cmp.scenario, "Scenario JSON file (otherwise one is generated per seed)")
        ->check(CLI::ExistingFile);
    compare_cmd->add_option("--seeds", cmp.seeds, "Seed range a..b (defaults to --seed)");
    compare_cmd->add_option("--jobs", cmp.jobs, "Seeds planned concurrently")->check(CLI::PositiveNumber);
    add_generate_flags(compare_cmd, cmp.gen);

    BenchFlags bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Time generation, clustering and planning");
    bench_cmd->add_option("--sizes", bench.sizes, "Sensor counts")->delimiter(',')->check(CLI::PositiveNumber);
    bench_cmd->add_option("--q", bench.q, "Number of UAVs")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--repeats", bench.repeats, "Repetitions per size")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--threads", bench.threads, "Worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate_cmd->parsed()) return cmd_generate(g, gen);
        if (plan_cmd->parsed()) return cmd_plan(g, plan);
        if (compare_cmd->parsed()) return cmd_compare(g, cmp);
        if (bench_cmd->parsed()) return cmd_bench(g, bench);
    } catch (const uavdc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
