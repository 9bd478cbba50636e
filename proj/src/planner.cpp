#include "uavdc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "uavdc/errors.hpp"
#include "uavdc/rng.hpp"

namespace uavdc {

namespace {

void ensure_reachable(const Scenario& scenario, const DistanceMatrix& dm) {
    for (const UavSpec& uav : scenario.uavs) {
        const double direct = route_duration({}, uav, scenario, dm).return_time;
        if (energy_used(uav, direct) > uav.battery_s)
            throw InfeasibleScenarioError(uav.id, energy_used(uav, direct), uav.battery_s);
    }
}

double priority_sum(const std::vector<int>& ids, const Scenario& scenario) {
    double s = 0.0;
    for (const int id : ids) s += scenario.sensor(id).priority;
    return s;
}

/// Fitness of one UAV over a fixed sensor set, decoded from random keys.
struct RouteObjective {
    const Scenario& scenario;
    const DistanceMatrix& dm;
    const UavSpec& uav;
    std::vector<int> sensors;  // ascending ids
    PlanMode mode;
    CostWeights weights;

    struct Decoded {
        Truncation truncation;
        double return_time = 0.0;
        double cost = 0.0;
    };

    Decoded decode(std::span<const double> keys) const {
        Decoded d;
        d.truncation = truncate_to_budget(decode_keys(keys, sensors), uav, scenario, dm);
        d.return_time = route_duration(d.truncation.feasible_order, uav, scenario, dm).return_time;
        d.cost = uav_cost(uav, d.return_time, priority_sum(d.truncation.abandoned, scenario), mode, weights);
        return d;
    }

    double operator()(std::span<const double> keys) const { return decode(keys).cost; }
};

struct RouteSearch {
    std::vector<int> order;
    std::vector<int> abandoned;
    double cost = 0.0;
    UavTrace trace;
};

RouteSearch evolve_route(const RouteObjective& objective, const DeConfig& base, std::uint64_t seed, int generations,
                         const std::string& stage, const Population& seeds = {}) {
    DeConfig de = base;
    de.seed = seed;
    de.max_generations = generations;
    de.snapshot_interval = 1;
    const FitnessFn fitness = [&objective](std::span<const double> keys) { return objective(keys); };
    const OptimizeResult result = optimize(fitness, de, objective.sensors.size(), seeds);

    RouteSearch out;
    const auto best = objective.decode(result.best);
    out.order = best.truncation.feasible_order;
    out.abandoned = best.truncation.abandoned;
    out.cost = best.cost;
    out.trace.uav_id = objective.uav.id;
    out.trace.stage = stage;
    for (std::size_t g = 0; g < result.trace.generations.size(); ++g) {
        const GenerationRecord& rec = result.trace.generations[g];
        const auto snap = objective.decode(result.trace.snapshots.at(g).second);
        out.trace.rows.push_back({rec.generation, rec.best_fitness, rec.mean_fitness,
                                  time_violation(objective.uav, snap.return_time),
                                  time_difference(objective.uav, snap.return_time)});
    }
    return out;
}

/// Keys that decode back to `order` over the ascending id set `sensors`.
Genome encode_order(const std::vector<int>& order, const std::vector<int>& sensors) {
    Genome keys(sensors.size(), 0.0);
    const double denom = order.size() > 1 ? static_cast<double>(order.size() - 1) : 1.0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const auto it = std::lower_bound(sensors.begin(), sensors.end(), order[rank]);
        keys[static_cast<std::size_t>(it - sensors.begin())] = static_cast<double>(rank) / denom;
    }
    return keys;
}

void finalize(PlanResult& result, const Scenario& scenario, const DistanceMatrix& dm, const CostWeights& weights) {
    std::sort(result.plan.abandoned.begin(), result.plan.abandoned.end());
    check_plan(result.plan, scenario);
    result.metrics = plan_metrics(result.plan, scenario, dm, weights);
    result.cost = mission_cost(result.plan, scenario, dm, weights);
}

PlanResult collaborate(PlanResult stage, const Scenario& scenario, const DistanceMatrix& dm,
                       const PlannerConfig& config) {
    PlanResult result = std::move(stage);
    result.plan.mode = PlanMode::Collaborative;
    const ReassignOptions options{config.append_only};

    for (int round = 1; round <= config.reassign_rounds; ++round) {
        const Plan before = result.plan;
        result.plan = reassign_abandoned(std::move(result.plan), scenario, dm, options);
        if (result.plan.abandoned.size() == before.abandoned.size()) break;
        if (!config.polish) continue;

        for (std::size_t i = 0; i < result.plan.routes.size(); ++i) {
            Route& route = result.plan.routes[i];
            if (route.visit_order == before.routes[i].visit_order || route.visit_order.size() < 2) continue;
            const UavSpec& uav = scenario.uav(route.uav_id);
            std::vector<int> sensors = route.visit_order;
            std::sort(sensors.begin(), sensors.end());
            const RouteObjective objective{scenario, dm, uav, sensors, PlanMode::Collaborative, config.weights};
            const double current = uav_cost(uav, route.return_time, 0.0, PlanMode::Collaborative, config.weights);
            RouteSearch polished = evolve_route(
                objective, config.de,
                derive_seed(config.seed, "polish", static_cast<std::uint64_t>(round) * 1000 + static_cast<std::uint64_t>(route.uav_id)),
                config.de.max_generations / 2, "polish-" + std::to_string(round),
                Population{encode_order(route.visit_order, sensors)});
            // Only reorderings that keep every sensor are taken.
            if (polished.abandoned.empty() && polished.cost < current)
                route = make_route(route.uav_id, std::move(polished.order), scenario, dm);
            result.traces.push_back(std::move(polished.trace));
        }
    }
    finalize(result, scenario, dm, config.weights);
    return result;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

void PlannerConfig::validate() const {
    de.validate();
    weights.validate();
    if (cluster_restarts < 1) throw ConfigError("cluster_restarts must be at least 1");
    if (reassign_rounds < 0) throw ConfigError("reassign_rounds must be non-negative");
}

std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost) {
    // Shortest augmenting path Hungarian method, rows <= cols, 1-based internals.
    const std::size_t rows = cost.size();
    if (rows == 0) return {};
    const std::size_t cols = cost[0].size();
    if (rows > cols) throw ValidationError("cost", "assignment needs rows <= cols");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
    std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
    for (std::size_t i = 1; i <= rows; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(cols + 1, inf);
        std::vector<char> used(cols + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> column_of(rows, 0);
    for (std::size_t j = 1; j <= cols; ++j)
        if (p[j] != 0) column_of[p[j] - 1] = j - 1;
    return column_of;
}

std::vector<int> match_clusters_to_uavs(const std::vector<Point>& centroids, const Scenario& scenario) {
    std::vector<std::vector<double>> cost(centroids.size(), std::vector<double>(scenario.uavs.size()));
    for (std::size_t c = 0; c < centroids.size(); ++c)
        for (std::size_t u = 0; u < scenario.uavs.size(); ++u) cost[c][u] = distance(centroids[c], scenario.uavs[u].start);
    std::vector<int> out;
    for (const std::size_t col : solve_assignment(cost)) out.push_back(scenario.uavs[col].id);
    return out;
}

PlanResult plan_non_collaborative(const Scenario& scenario, const PlannerConfig& config) {
    validate(scenario);
    config.validate();
    const DistanceMatrix dm(scenario);
    ensure_reachable(scenario, dm);

    const std::size_t n = scenario.sensors.size();
    const std::size_t q = scenario.uavs.size();
    const int k = static_cast<int>(std::min(n, q));

    PlanResult result;
    ClusteringOptions copts;
    copts.restarts = config.cluster_restarts;
    copts.seed = derive_seed(config.seed, "clustering");
    copts.threads = config.threads;
    result.clusters = run_clustering(scenario, dm, k, copts).best;
    result.cluster_uav = match_clusters_to_uavs(cluster_centroids(result.clusters, scenario), scenario);

    std::vector<std::vector<int>> members(q);
    result.plan.owner.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        const int uav_id = result.cluster_uav[static_cast<std::size_t>(result.clusters.labels[j] - 1)];
        members[static_cast<std::size_t>(uav_id - 1)].push_back(static_cast<int>(j) + 1);
        result.plan.owner[j] = uav_id;
    }

    DeConfig de = config.de;
    de.threads = config.threads;
    result.plan.mode = PlanMode::NonCollaborative;
    result.plan.seed = config.seed;
    for (std::size_t i = 0; i < q; ++i) {
        const UavSpec& uav = scenario.uavs[i];
        if (members[i].empty()) {
            result.plan.routes.push_back(make_route(uav.id, {}, scenario, dm));
            continue;
        }
        const RouteObjective objective{scenario, dm, uav, members[i], PlanMode::NonCollaborative, config.weights};
        RouteSearch search = evolve_route(objective, de, derive_seed(config.seed, "de", static_cast<std::uint64_t>(uav.id)),
                                          de.max_generations, "cluster");
        result.plan.routes.push_back(make_route(uav.id, std::move(search.order), scenario, dm));
        result.plan.abandoned.insert(result.plan.abandoned.end(), search.abandoned.begin(), search.abandoned.end());
        result.traces.push_back(std::move(search.trace));
    }
    finalize(result, scenario, dm, config.weights);
    return result;
}

PlanResult plan_collaborative(const Scenario& scenario, const PlannerConfig& config) {
    PlanResult stage = plan_non_collaborative(scenario, config);
    const DistanceMatrix dm(scenario);
    PlannerConfig inner = config;
    inner.de.threads = config.threads;
    return collaborate(std::move(stage), scenario, dm, inner);
}

PlanResult plan_mission(const Scenario& scenario, const PlannerConfig& config) {
    return config.mode == PlanMode::Collaborative ? plan_collaborative(scenario, config)
                                                  : plan_non_collaborative(scenario, config);
}

Plan reassign_abandoned(Plan plan, const Scenario& scenario, const DistanceMatrix& dm, const ReassignOptions& options) {
    struct Candidate {
        std::size_t route = 0;
        int sensor = 0;
        std::size_t position = 0;
        double added = 0.0;
    };

    const auto node_at = [&](const Route& r, std::size_t pos) {
        // pos 0 is the start, pos m+1 the end, pos k the (k-1)th sensor.
        if (pos == 0) return dm.start_node(r.uav_id);
        if (pos > r.visit_order.size()) return dm.end_node();
        return dm.sensor_node(r.visit_order[pos - 1]);
    };

    while (!plan.abandoned.empty()) {
        std::vector<Candidate> candidates;
        for (std::size_t ri = 0; ri < plan.routes.size(); ++ri) {
            const Route& route = plan.routes[ri];
            const UavSpec& uav = scenario.uav(route.uav_id);
            if (route.failed || energy_used(uav, route.return_time) > uav.battery_s) continue;

            // Abandoned sensors by distance to the nearest node of this route.
            std::vector<std::pair<double, int>> nearest;
            for (const int id : plan.abandoned) {
                const std::size_t s = dm.sensor_node(id);
                double d = std::min(dm(s, dm.start_node(route.uav_id)), dm(s, dm.end_node()));
                for (const int v : route.visit_order) d = std::min(d, dm(s, dm.sensor_node(v)));
                nearest.emplace_back(d, id);
            }
            std::sort(nearest.begin(), nearest.end());

            const std::size_t m = route.visit_order.size();
            for (const auto& [d, id] : nearest) {
                const std::size_t s = dm.sensor_node(id);
                std::vector<std::pair<double, std::size_t>> positions;
                for (std::size_t pos = options.append_only ? m : 0; pos <= m; ++pos) {
                    const std::size_t a = node_at(route, pos);
                    const std::size_t b = node_at(route, pos + 1);
                    positions.emplace_back((dm(a, s) + dm(s, b) - dm(a, b)) / uav.speed_mps + scenario.dwell_s, pos);
                }
                std::sort(positions.begin(), positions.end());
                // The cheapest position decides feasibility; later ones only
                // matter when rounding puts the exact recount over budget.
                bool taken = false;
                for (const auto& [added, pos] : positions) {
                    std::vector<int> order = route.visit_order;
                    order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), id);
                    if (energy_used(uav, route_duration(order, uav, scenario, dm).return_time) <= uav.battery_s) {
                        candidates.push_back({ri, id, pos, added});
                        taken = true;
                        break;
                    }
                }
                if (taken) break;
            }
        }
        if (candidates.empty()) break;

        const auto pick = std::min_element(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
            if (a.added != b.added) return a.added < b.added;
            return a.route < b.route;
        });
        Route& route = plan.routes[pick->route];
        std::vector<int> order = route.visit_order;
        order.insert(order.begin() + static_cast<std::ptrdiff_t>(pick->position), pick->sensor);
        const bool failed = route.failed;
        route = make_route(route.uav_id, std::move(order), scenario, dm);
        route.failed = failed;
        plan.abandoned.erase(std::find(plan.abandoned.begin(), plan.abandoned.end(), pick->sensor));
    }
    return plan;
}

Plan fail_uav(Plan plan, int uav_id, int completed_visits, const Scenario& scenario, const DistanceMatrix& dm) {
    if (uav_id < 1 || uav_id > static_cast<int>(plan.routes.size()))
        throw ValidationError("fail_uav", "no UAV with id " + std::to_string(uav_id));
    if (completed_visits < 0) throw ValidationError("completed_visits", "must be non-negative");
    Route& route = plan.routes[static_cast<std::size_t>(uav_id - 1)];
    const std::size_t keep = std::min(route.visit_order.size(), static_cast<std::size_t>(completed_visits));
    std::vector<int> kept(route.visit_order.begin(), route.visit_order.begin() + static_cast<std::ptrdiff_t>(keep));
    plan.abandoned.insert(plan.abandoned.end(), route.visit_order.begin() + static_cast<std::ptrdiff_t>(keep),
                          route.visit_order.end());
    std::sort(plan.abandoned.begin(), plan.abandoned.end());
    route = make_route(uav_id, std::move(kept), scenario, dm);
    route.failed = true;
    return plan;
}

std::vector<TraceRow> fleet_trace(const std::vector<UavTrace>& traces, const std::string& stage) {
    std::vector<TraceRow> rows;
    for (const UavTrace& t : traces) {
        if (t.stage != stage) continue;
        if (rows.size() < t.rows.size()) {
            const std::size_t old = rows.size();
            rows.resize(t.rows.size());
            for (std::size_t g = old; g < rows.size(); ++g) rows[g].generation = t.rows[g].generation;
        }
        for (std::size_t g = 0; g < t.rows.size(); ++g) {
            rows[g].best_cost += t.rows[g].best_cost;
            rows[g].mean_cost += t.rows[g].mean_cost;
            rows[g].violation_sum += t.rows[g].violation_sum;
            rows[g].tdiff_sum += t.rows[g].tdiff_sum;
        }
    }
    return rows;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::string out = "generation,best_cost,mean_cost,violation_sum,tdiff_sum\n";
    for (const TraceRow& r : rows)
        out += std::to_string(r.generation) + "," + fmt(r.best_cost) + "," + fmt(r.mean_cost) + "," + fmt(r.violation_sum) +
               "," + fmt(r.tdiff_sum) + "\n";
    return out;
}

ComparisonReport compare_modes(const Scenario& scenario, const PlannerConfig& config) {
    ComparisonReport report;
    report.non_collaborative = plan_non_collaborative(scenario, config);
    const DistanceMatrix dm(scenario);
    PlannerConfig inner = config;
    inner.de.threads = config.threads;
    report.collaborative = collaborate(report.non_collaborative, scenario, dm, inner);
    const double n = static_cast<double>(scenario.sensors.size());
    report.visited_ratio_non_collaborative = report.non_collaborative.metrics.fleet.visited / n;
    report.visited_ratio_collaborative = report.collaborative.metrics.fleet.visited / n;
    const double nc = report.non_collaborative.cost.total();
    report.cost_reduction = nc > 0.0 ? 1.0 - report.collaborative.cost.total() / nc : 0.0;
    return report;
}

std::string comparison_csv_header() {
    return "label,cost_nc,cost_c,cost_reduction,visited_nc,visited_c,visited_ratio_nc,visited_ratio_c,"
           "duration_nc,duration_c,tdiff_nc,tdiff_c,distance_nc,distance_c,violation_nc,violation_c\n";
}

std::string comparison_csv_row(const std::string& label, const ComparisonReport& r) {
    const UavMetrics& a = r.non_collaborative.metrics.fleet;
    const UavMetrics& b = r.collaborative.metrics.fleet;
    return label + "," + fmt(r.non_collaborative.cost.total()) + "," + fmt(r.collaborative.cost.total()) + "," +
           fmt(r.cost_reduction) + "," + std::to_string(a.visited) + "," + std::to_string(b.visited) + "," +
           fmt(r.visited_ratio_non_collaborative) + "," + fmt(r.visited_ratio_collaborative) + "," + fmt(a.duration) +
           "," + fmt(b.duration) + "," + fmt(a.time_difference) + "," + fmt(b.time_difference) + "," + fmt(a.distance) +
           "," + fmt(b.distance) + "," + fmt(a.time_violation) + "," + fmt(b.time_violation) + "\n";
}

std::string comparison_table(const ComparisonReport& r) {
    std::string out;
    char buf[256];
    const auto line = [&](const char* name, auto getter, const char* unit) {
        std::snprintf(buf, sizeof buf, "%-26s", name);
        out += buf;
        out += "\n";
        const auto& a = r.non_collaborative.metrics;
        const auto& b = r.collaborative.metrics;
        for (std::size_t i = 0; i < a.per_uav.size(); ++i) {
            std::snprintf(buf, sizeof buf, "  U%-3zu %18.2f %18.2f %s\n", i + 1, getter(a.per_uav[i]), getter(b.per_uav[i]), unit);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "  sum  %18.2f %18.2f %s\n", getter(a.fleet), getter(b.fleet), unit);
        out += buf;
    };
    std::snprintf(buf, sizeof buf, "%-26s %18s %18s\n", "", "non-collaborative", "collaborative");
    out += buf;
    line("Operation cost", [](const UavMetrics& m) { return m.cost; }, "");
    line("Operation duration", [](const UavMetrics& m) { return m.duration; }, "s");
    line("Time difference", [](const UavMetrics& m) { return m.time_difference; }, "s");
    line("Visited sensors", [](const UavMetrics& m) { return static_cast<double>(m.visited); }, "");
    line("Travelled distance", [](const UavMetrics& m) { return m.distance; }, "m");
    line("Time violation", [](const UavMetrics& m) { return m.time_violation; }, "s");
    std::snprintf(buf, sizeof buf, "visited ratio %.4f vs %.4f, cost reduction %.2f%%\n", r.visited_ratio_non_collaborative,
                  r.visited_ratio_collaborative, 100.0 * r.cost_reduction);
    out += buf;
    return out;
}

}  // namespace uavdc
