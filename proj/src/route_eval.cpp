#include "uavdc/route_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "uavdc/errors.hpp"

namespace uavdc {

namespace {

void check_sensor(int id, const Scenario& scenario) {
    if (id < 1 || id > static_cast<int>(scenario.sensors.size()))
        throw ValidationError("visit_order", "unknown sensor id " + std::to_string(id));
}

}  // namespace

RouteTiming route_duration(std::span<const int> visit_order, const UavSpec& uav, const Scenario& scenario,
                           const DistanceMatrix& dm) {
    RouteTiming timing;
    timing.arrival_times.reserve(visit_order.size());
    const double v = uav.speed_mps;
    double t = scenario.takeoff_landing_s;
    std::size_t prev = dm.start_node(uav.id);
    for (const int id : visit_order) {
        check_sensor(id, scenario);
        const std::size_t node = dm.sensor_node(id);
        const double leg = dm(prev, node);
        timing.total_distance += leg;
        t += leg / v + scenario.dwell_s;
        timing.arrival_times.push_back(t);
        prev = node;
    }
    const double last = dm(prev, dm.end_node());
    timing.total_distance += last;
    timing.return_time = t + last / v + scenario.takeoff_landing_s;
    return timing;
}

Truncation truncate_to_budget(std::span<const int> visit_order, const UavSpec& uav, const Scenario& scenario,
                              const DistanceMatrix& dm) {
    const double direct = route_duration({}, uav, scenario, dm).return_time;
    if (energy_used(uav, direct) > uav.battery_s)
        throw InfeasibleScenarioError(uav.id, energy_used(uav, direct), uav.battery_s);

    Truncation result;
    const std::size_t m = visit_order.size();
    for (const int id : visit_order) check_sensor(id, scenario);

    const RouteTiming full = route_duration(visit_order, uav, scenario, dm);
    if (energy_used(uav, full.return_time) <= uav.battery_s) {
        result.feasible_order.assign(visit_order.begin(), visit_order.end());
        return result;
    }

    // Doubly linked list over positions; -1 is the start node, m the end node.
    std::vector<std::ptrdiff_t> prev(m), next(m);
    for (std::size_t k = 0; k < m; ++k) {
        prev[k] = static_cast<std::ptrdiff_t>(k) - 1;
        next[k] = static_cast<std::ptrdiff_t>(k) + 1;
    }
    std::vector<char> removed(m, 0);
    const auto node_of = [&](std::ptrdiff_t pos) -> std::size_t {
        if (pos < 0) return dm.start_node(uav.id);
        if (pos >= static_cast<std::ptrdiff_t>(m)) return dm.end_node();
        return dm.sensor_node(visit_order[static_cast<std::size_t>(pos)]);
    };
    const auto detour = [&](std::size_t pos) {
        const std::size_t a = node_of(prev[pos]);
        const std::size_t b = node_of(static_cast<std::ptrdiff_t>(pos));
        const std::size_t c = node_of(next[pos]);
        return (dm(a, b) + dm(b, c) - dm(a, c)) / uav.speed_mps + scenario.dwell_s;
    };

    std::vector<std::size_t> by_priority(m);
    std::iota(by_priority.begin(), by_priority.end(), std::size_t{0});
    std::stable_sort(by_priority.begin(), by_priority.end(), [&](std::size_t a, std::size_t b) {
        return scenario.sensor(visit_order[a]).priority < scenario.sensor(visit_order[b]).priority;
    });

    double duration = full.return_time;
    std::size_t cursor = 0;
    const auto fits = [&](double t) { return energy_used(uav, t) <= uav.battery_s; };
    for (;;) {
        while (!fits(duration) && cursor < m) {
            // Among the equal-lowest priorities remaining, the largest detour goes first.
            const double rho = scenario.sensor(visit_order[by_priority[cursor]]).priority;
            std::size_t group_end = cursor;
            while (group_end < m && scenario.sensor(visit_order[by_priority[group_end]]).priority == rho) ++group_end;
            std::size_t pick = cursor;
            double best = detour(by_priority[cursor]);
            for (std::size_t g = cursor + 1; g < group_end; ++g) {
                const double d = detour(by_priority[g]);
                const bool larger = d > best;
                const bool tie_smaller_id = d == best && visit_order[by_priority[g]] < visit_order[by_priority[pick]];
                if (larger || tie_smaller_id) {
                    best = d;
                    pick = g;
                }
            }
            std::swap(by_priority[cursor], by_priority[pick]);
            const std::size_t pos = by_priority[cursor++];
            duration -= detour(pos);
            if (prev[pos] >= 0) next[static_cast<std::size_t>(prev[pos])] = next[pos];
            if (next[pos] < static_cast<std::ptrdiff_t>(m)) prev[static_cast<std::size_t>(next[pos])] = prev[pos];
            removed[pos] = 1;
            result.abandoned.push_back(visit_order[pos]);
        }
        result.feasible_order.clear();
        for (std::size_t k = 0; k < m; ++k)
            if (!removed[k]) result.feasible_order.push_back(visit_order[k]);
        // The incremental duration can drift by rounding; confirm with an exact recount.
        duration = route_duration(result.feasible_order, uav, scenario, dm).return_time;
        if (fits(duration) || cursor == m) break;
    }
    return result;
}

std::vector<int> decode_keys(std::span<const double> keys, std::span<const int> sensor_ids) {
    if (keys.size() != sensor_ids.size()) throw ValidationError("keys", "length does not match the sensor set");
    std::vector<std::size_t> idx(keys.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return sensor_ids[a] < sensor_ids[b];
    });
    std::vector<int> order;
    order.reserve(idx.size());
    for (const std::size_t i : idx) order.push_back(sensor_ids[i]);
    return order;
}

Route make_route(int uav_id, std::vector<int> visit_order, const Scenario& scenario, const DistanceMatrix& dm) {
    Route route;
    route.uav_id = uav_id;
    RouteTiming timing = route_duration(visit_order, scenario.uav(uav_id), scenario, dm);
    route.visit_order = std::move(visit_order);
    route.arrival_times = std::move(timing.arrival_times);
    route.return_time = timing.return_time;
    route.total_distance = timing.total_distance;
    return route;
}

std::string to_string(PlanMode mode) {
    return mode == PlanMode::Collaborative ? "collaborative" : "non-collaborative";
}

PlanMode parse_plan_mode(std::string_view text) {
    if (text == "collaborative") return PlanMode::Collaborative;
    if (text == "non-collaborative") return PlanMode::NonCollaborative;
    throw ValidationError("mode", "expected `collaborative` or `non-collaborative`, got `" + std::string(text) + "`");
}

void check_plan(const Plan& plan, const Scenario& scenario) {
    const std::size_t n = scenario.sensors.size();
    if (plan.routes.size() != scenario.uavs.size()) throw ValidationError("routes", "one route per UAV is required");
    std::vector<int> seen(n, 0);
    const auto mark = [&](int id, const char* where) {
        if (id < 1 || id > static_cast<int>(n)) throw ValidationError(where, "unknown sensor id " + std::to_string(id));
        if (seen[static_cast<std::size_t>(id - 1)]++)
            throw ValidationError(where, "sensor " + std::to_string(id) + " appears more than once");
    };
    for (std::size_t i = 0; i < plan.routes.size(); ++i) {
        if (plan.routes[i].uav_id != static_cast<int>(i) + 1) throw ValidationError("routes", "routes must be ordered by UAV id");
        for (const int id : plan.routes[i].visit_order) mark(id, "routes");
    }
    for (const int id : plan.abandoned) mark(id, "abandoned");
    for (std::size_t j = 0; j < n; ++j)
        if (!seen[j]) throw ValidationError("abandoned", "sensor " + std::to_string(j + 1) + " is neither visited nor abandoned");
}

void CostWeights::validate() const {
    const auto check = [](double w, const char* name) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError(std::string("cost weight `") + name + "` must be non-negative");
    };
    check(time, "time");
    check(abandon, "abandon");
    check(violation, "violation");
    check(slack, "slack");
}

double time_difference(const UavSpec& uav, double return_time) { return uav.battery_s - energy_used(uav, return_time); }

double time_violation(const UavSpec& uav, double return_time) {
    return std::max(0.0, energy_used(uav, return_time) - uav.battery_s);
}

double uav_cost(const UavSpec& uav, double return_time, double abandoned_priority, PlanMode mode,
                const CostWeights& w) {
    double cost = w.time * return_time + w.abandon * abandoned_priority + w.violation * time_violation(uav, return_time);
    if (mode == PlanMode::Collaborative) cost += w.slack * std::max(0.0, time_difference(uav, return_time));
    return cost;
}

CostBreakdown mission_cost(const Plan& plan, const Scenario& scenario, const DistanceMatrix& dm,
                           const CostWeights& weights) {
    weights.validate();
    (void)dm;
    CostBreakdown cost;
    for (const Route& route : plan.routes) {
        const UavSpec& uav = scenario.uav(route.uav_id);
        cost.duration_term += weights.time * route.return_time;
        cost.violation_term += weights.violation * time_violation(uav, route.return_time);
        if (plan.mode == PlanMode::Collaborative)
            cost.slack_term += weights.slack * std::max(0.0, time_difference(uav, route.return_time));
    }
    for (const int id : plan.abandoned) cost.abandon_term += weights.abandon * scenario.sensor(id).priority;
    return cost;
}

RouteMetrics plan_metrics(const Plan& plan, const Scenario& scenario, const DistanceMatrix& dm,
                          const CostWeights& weights) {
    weights.validate();
    (void)dm;
    RouteMetrics metrics;
    std::vector<double> abandoned_priority(plan.routes.size(), 0.0);
    double unattributed = 0.0;
    for (const int id : plan.abandoned) {
        const double rho = scenario.sensor(id).priority;
        const int owner = plan.owner.empty() ? 0 : plan.owner.at(static_cast<std::size_t>(id - 1));
        if (owner >= 1 && owner <= static_cast<int>(plan.routes.size()))
            abandoned_priority[static_cast<std::size_t>(owner - 1)] += rho;
        else
            unattributed += rho;
    }
    for (std::size_t i = 0; i < plan.routes.size(); ++i) {
        const Route& route = plan.routes[i];
        const UavSpec& uav = scenario.uav(route.uav_id);
        UavMetrics m;
        m.uav_id = route.uav_id;
        m.cost = uav_cost(uav, route.return_time, abandoned_priority[i], plan.mode, weights);
        m.duration = route.return_time;
        m.time_difference = time_difference(uav, route.return_time);
        m.visited = static_cast<int>(route.visit_order.size());
        m.distance = route.total_distance;
        m.time_violation = time_violation(uav, route.return_time);
        metrics.per_uav.push_back(m);

        metrics.fleet.cost += m.cost;
        metrics.fleet.duration += m.duration;
        metrics.fleet.time_difference += m.time_difference;
        metrics.fleet.visited += m.visited;
        metrics.fleet.distance += m.distance;
        metrics.fleet.time_violation += m.time_violation;
    }
    metrics.fleet.cost += weights.abandon * unattributed;
    return metrics;
}

std::string metrics_csv(const RouteMetrics& metrics) {
    std::string out =
        "uav,operation_cost,operation_duration_s,time_difference_s,visited_sensors,travelled_distance_m,time_violation_s\n";
    const auto row = [&](const std::string& label, const UavMetrics& m) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%d,%.6f,%.6f\n", label.c_str(), m.cost, m.duration,
                      m.time_difference, m.visited, m.distance, m.time_violation);
        out += buf;
    };
    for (const UavMetrics& m : metrics.per_uav) row(std::to_string(m.uav_id), m);
    row("total", metrics.fleet);
    return out;
}

}  // namespace uavdc
