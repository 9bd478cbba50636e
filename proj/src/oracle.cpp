#include "uavdc/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "uavdc/clustering.hpp"
#include "uavdc/errors.hpp"

namespace uavdc::oracle {

namespace {

bool fits(const std::vector<int>& order, const UavSpec& uav, const Scenario& scenario, const DistanceMatrix& dm) {
    return energy_used(uav, route_duration(order, uav, scenario, dm).return_time) <= uav.battery_s;
}

}  // namespace

OracleResult brute_force_route(std::span<const int> sensor_ids, const UavSpec& uav, const Scenario& scenario,
                               const DistanceMatrix& dm, const CostWeights& weights, PlanMode mode) {
    if (sensor_ids.size() > kMaxRouteSensors)
        throw OracleSizeError("brute_force_route handles at most " + std::to_string(kMaxRouteSensors) + " sensors");
    std::vector<int> perm(sensor_ids.begin(), sensor_ids.end());
    std::sort(perm.begin(), perm.end());

    OracleResult best;
    best.value = std::numeric_limits<double>::infinity();
    do {
        const Truncation t = truncate_to_budget(perm, uav, scenario, dm);
        double abandoned = 0.0;
        for (const int id : t.abandoned) abandoned += scenario.sensor(id).priority;
        const double ret = route_duration(t.feasible_order, uav, scenario, dm).return_time;
        const double cost = uav_cost(uav, ret, abandoned, mode, weights);
        ++best.examined;
        if (cost < best.value) {
            best.value = cost;
            best.witness = perm;
            best.survivors = t.feasible_order;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

OracleResult brute_force_partition(const Scenario& scenario, const DistanceMatrix& dm, int k) {
    const std::size_t n = scenario.sensors.size();
    if (n > kMaxPartitionSensors || k > kMaxPartitionGroups)
        throw OracleSizeError("brute_force_partition handles at most " + std::to_string(kMaxPartitionSensors) +
                              " sensors and " + std::to_string(kMaxPartitionGroups) + " groups");
    if (k < 1 || static_cast<std::size_t>(k) > n) throw ValidationError("k", "must lie in 1..n");

    OracleResult best;
    best.value = std::numeric_limits<double>::infinity();
    // Restricted growth strings enumerate each set partition once, in
    // lexicographic order, already in canonical labelling.
    std::vector<int> labels(n, 1);
    std::function<void(std::size_t, int)> walk = [&](std::size_t pos, int used) {
        if (pos == n) {
            if (used != k) return;
            const double value = clustering_objective(labels, k, scenario, dm);
            ++best.examined;
            if (value < best.value) {
                best.value = value;
                best.witness = labels;
            }
            return;
        }
        if (used + static_cast<int>(n - pos) < k) return;
        for (int g = 1; g <= std::min(used + 1, k); ++g) {
            labels[pos] = g;
            walk(pos + 1, std::max(used, g));
        }
    };
    labels[0] = 1;
    walk(1, 1);
    return best;
}

OracleResult max_absorption(const Plan& plan, const Scenario& scenario, const DistanceMatrix& dm, bool append_only) {
    if (plan.abandoned.size() > 8) throw OracleSizeError("max_absorption handles at most 8 abandoned sensors");
    std::vector<std::vector<int>> routes;
    for (const Route& r : plan.routes) routes.push_back(r.visit_order);
    std::vector<int> pool = plan.abandoned;
    std::vector<int> inserted;

    OracleResult best;
    std::function<void()> search = [&]() {
        ++best.examined;
        if (inserted.size() > best.witness.size()) {
            best.witness = inserted;
            best.value = static_cast<double>(inserted.size());
        }
        if (best.witness.size() == plan.abandoned.size()) return;
        for (std::size_t a = 0; a < pool.size(); ++a) {
            const int id = pool[a];
            if (id == 0) continue;
            for (std::size_t r = 0; r < routes.size(); ++r) {
                if (plan.routes[r].failed) continue;
                const UavSpec& uav = scenario.uav(plan.routes[r].uav_id);
                const std::size_t m = routes[r].size();
                for (std::size_t pos = append_only ? m : 0; pos <= m; ++pos) {
                    routes[r].insert(routes[r].begin() + static_cast<std::ptrdiff_t>(pos), id);
                    if (fits(routes[r], uav, scenario, dm)) {
                        pool[a] = 0;
                        inserted.push_back(id);
                        search();
                        inserted.pop_back();
                        pool[a] = id;
                    }
                    routes[r].erase(routes[r].begin() + static_cast<std::ptrdiff_t>(pos));
                    if (best.witness.size() == plan.abandoned.size()) return;
                }
            }
        }
    };
    search();
    return best;
}

bool any_feasible_insertion(const Plan& plan, const Scenario& scenario, const DistanceMatrix& dm, bool append_only) {
    for (const Route& route : plan.routes) {
        if (route.failed) continue;
        const UavSpec& uav = scenario.uav(route.uav_id);
        const std::size_t m = route.visit_order.size();
        for (const int id : plan.abandoned) {
            for (std::size_t pos = append_only ? m : 0; pos <= m; ++pos) {
                std::vector<int> order = route.visit_order;
                order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), id);
                if (fits(order, uav, scenario, dm)) return true;
            }
        }
    }
    return false;
}

}  // namespace uavdc::oracle
