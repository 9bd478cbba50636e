#pragma once

#include <span>
#include <string>
#include <vector>

#include "uavdc/scenario.hpp"

namespace uavdc {

/// Timing of one UAV flying start -> visit_order... -> end. An arrival time
/// includes the dwell at that sensor, so arrival[k+1] = arrival[k] + leg/v + dwell.
struct RouteTiming {
    std::vector<double> arrival_times;
    double return_time = 0.0;      // includes takeoff and landing t0
    double total_distance = 0.0;   // metres, start to end
};

/// Throws ValidationError for an unknown sensor id.
RouteTiming route_duration(std::span<const int> visit_order, const UavSpec& uav, const Scenario& scenario,
                           const DistanceMatrix& dm);

/// Energy drawn by a flight of `return_time` seconds.
inline double energy_used(const UavSpec& uav, double return_time) { return return_time * uav.energy_rate; }

struct Truncation {
    std::vector<int> feasible_order;  // survivors, original relative order
    std::vector<int> abandoned;       // removed sensors, in removal order
};

/// Drops the lowest-priority sensor (ties: larger detour, then smaller id)
/// until the route fits the battery. Throws InfeasibleScenarioError when even
/// the empty route does not fit.
Truncation truncate_to_budget(std::span<const int> visit_order, const UavSpec& uav, const Scenario& scenario,
                              const DistanceMatrix& dm);

/// Random-key decoding: sensors sorted by ascending key, ties by sensor id.
std::vector<int> decode_keys(std::span<const double> keys, std::span<const int> sensor_ids);

struct Route {
    int uav_id = 0;
    std::vector<int> visit_order;
    std::vector<double> arrival_times;
    double return_time = 0.0;
    double total_distance = 0.0;
    bool failed = false;

    friend bool operator==(const Route&, const Route&) = default;
};

Route make_route(int uav_id, std::vector<int> visit_order, const Scenario& scenario, const DistanceMatrix& dm);

enum class PlanMode { NonCollaborative, Collaborative };

std::string to_string(PlanMode mode);
PlanMode parse_plan_mode(std::string_view text);

struct Plan {
    std::vector<Route> routes;  // routes[i].uav_id == i + 1
    std::vector<int> abandoned; // ascending sensor ids
    PlanMode mode = PlanMode::NonCollaborative;
    std::vector<int> owner;     // owner[id-1]: UAV whose cluster held the sensor, empty if unknown
    std::uint64_t seed = 0;

    friend bool operator==(const Plan&, const Plan&) = default;
};

/// Throws ValidationError unless routes are disjoint and routes + abandoned
/// cover every sensor exactly once.
void check_plan(const Plan& plan, const Scenario& scenario);

struct CostWeights {
    double time = 1.0;        // per second of flight
    double abandon = 60.0;    // per priority unit left uncollected
    double violation = 1000.0;// per second over budget
    double slack = 0.5;       // per second of unused budget, collaborative only

    /// Throws ConfigError on negative or non-finite weights.
    void validate() const;
};

struct CostBreakdown {
    double duration_term = 0.0;
    double abandon_term = 0.0;
    double violation_term = 0.0;
    double slack_term = 0.0;

    double total() const { return duration_term + abandon_term + violation_term + slack_term; }
};

/// Time difference (budget minus energy used) and the positive part of its negation.
double time_difference(const UavSpec& uav, double return_time);
double time_violation(const UavSpec& uav, double return_time);

/// Fleet objective: time + abandoned priority + violation [+ slack when collaborative].
CostBreakdown mission_cost(const Plan& plan, const Scenario& scenario, const DistanceMatrix& dm,
                           const CostWeights& weights = {});

/// Cost of one UAV flying `route_return_time` and leaving `abandoned_priority` behind.
double uav_cost(const UavSpec& uav, double return_time, double abandoned_priority, PlanMode mode,
                const CostWeights& weights);

struct UavMetrics {
    int uav_id = 0;  // 0 for the fleet row
    double cost = 0.0;
    double duration = 0.0;
    double time_difference = 0.0;
    int visited = 0;
    double distance = 0.0;
    double time_violation = 0.0;
};

struct RouteMetrics {
    std::vector<UavMetrics> per_uav;
    UavMetrics fleet;
};

/// Per-UAV costs charge abandoned priority to the cluster owner, so they sum
/// to the fleet cost; unattributed abandonment only appears in the fleet row.
RouteMetrics plan_metrics(const Plan& plan, const Scenario& scenario, const DistanceMatrix& dm,
                          const CostWeights& weights = {});

/// One row per UAV plus a `total` row.
std::string metrics_csv(const RouteMetrics& metrics);

}  // namespace uavdc
