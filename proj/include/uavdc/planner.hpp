#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavdc/clustering.hpp"
#include "uavdc/de_engine.hpp"
#include "uavdc/route_eval.hpp"
#include "uavdc/scenario.hpp"

namespace uavdc {

struct PlannerConfig {
    DeConfig de;
    CostWeights weights;
    PlanMode mode = PlanMode::NonCollaborative;
    int cluster_restarts = 50;
    std::uint64_t seed = 0;
    bool append_only = false;   // reassignment appends instead of cheapest insertion
    bool polish = true;         // DE pass over routes changed by reassignment
    int reassign_rounds = 4;    // reassign -> polish cycles in collaborative mode
    int threads = 1;

    /// Throws ConfigError.
    void validate() const;
};

/// One generation of a planning trace, fleet- or UAV-level.
struct TraceRow {
    int generation = 0;
    double best_cost = 0.0;
    double mean_cost = 0.0;
    double violation_sum = 0.0;
    double tdiff_sum = 0.0;
};

struct UavTrace {
    int uav_id = 0;
    std::string stage;  // "cluster" for the per-cluster run, "polish-<round>" afterwards
    std::vector<TraceRow> rows;
};

struct PlanResult {
    Plan plan;
    RouteMetrics metrics;
    CostBreakdown cost;
    ClusterAssignment clusters;
    std::vector<int> cluster_uav;  // cluster_uav[label-1] = UAV id serving that cluster
    std::vector<UavTrace> traces;
};

/// Minimum-total-distance matching of clusters (rows) to UAV starts; needs
/// centroids.size() <= UAV count. Returns the UAV id for each cluster.
std::vector<int> match_clusters_to_uavs(const std::vector<Point>& centroids, const Scenario& scenario);

/// Rectangular assignment (rows <= cols) minimising total cost. Returns the
/// column of each row.
std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost);

/// Clusters with k = q, assigns clusters to UAVs, then one independent DE per
/// UAV over its cluster. Routes are truncated to the battery budget.
PlanResult plan_non_collaborative(const Scenario& scenario, const PlannerConfig& config);

/// The non-collaborative plan followed by rounds of abandoned-sensor
/// reassignment and DE polishing of the routes that changed.
PlanResult plan_collaborative(const Scenario& scenario, const PlannerConfig& config);

/// Dispatches on config.mode.
PlanResult plan_mission(const Scenario& scenario, const PlannerConfig& config);

struct ReassignOptions {
    bool append_only = false;
};

/// Repeatedly lets every UAV with spare budget take its nearest abandoned
/// sensor that still fits (cheapest insertion position, or appended before
/// the end leg), committing the cheapest such insertion across the fleet.
/// Stops when nothing fits. Failed UAVs never absorb.
Plan reassign_abandoned(Plan plan, const Scenario& scenario, const DistanceMatrix& dm,
                        const ReassignOptions& options = {});

/// UAV `uav_id` stops after its first `completed_visits` sensors; the rest of
/// its route joins the abandoned pool and the UAV takes no further work.
Plan fail_uav(Plan plan, int uav_id, int completed_visits, const Scenario& scenario, const DistanceMatrix& dm);

/// Sums the per-UAV rows of one stage generation by generation.
std::vector<TraceRow> fleet_trace(const std::vector<UavTrace>& traces, const std::string& stage = "cluster");

std::string trace_csv(const std::vector<TraceRow>& rows);

struct ComparisonReport {
    PlanResult non_collaborative;
    PlanResult collaborative;
    double visited_ratio_non_collaborative = 0.0;
    double visited_ratio_collaborative = 0.0;
    double cost_reduction = 0.0;  // 1 - cost_collaborative / cost_non_collaborative
};

ComparisonReport compare_modes(const Scenario& scenario, const PlannerConfig& config);

std::string comparison_csv_header();
std::string comparison_csv_row(const std::string& label, const ComparisonReport& report);
/// Table-style side-by-side rendering of both modes.
std::string comparison_table(const ComparisonReport& report);

}  // namespace uavdc
