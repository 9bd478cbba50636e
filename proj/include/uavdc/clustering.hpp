#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uavdc/scenario.hpp"

namespace uavdc {

struct ClusterAssignment {
    std::vector<int> labels;  // per sensor, in 1..k
    int k = 0;
    double objective_value = 0.0;

    friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Priority-weighted within-cluster dispersion:
///   sum_g 1/(2|g|) sum_{j != l in g} (D_jl / (rho_j rho_l))^2
/// Throws ValidationError on labels outside 1..k or an empty group when n >= k.
double clustering_objective(std::span<const int> labels, int k, const Scenario& scenario, const DistanceMatrix& dm);
double clustering_objective(const ClusterAssignment& assignment, const Scenario& scenario, const DistanceMatrix& dm);

struct ClusteringOptions {
    int restarts = 50;
    std::uint64_t seed = 0;
    int max_iterations = 100;
    int threads = 1;
};

/// One restart's objective after seeding, after every accepted Lloyd step and
/// after every refinement pass.
struct RestartLog {
    std::vector<double> objective_history;
    double final_objective = 0.0;
};

struct ClusteringRun {
    ClusterAssignment best;
    std::vector<RestartLog> restarts;
};

/// Multi-restart precedence-weighted k-means. Each restart runs k-means++
/// seeding and Lloyd iterations on the priority-scaled points x_j / rho_j,
/// accepting a Lloyd step only if the exact objective does not increase,
/// then refines with single-sensor moves on the exact objective. The best
/// restart wins; ties go to the lexicographically smallest label vector.
/// Labels are canonical: groups are numbered in order of first appearance.
ClusteringRun run_clustering(const Scenario& scenario, const DistanceMatrix& dm, int k, const ClusteringOptions& options);

/// Throws ValidationError when n < k (reduce k) or k < 1.
ClusterAssignment cluster_sensors(const Scenario& scenario, const DistanceMatrix& dm, int k, int restarts = 50,
                                  std::uint64_t seed = 0);

/// Plain geometric k-means with the same restart scheme; the objective is the
/// within-cluster sum of squares.
ClusterAssignment kmeans(std::span<const Point> points, int k, const ClusteringOptions& options);

/// Renumbers groups by order of first appearance.
std::vector<int> canonical_labels(std::span<const int> labels);

/// `sensor_id,label` rows.
std::string assignment_csv(const ClusterAssignment& assignment);

/// Mean sensor position of every group (index g-1 for label g).
std::vector<Point> cluster_centroids(const ClusterAssignment& assignment, const Scenario& scenario);

}  // namespace uavdc
