#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uavdc/route_eval.hpp"
#include "uavdc/scenario.hpp"

namespace uavdc::oracle {

/// Exhaustive reference results for desk-scale instances.
struct OracleResult {
    double value = 0.0;
    std::vector<int> witness;  // permutation, labels or inserted sensor ids
    std::vector<int> survivors;
    std::uint64_t examined = 0;
};

inline constexpr std::size_t kMaxRouteSensors = 9;
inline constexpr std::size_t kMaxPartitionSensors = 10;
inline constexpr int kMaxPartitionGroups = 3;

/// Minimum single-UAV cost over every visiting order of `sensor_ids`, each
/// order truncated to the budget. Ties keep the lexicographically first
/// permutation. Throws OracleSizeError beyond 9 sensors.
OracleResult brute_force_route(std::span<const int> sensor_ids, const UavSpec& uav, const Scenario& scenario,
                               const DistanceMatrix& dm, const CostWeights& weights = {},
                               PlanMode mode = PlanMode::NonCollaborative);

/// Minimum clustering objective over every partition of the scenario's
/// sensors into exactly k non-empty groups (witness is canonical labels).
OracleResult brute_force_partition(const Scenario& scenario, const DistanceMatrix& dm, int k);

/// Largest number of abandoned sensors the fleet can absorb by any sequence of
/// single-sensor insertions at any route position (or appended before the end
/// leg when `append_only`). Failed routes never absorb.
OracleResult max_absorption(const Plan& plan, const Scenario& scenario, const DistanceMatrix& dm,
                            bool append_only = false);

/// True when at least one abandoned sensor fits into some non-failed route.
bool any_feasible_insertion(const Plan& plan, const Scenario& scenario, const DistanceMatrix& dm,
                            bool append_only = false);

}  // namespace uavdc::oracle
