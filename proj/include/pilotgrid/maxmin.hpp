#pragma once

#include <vector>

#include "pilotgrid/geometry.hpp"

namespace pilotgrid {

struct PartitionInstance {
    std::vector<Point2> users;
    int num_partitions = 1;            // P
    int size_floor = 2;                // minimum users per partition
    double epsilon = 1.0;              // bisection tolerance, meters
    double feasibility_budget_s = 10.0;  // per feasibility call
};

enum class PartitionStatus {
    optimal_within_epsilon,
    approximate,   // a feasibility call timed out and was treated as infeasible
    infeasible,    // N_u < P * size_floor
};

struct PartitionResult {
    std::vector<int> membership;  // partition index 0..P-1 per user
    double t_star = 0.0;          // achieved minimum co-pilot distance
    double last_feasible_t = 0.0; // certified feasible bisection level
    PartitionStatus status = PartitionStatus::infeasible;
};

// Minimum over partitions of the minimum pairwise distance inside a partition;
// +infinity when every partition is a singleton.
double min_copilot_distance(const std::vector<int>& membership,
                            const std::vector<Point2>& users);

struct FeasibilityResult {
    bool feasible = false;
    bool resolved = true;         // false iff the time budget ran out
    std::vector<int> membership;  // valid when feasible
};

// Exact search for a partition in which no two users closer than t share a
// class and every class holds at least size_floor users. Backtracking with
// DSATUR ordering, first-vertex/color-activation symmetry breaking, and a
// matching-based size-floor bound.
FeasibilityResult feasibility(const PartitionInstance& instance, double t);

// Bisection on t, keeping the last feasible membership.
PartitionResult maxmin_assign(const PartitionInstance& instance);

}  // namespace pilotgrid
