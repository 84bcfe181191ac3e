#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "pilotgrid/channel.hpp"
#include "pilotgrid/simplex.hpp"

namespace pilotgrid {

// Sum-SE pilot assignment instance. Columns are co-pilot user sets (at least
// two users, at most one per cluster); the solver partitions the users into
// exactly P such sets. Limited to 64 users (set masks).
struct BnpInstance {
    Eigen::MatrixXd beta;        // RRHs x users
    int num_pilots = 1;          // P
    double gamma_min = 0.0;      // linear SINR floor; 0 disables the floor
    double big_m = 1e6;          // penalty magnitude for invalid sets
    std::vector<int> clusters;   // per-user cluster index
    double pilot_energy = 0.0;   // tau_p * rho_p, linear

    int num_users() const { return static_cast<int>(beta.cols()); }
    void validate() const;
};

struct Column {
    std::uint64_t mask = 0;  // membership bitmask over users
    double cost = 0.0;

    int size() const { return __builtin_popcountll(mask); }
    bool contains(int user) const { return (mask >> user) & 1ULL; }
};

// Set cost: sum of log2(1 + SINR) over members when every member clears
// gamma_min and no two members share a cluster; -big_m otherwise.
double column_cost(const std::vector<int>& members, const BnpInstance& instance);
double column_cost(std::uint64_t mask, const BnpInstance& instance);

struct BranchingConstraints {
    std::vector<std::pair<int, int>> same;  // must appear together
    std::vector<std::pair<int, int>> diff;  // must not appear together

    bool allows(std::uint64_t mask) const {
        for (const auto& [p, r] : same) {
            const bool has_p = (mask >> p) & 1ULL, has_r = (mask >> r) & 1ULL;
            if (has_p != has_r) return false;
        }
        for (const auto& [p, r] : diff)
            if (((mask >> p) & 1ULL) && ((mask >> r) & 1ULL)) return false;
        return true;
    }
};

struct DualPrices {
    Eigen::VectorXd pi;      // per user
    double beta_dual = 0.0;  // cardinality row
};

struct RlmpSolution {
    bool feasible = false;           // false when the LP left artificial mass
    Eigen::VectorXd lambda;          // over the supplied columns
    DualPrices duals;
    double objective = 0.0;          // full LP objective (artificials included)
    double artificial_mass = 0.0;
};

// Restricted linear master over the supplied columns. Per-user artificial
// singleton columns (cost -big_m) plus an artificial surplus pair on the
// cardinality row keep every node's LP feasible regardless of the pool.
RlmpSolution solve_rlmp(const std::vector<Column>& columns, const BnpInstance& instance);

// Exhaustive pricing over branching-consistent feasible sets; returns the
// reduced-cost maximizer when its reduced cost exceeds the tolerance.
std::optional<Column> pricing(const BnpInstance& instance, const DualPrices& duals,
                              const BranchingConstraints& branching,
                              const std::vector<std::uint64_t>& pool_masks,
                              double tolerance = 1e-7);

// Most-fractional joint coverage pair (p, r): maximizes min(q, 1-q) where
// q = sum of lambda over columns containing both. Throws std::logic_error if
// lambda is already integral.
std::pair<int, int> branch_pair(const Eigen::VectorXd& lambda,
                                const std::vector<Column>& columns);

struct TreeStats {
    std::uint64_t nodes_created = 0;
    std::uint64_t nodes_processed = 0;
    std::uint64_t nodes_pruned_bound = 0;
    std::uint64_t nodes_integral = 0;
    std::uint64_t nodes_infeasible = 0;
    std::uint64_t pricing_calls = 0;
    std::uint64_t columns_generated = 0;
    int max_depth = 0;
};

enum class BnpStatus {
    optimal,                 // search tree closed; incumbent certified
    budget_exceeded,         // incumbent returned without a certificate
    infeasible,              // N_u < 2P (no partition into non-singleton sets)
};

struct BnpResult {
    BnpStatus status = BnpStatus::infeasible;
    PilotAssignment assignment;
    double objective = 0.0;
    TreeStats stats;
};

struct BnpOptions {
    double time_budget_s = 600.0;
    bool disable_bound_pruning = false;  // reference mode for tree-size comparisons
};

BnpResult bnp_solve(const BnpInstance& instance, const BnpOptions& opts = {});

struct OracleResult {
    PilotAssignment assignment;
    double objective = 0.0;
    std::uint64_t partitions_enumerated = 0;
};

// Brute force over all partitions into exactly P parts of size >= 2
// (refused above 14 users).
OracleResult exhaustive_oracle(const BnpInstance& instance);

}  // namespace pilotgrid
