#include "pilotgrid/bnp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace pilotgrid {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<int> mask_members(std::uint64_t mask) {
    std::vector<int> members;
    while (mask) {
        const int u = __builtin_ctzll(mask);
        members.push_back(u);
        mask &= mask - 1;
    }
    return members;
}

class CachedCost {
public:
    explicit CachedCost(const BnpInstance& instance) : instance_(instance) {}

    double get(std::uint64_t mask) {
        auto it = cache_.find(mask);
        if (it != cache_.end()) return it->second;
        const double c = column_cost(mask, instance_);
        cache_.emplace(mask, c);
        return c;
    }

private:
    const BnpInstance& instance_;
    std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace

void BnpInstance::validate() const {
    const int n = num_users();
    if (n < 1 || n > 64) throw std::invalid_argument("bnp: user count must be in [1, 64]");
    if (num_pilots < 1) throw std::invalid_argument("bnp: P must be >= 1");
    if (static_cast<int>(clusters.size()) != n)
        throw std::invalid_argument("bnp: clusters must cover the user set");
    if (!(pilot_energy > 0.0)) throw std::invalid_argument("bnp: pilot_energy must be > 0");
    if (!(big_m > 0.0)) throw std::invalid_argument("bnp: big_m must be > 0");
    std::unordered_map<int, int> cluster_sizes;
    for (int c : clusters) ++cluster_sizes[c];
    for (const auto& [c, size] : cluster_sizes)
        if (size > num_pilots)
            throw std::invalid_argument("bnp: a cluster exceeds P users");
}

double column_cost(const std::vector<int>& members, const BnpInstance& instance) {
    if (members.size() < 2)
        throw std::invalid_argument("column_cost: sets must have at least two users");

    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j)
            if (instance.clusters[static_cast<std::size_t>(members[i])] ==
                instance.clusters[static_cast<std::size_t>(members[j])])
                return -instance.big_m;

    Eigen::MatrixXd betas(instance.beta.rows(), static_cast<Eigen::Index>(members.size()));
    for (std::size_t c = 0; c < members.size(); ++c)
        betas.col(static_cast<Eigen::Index>(c)) = instance.beta.col(members[c]);
    const Eigen::MatrixXd gammas = estimation_quality(betas, instance.pilot_energy);
    const Eigen::MatrixXd etas = power_control(gammas, instance.num_pilots);

    double total = 0.0;
    for (int t = 0; t < static_cast<int>(members.size()); ++t) {
        const double sinr = asymptotic_sinr(gammas, etas, t);
        if (sinr < instance.gamma_min) return -instance.big_m;
        total += std::log2(1.0 + sinr);
    }
    return total;
}

double column_cost(std::uint64_t mask, const BnpInstance& instance) {
    return column_cost(mask_members(mask), instance);
}

RlmpSolution solve_rlmp(const std::vector<Column>& columns, const BnpInstance& instance) {
    const int n_users = instance.num_users();
    const int m = n_users + 1;
    const int n_pool = static_cast<int>(columns.size());
    const int n_vars = n_pool + n_users + 2;  // pool, per-user artificials, s+/s-

    LpProblem lp;
    lp.a = Eigen::MatrixXd::Zero(m, n_vars);
    lp.b = Eigen::VectorXd::Ones(m);
    lp.b[n_users] = instance.num_pilots;
    lp.c = Eigen::VectorXd::Zero(n_vars);
    lp.upper = Eigen::VectorXd::Ones(n_vars);

    for (int j = 0; j < n_pool; ++j) {
        for (int u : mask_members(columns[static_cast<std::size_t>(j)].mask)) lp.a(u, j) = 1.0;
        lp.a(n_users, j) = 1.0;
        lp.c[j] = columns[static_cast<std::size_t>(j)].cost;
    }
    for (int u = 0; u < n_users; ++u) {
        lp.a(u, n_pool + u) = 1.0;
        lp.a(n_users, n_pool + u) = 1.0;
        lp.c[n_pool + u] = -instance.big_m;
    }
    const int s_plus = n_pool + n_users, s_minus = s_plus + 1;
    lp.a(n_users, s_plus) = 1.0;
    lp.a(n_users, s_minus) = -1.0;
    lp.c[s_plus] = lp.c[s_minus] = -instance.big_m;
    lp.upper[s_plus] = lp.upper[s_minus] = n_users + instance.num_pilots;

    std::vector<int> basis;
    for (int u = 0; u < n_users; ++u) basis.push_back(n_pool + u);
    basis.push_back(s_minus);

    const LpSolution sol = solve_bounded_lp(lp, basis);
    if (sol.status != LpStatus::optimal)
        throw std::runtime_error("solve_rlmp: LP did not reach optimality");

    RlmpSolution out;
    out.lambda = sol.x.head(n_pool);
    out.duals.pi = sol.duals.head(n_users);
    out.duals.beta_dual = sol.duals[n_users];
    out.objective = sol.objective;
    out.artificial_mass = sol.x.tail(n_vars - n_pool).sum();
    out.feasible = out.artificial_mass <= 1e-6;
    return out;
}

namespace {

// Exhaustive pricing: depth-first over clusters, each contributing at most one
// member. A running optimistic bound (static per-user pair SINR caps plus
// suffix sums of per-cluster bests) prunes branches that cannot beat the
// current best reduced cost.
class PricingSearch {
public:
    PricingSearch(const BnpInstance& instance, const DualPrices& duals,
                  const BranchingConstraints& branching,
                  const std::vector<std::uint64_t>& pool_masks, double tolerance,
                  Clock::time_point deadline, CachedCost& cost)
        : inst_(instance),
          duals_(duals),
          tol_(tolerance),
          deadline_(deadline),
          cost_(cost),
          pool_(pool_masks.begin(), pool_masks.end()) {
        const int n = inst_.num_users();

        // contiguous cluster ids
        std::unordered_map<int, int> remap;
        for (int u = 0; u < n; ++u) {
            auto [it, fresh] = remap.emplace(inst_.clusters[static_cast<std::size_t>(u)],
                                             static_cast<int>(remap.size()));
            if (fresh) cluster_members_.emplace_back();
            cluster_members_[static_cast<std::size_t>(it->second)].push_back(u);
            cluster_of_user_.push_back(it->second);
        }
        num_clusters_ = static_cast<int>(cluster_members_.size());
        cluster_of_user_.resize(static_cast<std::size_t>(n));
        for (int u = 0; u < n; ++u)
            cluster_of_user_[static_cast<std::size_t>(u)] =
                remap[inst_.clusters[static_cast<std::size_t>(u)]];

        same_partners_.assign(static_cast<std::size_t>(n), 0);
        diff_partners_.assign(static_cast<std::size_t>(n), 0);
        for (const auto& [p, r] : branching.same) {
            same_partners_[static_cast<std::size_t>(p)] |= 1ULL << r;
            same_partners_[static_cast<std::size_t>(r)] |= 1ULL << p;
        }
        for (const auto& [p, r] : branching.diff) {
            diff_partners_[static_cast<std::size_t>(p)] |= 1ULL << r;
            diff_partners_[static_cast<std::size_t>(r)] |= 1ULL << p;
        }

        build_static_bounds();
    }

    bool aborted() const { return aborted_; }

    std::optional<Column> run() {
        best_rc_ = tol_;
        best_mask_ = 0;
        recurse(0, 0ULL, 0ULL, 0ULL, 0.0, 0);
        if (aborted_ || best_mask_ == 0) return std::nullopt;
        return Column{best_mask_, cost_.get(best_mask_)};
    }

private:
    void build_static_bounds() {
        const int n = inst_.num_users();
        se_cap_.assign(static_cast<std::size_t>(n),
                       -std::numeric_limits<double>::infinity());
        for (int v = 0; v < n; ++v) {
            for (int w = 0; w < n; ++w) {
                if (w == v || cluster_of_user_[static_cast<std::size_t>(w)] ==
                                  cluster_of_user_[static_cast<std::size_t>(v)])
                    continue;
                Eigen::MatrixXd betas(inst_.beta.rows(), 2);
                betas.col(0) = inst_.beta.col(v);
                betas.col(1) = inst_.beta.col(w);
                const Eigen::MatrixXd gammas = estimation_quality(betas, inst_.pilot_energy);
                const Eigen::MatrixXd etas = power_control(gammas, inst_.num_pilots);
                const double sinr = asymptotic_sinr(gammas, etas, 0);
                se_cap_[static_cast<std::size_t>(v)] =
                    std::max(se_cap_[static_cast<std::size_t>(v)], std::log2(1.0 + sinr));
            }
        }
        cluster_best_.assign(static_cast<std::size_t>(num_clusters_), 0.0);
        for (int c = 0; c < num_clusters_; ++c) {
            double best = 0.0;
            for (int v : cluster_members_[static_cast<std::size_t>(c)])
                best = std::max(best, se_cap_[static_cast<std::size_t>(v)] -
                                          duals_.pi[v] + 1e-9);
            cluster_best_[static_cast<std::size_t>(c)] = best;
        }
        suffix_.assign(static_cast<std::size_t>(num_clusters_) + 1, 0.0);
        for (int c = num_clusters_ - 1; c >= 0; --c)
            suffix_[static_cast<std::size_t>(c)] =
                suffix_[static_cast<std::size_t>(c) + 1] +
                cluster_best_[static_cast<std::size_t>(c)];
    }

    void recurse(int cluster, std::uint64_t mask, std::uint64_t required,
                 std::uint64_t forbidden, double static_sum, int count) {
        if (aborted_) return;
        if ((++nodes_ & 2047u) == 0 && Clock::now() > deadline_) {
            aborted_ = true;
            return;
        }
        if (static_sum + suffix_[static_cast<std::size_t>(cluster)] - duals_.beta_dual <=
            best_rc_)
            return;

        if (cluster == num_clusters_) {
            if (count < 2 || required != 0 || pool_.count(mask)) return;
            const double rc = cost_.get(mask) - mask_dual_sum(mask) - duals_.beta_dual;
            if (rc > best_rc_) {
                best_rc_ = rc;
                best_mask_ = mask;
            }
            return;
        }

        const auto& members = cluster_members_[static_cast<std::size_t>(cluster)];
        std::uint64_t cluster_mask = 0;
        for (int v : members) cluster_mask |= 1ULL << v;
        const std::uint64_t required_here = required & cluster_mask;

        if (required_here != 0) {
            // a same-branch partner pinned a member of this cluster
            if (__builtin_popcountll(required_here) > 1) return;
            const int v = __builtin_ctzll(required_here);
            try_member(cluster, v, mask, required & ~cluster_mask, forbidden, static_sum,
                       count);
            return;
        }

        // skip this cluster entirely
        recurse(cluster + 1, mask, required, forbidden, static_sum, count);
        for (int v : members)
            try_member(cluster, v, mask, required, forbidden, static_sum, count);
    }

    void try_member(int cluster, int v, std::uint64_t mask, std::uint64_t required,
                    std::uint64_t forbidden, double static_sum, int count) {
        const std::uint64_t bit = 1ULL << v;
        if (forbidden & bit) return;
        std::uint64_t new_required = required;
        const std::uint64_t partners = same_partners_[static_cast<std::size_t>(v)];
        if (partners) {
            // partners in earlier clusters must already be in; partners in this
            // cluster can never join (one per cluster)
            std::uint64_t missing = partners & ~mask;
            while (missing) {
                const int w = __builtin_ctzll(missing);
                missing &= missing - 1;
                const int wc = cluster_of_user_[static_cast<std::size_t>(w)];
                if (wc < cluster || wc == cluster) return;
                new_required |= 1ULL << w;
            }
        }
        if (new_required & forbidden) return;
        if (new_required & (1ULL << v)) new_required &= ~(1ULL << v);
        recurse(cluster + 1, mask | bit, new_required,
                forbidden | diff_partners_[static_cast<std::size_t>(v)],
                static_sum + se_cap_[static_cast<std::size_t>(v)] - duals_.pi[v] + 1e-9,
                count + 1);
    }

    double mask_dual_sum(std::uint64_t mask) const {
        double s = 0.0;
        while (mask) {
            s += duals_.pi[__builtin_ctzll(mask)];
            mask &= mask - 1;
        }
        return s;
    }

    const BnpInstance& inst_;
    const DualPrices& duals_;
    double tol_;
    Clock::time_point deadline_;
    CachedCost& cost_;
    std::unordered_set<std::uint64_t> pool_;
    std::vector<std::vector<int>> cluster_members_;
    std::vector<int> cluster_of_user_;
    int num_clusters_ = 0;
    std::vector<std::uint64_t> same_partners_, diff_partners_;
    std::vector<double> se_cap_, cluster_best_, suffix_;
    double best_rc_ = 0.0;
    std::uint64_t best_mask_ = 0;
    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
};

}  // namespace

std::optional<Column> pricing(const BnpInstance& instance, const DualPrices& duals,
                              const BranchingConstraints& branching,
                              const std::vector<std::uint64_t>& pool_masks,
                              double tolerance) {
    CachedCost cost(instance);
    PricingSearch search(instance, duals, branching, pool_masks, tolerance,
                         Clock::time_point::max(), cost);
    return search.run();
}

std::pair<int, int> branch_pair(const Eigen::VectorXd& lambda,
                                const std::vector<Column>& columns) {
    bool integral = true;
    for (Eigen::Index j = 0; j < lambda.size(); ++j)
        if (std::abs(lambda[j] - std::round(lambda[j])) > 1e-6) {
            integral = false;
            break;
        }
    if (integral) throw std::logic_error("branch_pair: lambda is already integral");

    std::unordered_map<std::uint64_t, double> joint;  // key = (p << 32) | r
    for (Eigen::Index j = 0; j < lambda.size(); ++j) {
        const double lj = lambda[j];
        if (lj <= 1e-9) continue;
        const std::vector<int> members = mask_members(columns[static_cast<std::size_t>(j)].mask);
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b)
                joint[(static_cast<std::uint64_t>(members[a]) << 32) |
                      static_cast<std::uint64_t>(members[b])] += lj;
    }

    std::pair<int, int> best{-1, -1};
    double best_score = 0.0;
    for (const auto& [key, q] : joint) {
        if (q <= 1e-7 || q >= 1.0 - 1e-7) continue;
        const double score = std::min(q, 1.0 - q);
        const int p = static_cast<int>(key >> 32), r = static_cast<int>(key & 0xffffffffULL);
        if (score > best_score ||
            (score == best_score && std::make_pair(p, r) < best)) {
            best_score = score;
            best = {p, r};
        }
    }
    if (best.first < 0)
        throw std::logic_error("branch_pair: no fractional joint coverage found");
    return best;
}

namespace {

struct BnbNode {
    BranchingConstraints constraints;
    double parent_bound = std::numeric_limits<double>::infinity();
    int depth = 0;
};

struct NodeOrder {
    bool operator()(const BnbNode& a, const BnbNode& b) const {
        return a.parent_bound < b.parent_bound;  // best bound first
    }
};

}  // namespace

BnpResult bnp_solve(const BnpInstance& instance, const BnpOptions& opts) {
    instance.validate();
    BnpResult result;
    const int n = instance.num_users();
    const int p = instance.num_pilots;
    result.assignment.num_pilots = p;
    result.assignment.pilot.assign(static_cast<std::size_t>(n), kUnassigned);
    if (n < 2 * p) {
        result.status = BnpStatus::infeasible;
        return result;
    }

    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(opts.time_budget_s));
    CachedCost cost(instance);
    std::vector<Column> pool;
    std::vector<std::uint64_t> pool_masks;

    double incumbent_obj = -std::numeric_limits<double>::infinity();
    std::vector<Column> incumbent_columns;
    bool have_incumbent = false;
    bool budget_hit = false;

    std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> queue;
    queue.push(BnbNode{});
    ++result.stats.nodes_created;

    while (!queue.empty()) {
        if (Clock::now() > deadline) {
            budget_hit = true;
            break;
        }
        BnbNode node = queue.top();
        queue.pop();
        if (!opts.disable_bound_pruning && have_incumbent &&
            node.parent_bound <= incumbent_obj + 1e-6) {
            ++result.stats.nodes_pruned_bound;
            continue;
        }
        ++result.stats.nodes_processed;
        result.stats.max_depth = std::max(result.stats.max_depth, node.depth);

        // column generation at this node
        RlmpSolution rlmp;
        std::vector<Column> allowed;
        for (;;) {
            allowed.clear();
            for (std::size_t j = 0; j < pool.size(); ++j)
                if (node.constraints.allows(pool[j].mask)) allowed.push_back(pool[j]);
            rlmp = solve_rlmp(allowed, instance);
            ++result.stats.pricing_calls;
            PricingSearch search(instance, rlmp.duals, node.constraints, pool_masks, 1e-7,
                                 deadline, cost);
            const std::optional<Column> col = search.run();
            if (search.aborted()) {
                budget_hit = true;
                break;
            }
            if (!col) break;
            pool.push_back(*col);
            pool_masks.push_back(col->mask);
            ++result.stats.columns_generated;
        }
        if (budget_hit) break;

        if (!rlmp.feasible) {
            ++result.stats.nodes_infeasible;
            continue;
        }
        const double bound = rlmp.objective;
        if (!opts.disable_bound_pruning && have_incumbent && bound <= incumbent_obj + 1e-6) {
            ++result.stats.nodes_pruned_bound;
            continue;
        }

        bool integral = true;
        for (Eigen::Index j = 0; j < rlmp.lambda.size(); ++j)
            if (std::abs(rlmp.lambda[j] - std::round(rlmp.lambda[j])) > 1e-6) {
                integral = false;
                break;
            }
        if (integral) {
            ++result.stats.nodes_integral;
            std::vector<Column> chosen;
            double obj = 0.0;
            for (Eigen::Index j = 0; j < rlmp.lambda.size(); ++j)
                if (rlmp.lambda[j] > 0.5) {
                    chosen.push_back(allowed[static_cast<std::size_t>(j)]);
                    obj += allowed[static_cast<std::size_t>(j)].cost;
                }
            if (static_cast<int>(chosen.size()) == p && obj > incumbent_obj) {
                incumbent_obj = obj;
                incumbent_columns = std::move(chosen);
                have_incumbent = true;
            }
            continue;
        }

        const std::pair<int, int> pr = branch_pair(rlmp.lambda, allowed);
        BnbNode same_child{node.constraints, bound, node.depth + 1};
        same_child.constraints.same.push_back(pr);
        BnbNode diff_child{node.constraints, bound, node.depth + 1};
        diff_child.constraints.diff.push_back(pr);
        queue.push(std::move(same_child));
        queue.push(std::move(diff_child));
        result.stats.nodes_created += 2;
    }

    if (have_incumbent) {
        int pilot = 0;
        for (const Column& col : incumbent_columns) {
            ++pilot;
            for (int u : mask_members(col.mask))
                result.assignment.pilot[static_cast<std::size_t>(u)] = pilot;
        }
        result.objective = incumbent_obj;
    }
    result.status = budget_hit ? BnpStatus::budget_exceeded
                               : (have_incumbent ? BnpStatus::optimal
                                                 : BnpStatus::infeasible);
    return result;
}

namespace {

class OracleSearch {
public:
    OracleSearch(const BnpInstance& instance, CachedCost& cost)
        : cost_(cost), n_(instance.num_users()), p_(instance.num_pilots) {}

    OracleResult run() {
        part_masks_.assign(static_cast<std::size_t>(p_), 0ULL);
        part_sizes_.assign(static_cast<std::size_t>(p_), 0);
        best_obj_ = -std::numeric_limits<double>::infinity();
        recurse(0, 0);

        OracleResult out;
        out.partitions_enumerated = leaves_;
        out.objective = best_obj_;
        out.assignment.num_pilots = p_;
        out.assignment.pilot.assign(static_cast<std::size_t>(n_), kUnassigned);
        for (int k = 0; k < p_; ++k)
            for (int u : mask_members(best_masks_[static_cast<std::size_t>(k)]))
                out.assignment.pilot[static_cast<std::size_t>(u)] = k + 1;
        return out;
    }

private:
    void recurse(int user, int open) {
        if (user == n_) {
            if (open != p_) return;
            for (int k = 0; k < open; ++k)
                if (part_sizes_[static_cast<std::size_t>(k)] < 2) return;
            ++leaves_;
            double obj = 0.0;
            for (int k = 0; k < open; ++k)
                obj += cost_.get(part_masks_[static_cast<std::size_t>(k)]);
            if (obj > best_obj_) {
                best_obj_ = obj;
                best_masks_.assign(part_masks_.begin(),
                                   part_masks_.begin() + open);
            }
            return;
        }
        // enough users must remain to give every part two members
        int need = 2 * (p_ - open);
        for (int k = 0; k < open; ++k)
            need += std::max(0, 2 - part_sizes_[static_cast<std::size_t>(k)]);
        if (need > n_ - user) return;

        const std::uint64_t bit = 1ULL << user;
        for (int k = 0; k < open; ++k) {
            part_masks_[static_cast<std::size_t>(k)] |= bit;
            ++part_sizes_[static_cast<std::size_t>(k)];
            recurse(user + 1, open);
            part_masks_[static_cast<std::size_t>(k)] &= ~bit;
            --part_sizes_[static_cast<std::size_t>(k)];
        }
        if (open < p_) {
            part_masks_[static_cast<std::size_t>(open)] = bit;
            part_sizes_[static_cast<std::size_t>(open)] = 1;
            recurse(user + 1, open + 1);
            part_sizes_[static_cast<std::size_t>(open)] = 0;
        }
    }

    CachedCost& cost_;
    int n_, p_;
    std::vector<std::uint64_t> part_masks_, best_masks_;
    std::vector<int> part_sizes_;
    double best_obj_ = 0.0;
    std::uint64_t leaves_ = 0;
};

}  // namespace

OracleResult exhaustive_oracle(const BnpInstance& instance) {
    instance.validate();
    if (instance.num_users() > 14)
        throw std::invalid_argument("exhaustive_oracle: refused above 14 users");
    if (instance.num_users() < 2 * instance.num_pilots)
        throw std::invalid_argument("exhaustive_oracle: no partition into non-singleton sets");
    CachedCost cost(instance);
    OracleSearch search(instance, cost);
    return search.run();
}

}  // namespace pilotgrid
