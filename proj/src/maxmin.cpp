#include "pilotgrid/maxmin.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace pilotgrid {

double min_copilot_distance(const std::vector<int>& membership,
                            const std::vector<Point2>& users) {
    if (membership.size() != users.size())
        throw std::invalid_argument("min_copilot_distance: membership size mismatch");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < users.size(); ++i)
        for (std::size_t j = i + 1; j < users.size(); ++j)
            if (membership[i] == membership[j])
                best = std::min(best, (users[i] - users[j]).norm());
    return best;
}

namespace {

using Clock = std::chrono::steady_clock;

class FeasibilitySearch {
public:
    FeasibilitySearch(const PartitionInstance& inst, double t)
        : n_(static_cast<int>(inst.users.size())),
          p_(inst.num_partitions),
          floor_(inst.size_floor),
          deadline_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(inst.feasibility_budget_s))) {
        adj_.resize(n_);
        const double t2 = t * t;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if ((inst.users[i] - inst.users[j]).squaredNorm() < t2) {
                    adj_[i].push_back(j);
                    adj_[j].push_back(i);
                }
        color_.assign(n_, -1);
        neighbor_color_count_.assign(static_cast<std::size_t>(n_) * p_, 0);
        class_size_.assign(p_, 0);
    }

    FeasibilityResult run() {
        FeasibilityResult res;
        if (greedy_with_repair()) {
            res.feasible = true;
            res.membership = color_;
            return res;
        }
        std::fill(color_.begin(), color_.end(), -1);
        std::fill(neighbor_color_count_.begin(), neighbor_color_count_.end(), 0);
        std::fill(class_size_.begin(), class_size_.end(), 0);
        used_colors_ = 0;
        timed_out_ = false;
        if (backtrack(0)) {
            res.feasible = true;
            res.membership = color_;
        } else {
            res.resolved = !timed_out_;
        }
        return res;
    }

private:
    bool conflicts(int v, int c) const {
        return neighbor_color_count_[static_cast<std::size_t>(v) * p_ + c] > 0;
    }

    void set_color(int v, int c) {
        color_[v] = c;
        ++class_size_[c];
        for (int u : adj_[v]) ++neighbor_color_count_[static_cast<std::size_t>(u) * p_ + c];
    }

    void unset_color(int v, int c) {
        color_[v] = -1;
        --class_size_[c];
        for (int u : adj_[v]) --neighbor_color_count_[static_cast<std::size_t>(u) * p_ + c];
    }

    int saturation(int v) const {
        int s = 0;
        const std::size_t base = static_cast<std::size_t>(v) * p_;
        for (int c = 0; c < p_; ++c)
            if (neighbor_color_count_[base + c] > 0) ++s;
        return s;
    }

    int select_vertex() const {
        int best = -1, best_sat = -1, best_deg = -1;
        for (int v = 0; v < n_; ++v) {
            if (color_[v] >= 0) continue;
            const int s = saturation(v);
            const int d = static_cast<int>(adj_[v].size());
            if (s > best_sat || (s == best_sat && d > best_deg)) {
                best = v;
                best_sat = s;
                best_deg = d;
            }
        }
        return best;
    }

    // Necessary condition for completing the size floors: a bipartite matching
    // must cover every deficit slot of an activated class, and enough vertices
    // must remain for the classes not activated yet.
    bool floors_reachable(int colored_count) {
        const int uncolored = n_ - colored_count;
        int slots_total = (p_ - used_colors_) * floor_;
        std::vector<int> slot_color;
        for (int c = 0; c < used_colors_; ++c) {
            const int deficit = floor_ - class_size_[c];
            for (int d = 0; d < deficit; ++d) slot_color.push_back(c);
            if (deficit > 0) slots_total += deficit;
        }
        if (slots_total > uncolored) return false;
        if (slot_color.empty()) return true;

        std::vector<int> free_vertices;
        for (int v = 0; v < n_; ++v)
            if (color_[v] < 0) free_vertices.push_back(v);

        // Kuhn's algorithm: slots on the left, uncolored vertices on the right.
        std::vector<int> matched_vertex(free_vertices.size(), -1);
        std::vector<char> visited(free_vertices.size());
        auto compatible = [&](int slot, std::size_t vi) {
            return !conflicts(free_vertices[vi], slot_color[static_cast<std::size_t>(slot)]);
        };
        std::function<bool(int)> augment = [&](int slot) -> bool {
            for (std::size_t vi = 0; vi < free_vertices.size(); ++vi) {
                if (visited[vi] || !compatible(slot, vi)) continue;
                visited[vi] = 1;
                if (matched_vertex[vi] < 0 || augment(matched_vertex[vi])) {
                    matched_vertex[vi] = slot;
                    return true;
                }
            }
            return false;
        };
        for (int slot = 0; slot < static_cast<int>(slot_color.size()); ++slot) {
            std::fill(visited.begin(), visited.end(), 0);
            if (!augment(slot)) return false;
        }
        return true;
    }

    bool backtrack(int colored_count) {
        if ((++nodes_ & 1023u) == 0 && Clock::now() > deadline_) {
            timed_out_ = true;
            return false;
        }
        if (colored_count == n_) {
            for (int c = 0; c < p_; ++c)
                if (class_size_[c] < floor_) return false;
            return true;
        }
        if (!floors_reachable(colored_count)) return false;

        const int v = select_vertex();
        const int color_limit = std::min(p_ - 1, used_colors_);  // activate in order
        for (int c = 0; c <= color_limit; ++c) {
            if (conflicts(v, c)) continue;
            const bool activates = (c == used_colors_);
            if (activates) ++used_colors_;
            set_color(v, c);
            if (backtrack(colored_count + 1)) return true;
            unset_color(v, c);
            if (activates) --used_colors_;
            if (timed_out_) return false;
        }
        return false;
    }

    // DSATUR greedy plus a floor-repair pass; succeeds on most sub-critical t.
    bool greedy_with_repair() {
        used_colors_ = 0;
        for (int step = 0; step < n_; ++step) {
            const int v = select_vertex();
            int chosen = -1;
            const int limit = std::min(p_ - 1, used_colors_);
            // prefer the emptiest admissible class to keep floors easy
            for (int c = 0; c <= limit; ++c) {
                if (conflicts(v, c)) continue;
                if (chosen < 0 || class_size_[c] < class_size_[chosen]) chosen = c;
            }
            if (chosen < 0) return false;
            if (chosen == used_colors_) ++used_colors_;
            set_color(v, chosen);
        }
        // move members of over-full classes into deficient ones
        for (int c = 0; c < p_; ++c) {
            while (class_size_[c] < floor_) {
                bool moved = false;
                for (int v = 0; v < n_ && !moved; ++v) {
                    const int from = color_[v];
                    if (from == c || class_size_[from] <= floor_ || conflicts(v, c)) continue;
                    unset_color(v, from);
                    set_color(v, c);
                    moved = true;
                }
                if (!moved) return false;
            }
        }
        for (int c = 0; c < p_; ++c)
            if (class_size_[c] < floor_) return false;
        return true;
    }

    int n_, p_, floor_;
    Clock::time_point deadline_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> color_;
    std::vector<int> neighbor_color_count_;  // n x P
    std::vector<int> class_size_;
    int used_colors_ = 0;
    bool timed_out_ = false;
    std::uint64_t nodes_ = 0;
};

}  // namespace

FeasibilityResult feasibility(const PartitionInstance& instance, double t) {
    if (t < 0.0) throw std::invalid_argument("feasibility: t must be >= 0");
    if (instance.num_partitions < 1) throw std::invalid_argument("feasibility: P must be >= 1");
    if (static_cast<int>(instance.users.size()) <
        instance.num_partitions * instance.size_floor) {
        return {};
    }
    FeasibilitySearch search(instance, t);
    return search.run();
}

PartitionResult maxmin_assign(const PartitionInstance& instance) {
    PartitionResult result;
    const int n = static_cast<int>(instance.users.size());
    if (n < instance.num_partitions * instance.size_floor) {
        result.status = PartitionStatus::infeasible;
        return result;
    }

    double t_lo = 0.0;
    double max_dist = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            max_dist = std::max(max_dist, (instance.users[i] - instance.users[j]).norm());
    double t_hi = max_dist + std::max(1.0, instance.epsilon);

    FeasibilityResult best = feasibility(instance, t_lo);
    if (!best.feasible) {
        // cannot happen given the size check; defensive
        result.status = PartitionStatus::infeasible;
        return result;
    }
    bool approximate = false;
    while (t_hi - t_lo >= instance.epsilon) {
        const double mid = 0.5 * (t_lo + t_hi);
        FeasibilityResult res = feasibility(instance, mid);
        if (res.feasible) {
            t_lo = mid;
            best = std::move(res);
        } else {
            if (!res.resolved) approximate = true;
            t_hi = mid;
        }
    }

    result.membership = best.membership;
    result.last_feasible_t = t_lo;
    result.t_star = min_copilot_distance(result.membership, instance.users);
    result.status = approximate ? PartitionStatus::approximate
                                : PartitionStatus::optimal_within_epsilon;
    return result;
}

}  // namespace pilotgrid
