#include "pilotgrid/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pilotgrid/random.hpp"

namespace pilotgrid {

namespace {

// Uniform-cell index over retained points; cell size equals the inhibition
// distance so a contention disk is covered by the 3x3 neighborhood.
class InhibitionGrid {
public:
    InhibitionGrid(double min_x, double min_y, double max_x, double max_y, double cell)
        : cell_(cell), min_x_(min_x), min_y_(min_y) {
        nx_ = static_cast<int>(std::floor((max_x - min_x) / cell)) + 1;
        ny_ = static_cast<int>(std::floor((max_y - min_y) / cell)) + 1;
        cells_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
    }

    void insert(const Point2& p, int pilot) {
        cells_[index(p)].push_back({p.x(), p.y(), pilot});
    }

    // Marks stamp[pilot] = stamp for every pilot held strictly within r of p.
    void stamp_blocked(const Point2& p, double r, std::vector<std::uint32_t>& stamp,
                       std::uint32_t tick) const {
        const double r2 = r * r;
        const int cx = static_cast<int>(std::floor((p.x() - min_x_) / cell_));
        const int cy = static_cast<int>(std::floor((p.y() - min_y_) / cell_));
        for (int dy = -1; dy <= 1; ++dy) {
            const int y = cy + dy;
            if (y < 0 || y >= ny_) continue;
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = cx + dx;
                if (x < 0 || x >= nx_) continue;
                for (const Entry& e : cells_[static_cast<std::size_t>(y) * nx_ + x]) {
                    const double ddx = e.x - p.x();
                    const double ddy = e.y - p.y();
                    if (ddx * ddx + ddy * ddy < r2)
                        stamp[static_cast<std::size_t>(e.pilot)] = tick;
                }
            }
        }
    }

private:
    struct Entry {
        double x, y;
        int pilot;
    };

    std::size_t index(const Point2& p) const {
        const int cx = static_cast<int>(std::floor((p.x() - min_x_) / cell_));
        const int cy = static_cast<int>(std::floor((p.y() - min_y_) / cell_));
        return static_cast<std::size_t>(cy) * nx_ + cx;
    }

    double cell_, min_x_, min_y_;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<Entry>> cells_;
};

struct Bounds {
    double min_x, min_y, max_x, max_y;
};

Bounds bounds_of(const std::vector<Point2>& pts) {
    Bounds b{0.0, 0.0, 1.0, 1.0};
    if (!pts.empty()) {
        b.min_x = b.max_x = pts[0].x();
        b.min_y = b.max_y = pts[0].y();
        for (const auto& p : pts) {
            b.min_x = std::min(b.min_x, p.x());
            b.max_x = std::max(b.max_x, p.x());
            b.min_y = std::min(b.min_y, p.y());
            b.max_y = std::max(b.max_y, p.y());
        }
    }
    return b;
}

void check_pilot_count(int num_pilots) {
    if (num_pilots <= 0) throw std::invalid_argument("pilot count must be >= 1");
}

std::vector<std::size_t> mark_order(const PointSet& users) {
    std::vector<std::size_t> order(users.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    bool sorted = true;
    for (std::size_t i = 1; i < users.marks.size(); ++i)
        if (users.marks[i] < users.marks[i - 1]) {
            sorted = false;
            break;
        }
    if (!sorted)
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return users.marks[a] < users.marks[b];
        });
    return order;
}

}  // namespace

SensingConfig sensing_config_from_rinh(double r_inh, double pilot_energy,
                                       const PathlossParams& params) {
    SensingConfig c;
    c.pilot_energy = pilot_energy;
    c.p_inh = pilot_energy * large_scale_gain(r_inh, params);
    return c;
}

PilotAssignment assign_rsa(const PointSet& users, int num_pilots, double r_inh,
                           std::uint64_t seed) {
    check_pilot_count(num_pilots);
    if (!(r_inh > 0.0)) throw std::invalid_argument("r_inh must be > 0");
    if (!users.has_marks() && !users.points.empty())
        throw std::invalid_argument("assign_rsa: users must carry marks");

    PilotAssignment out;
    out.num_pilots = num_pilots;
    out.r_inh = r_inh;
    out.pilot.assign(users.size(), kUnassigned);
    if (users.points.empty()) return out;

    Rng rng(derive_seed(seed, 2));
    const Bounds b = bounds_of(users.points);
    InhibitionGrid grid(b.min_x, b.min_y, b.max_x, b.max_y, r_inh);

    std::vector<std::uint32_t> stamp(static_cast<std::size_t>(num_pilots) + 1, 0);
    std::uint32_t tick = 0;
    std::vector<int> available;
    available.reserve(static_cast<std::size_t>(num_pilots));

    for (std::size_t idx : mark_order(users)) {
        ++tick;
        const Point2& p = users.points[idx];
        grid.stamp_blocked(p, r_inh, stamp, tick);
        available.clear();
        for (int k = 1; k <= num_pilots; ++k)
            if (stamp[static_cast<std::size_t>(k)] != tick) available.push_back(k);
        if (available.empty()) continue;
        const int pilot = available[rng.next_index(available.size())];
        out.pilot[idx] = pilot;
        grid.insert(p, pilot);
    }
    return out;
}

PilotAssignment assign_regenerative(const PointSet& users, int num_pilots, double r_inh) {
    check_pilot_count(num_pilots);
    if (!(r_inh > 0.0)) throw std::invalid_argument("r_inh must be > 0");

    PilotAssignment out;
    out.num_pilots = num_pilots;
    out.r_inh = r_inh;
    out.pilot.assign(users.size(), kUnassigned);
    if (users.points.empty()) return out;

    const Bounds b = bounds_of(users.points);
    std::vector<std::uint32_t> stamp(2, 0);
    std::uint32_t tick = 0;  // monotone across passes so stale stamps never alias
    for (int k = 1; k <= num_pilots; ++k) {
        // the per-pass grid only ever holds pilot k; entries reuse slot 1
        InhibitionGrid grid(b.min_x, b.min_y, b.max_x, b.max_y, r_inh);
        for (std::size_t i = 0; i < users.size(); ++i) {
            if (out.pilot[i] != kUnassigned) continue;
            ++tick;
            grid.stamp_blocked(users.points[i], r_inh, stamp, tick);
            if (stamp[1] == tick) continue;
            out.pilot[i] = k;
            grid.insert(users.points[i], 1);
        }
    }
    return out;
}

PilotAssignment assign_distributed(const PointSet& users, int num_pilots,
                                   const SensingConfig& config,
                                   const PathlossParams& params,
                                   std::uint64_t seed) {
    check_pilot_count(num_pilots);
    if (!(config.p_inh > 0.0)) throw std::invalid_argument("p_inh must be > 0");
    if (!users.has_marks() && !users.points.empty())
        throw std::invalid_argument("assign_distributed: users must carry marks");

    PilotAssignment out;
    out.num_pilots = num_pilots;
    out.pilot.assign(users.size(), kUnassigned);
    if (users.points.empty()) return out;

    Rng rng(derive_seed(seed, 3));
    std::vector<std::vector<Point2>> holders(static_cast<std::size_t>(num_pilots) + 1);
    std::vector<int> candidates;
    candidates.reserve(static_cast<std::size_t>(num_pilots));

    for (std::size_t idx : mark_order(users)) {
        const Point2& p = users.points[idx];
        candidates.clear();
        for (int k = 1; k <= num_pilots; ++k) {
            double power = 0.0;
            for (const Point2& h : holders[static_cast<std::size_t>(k)])
                power += config.pilot_energy * large_scale_gain((h - p).norm(), params);
            if (power <= config.p_inh) candidates.push_back(k);
        }
        if (candidates.empty()) continue;
        const int pilot = candidates[rng.next_index(candidates.size())];
        out.pilot[idx] = pilot;
        holders[static_cast<std::size_t>(pilot)].push_back(p);
    }
    return out;
}

PilotAssignment assign_random(const PointSet& users, int num_pilots, std::uint64_t seed) {
    check_pilot_count(num_pilots);
    PilotAssignment out;
    out.num_pilots = num_pilots;
    out.pilot.resize(users.size());
    Rng rng(derive_seed(seed, 4));
    for (auto& p : out.pilot)
        p = 1 + static_cast<int>(rng.next_index(static_cast<std::uint64_t>(num_pilots)));
    return out;
}

RsaDensityStats rsa_density_mc(double intensity, int num_pilots, double r_inh,
                               const CircularWindow& generate,
                               const CircularWindow& measure,
                               int trials, std::uint64_t seed) {
    check_pilot_count(num_pilots);
    if (trials <= 0) throw std::invalid_argument("trials must be >= 1");

    RsaDensityStats stats;
    const double mean = intensity * M_PI * generate.radius * generate.radius;
    constexpr double kTwoPi = 6.283185307179586476925286766559;

    std::vector<std::uint32_t> stamp(static_cast<std::size_t>(num_pilots) + 1, 0);
    std::vector<int> available;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 100 + static_cast<std::uint64_t>(t)));
        const std::uint64_t n = rng.next_poisson(mean);
        stats.total_count += n;
        InhibitionGrid grid(generate.center.x() - generate.radius,
                            generate.center.y() - generate.radius,
                            generate.center.x() + generate.radius,
                            generate.center.y() + generate.radius, r_inh);
        std::fill(stamp.begin(), stamp.end(), 0u);
        std::uint32_t tick = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            // generation order doubles as arrival order
            const double r = generate.radius * std::sqrt(rng.next_double());
            const double a = kTwoPi * rng.next_double();
            const Point2 p(generate.center.x() + r * std::cos(a),
                           generate.center.y() + r * std::sin(a));
            ++tick;
            grid.stamp_blocked(p, r_inh, stamp, tick);
            available.clear();
            for (int k = 1; k <= num_pilots; ++k)
                if (stamp[static_cast<std::size_t>(k)] != tick) available.push_back(k);
            if (available.empty()) continue;
            const int pilot = available[rng.next_index(available.size())];
            grid.insert(p, pilot);
            if (measure.contains(p)) ++stats.assigned_count;
        }
    }
    const double area = M_PI * measure.radius * measure.radius;
    stats.assigned_per_m2 =
        static_cast<double>(stats.assigned_count) / (area * static_cast<double>(trials));
    return stats;
}

double typical_assignment_mc(double intensity, int num_pilots, double r_inh,
                             const CircularWindow& generate, int trials,
                             std::uint64_t seed) {
    check_pilot_count(num_pilots);
    if (trials <= 0) throw std::invalid_argument("trials must be >= 1");

    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double mean = intensity * M_PI * generate.radius * generate.radius;
    std::uint64_t assigned_trials = 0;

    std::vector<std::uint32_t> stamp(static_cast<std::size_t>(num_pilots) + 1, 0);
    std::vector<int> available;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 7000000 + static_cast<std::uint64_t>(t)));
        const std::uint64_t n = rng.next_poisson(mean);
        const std::uint64_t typical_slot = rng.next_index(n + 1);
        InhibitionGrid grid(generate.center.x() - generate.radius,
                            generate.center.y() - generate.radius,
                            generate.center.x() + generate.radius,
                            generate.center.y() + generate.radius, r_inh);
        std::fill(stamp.begin(), stamp.end(), 0u);
        std::uint32_t tick = 0;
        for (std::uint64_t i = 0; i <= n; ++i) {
            Point2 p = generate.center;
            if (i != typical_slot) {
                const double r = generate.radius * std::sqrt(rng.next_double());
                const double a = kTwoPi * rng.next_double();
                p = Point2(generate.center.x() + r * std::cos(a),
                           generate.center.y() + r * std::sin(a));
            }
            ++tick;
            grid.stamp_blocked(p, r_inh, stamp, tick);
            available.clear();
            for (int k = 1; k <= num_pilots; ++k)
                if (stamp[static_cast<std::size_t>(k)] != tick) available.push_back(k);
            if (!available.empty()) {
                const int pilot = available[rng.next_index(available.size())];
                grid.insert(p, pilot);
                if (i == typical_slot) ++assigned_trials;
            }
            if (i == typical_slot) break;  // later arrivals cannot change its fate
        }
    }
    return static_cast<double>(assigned_trials) / trials;
}

}  // namespace pilotgrid
