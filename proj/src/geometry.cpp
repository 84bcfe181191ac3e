#include "pilotgrid/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "pilotgrid/random.hpp"

namespace pilotgrid {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void PointSet::validate() const {
    if (!marks.empty()) {
        if (marks.size() != points.size())
            throw std::invalid_argument("marks/points size mismatch");
        std::unordered_set<double> seen;
        seen.reserve(marks.size());
        for (double m : marks) {
            if (!(m >= 0.0 && m <= 1.0))
                throw std::invalid_argument("mark outside [0,1]");
            if (!seen.insert(m).second)
                throw std::invalid_argument("duplicate mark");
        }
    }
}

void PointSet::validate(const CircularWindow& window) const {
    validate();
    for (const auto& p : points)
        if (!window.contains(p))
            throw std::invalid_argument("point outside window");
}

PointSet sample_ppp(double intensity, const CircularWindow& window, std::uint64_t seed) {
    if (intensity < 0.0)
        throw std::invalid_argument("intensity must be >= 0");
    if (!(window.radius > 0.0))
        throw std::invalid_argument("window radius must be > 0");

    Rng rng(derive_seed(seed, 0));
    const double mean = intensity * M_PI * window.radius * window.radius;
    const std::uint64_t n = rng.next_poisson(mean);

    PointSet out;
    out.seed = seed;
    out.points.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double r = window.radius * std::sqrt(rng.next_double());
        const double a = kTwoPi * rng.next_double();
        out.points.emplace_back(window.center.x() + r * std::cos(a),
                                window.center.y() + r * std::sin(a));
    }
    return out;
}

PointSet sample_uniform_disk(std::size_t count, const CircularWindow& window,
                             std::uint64_t seed) {
    if (!(window.radius > 0.0))
        throw std::invalid_argument("window radius must be > 0");
    Rng rng(derive_seed(seed, 6));
    PointSet out;
    out.seed = seed;
    out.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double r = window.radius * std::sqrt(rng.next_double());
        const double a = kTwoPi * rng.next_double();
        out.points.emplace_back(window.center.x() + r * std::cos(a),
                                window.center.y() + r * std::sin(a));
    }
    return out;
}

PointSet assign_marks(const PointSet& points, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 1));
    PointSet out = points;
    out.marks.resize(out.points.size());
    for (auto& m : out.marks) m = rng.next_double();
    return out;
}

PointSet crop(const PointSet& points, const CircularWindow& window) {
    PointSet out;
    out.seed = points.seed;
    const bool marked = points.has_marks();
    for (std::size_t i = 0; i < points.points.size(); ++i) {
        if (window.contains(points.points[i])) {
            out.points.push_back(points.points[i]);
            if (marked) out.marks.push_back(points.marks[i]);
        }
    }
    return out;
}

double pairwise_distance(const Point2& a, const Point2& b) {
    return (a - b).norm();
}

}  // namespace pilotgrid
