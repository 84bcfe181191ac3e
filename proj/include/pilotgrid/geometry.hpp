#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace pilotgrid {

using Point2 = Eigen::Vector2d;

// Closed disk observation window.
struct CircularWindow {
    Point2 center = Point2::Zero();
    double radius = 0.0;

    bool contains(const Point2& p) const {
        return (p - center).squaredNorm() <= radius * radius;
    }
};

// Ordered planar point set with optional U(0,1) marks.
// Marks, when present, correspond index-wise to points.
struct PointSet {
    std::vector<Point2> points;
    std::vector<double> marks;  // empty or same size as points
    std::uint64_t seed = 0;

    std::size_t size() const { return points.size(); }
    bool has_marks() const { return !marks.empty(); }

    // Throws std::invalid_argument on mark/point size mismatch, marks outside
    // [0,1], duplicate marks, or (when a window is given) points outside it.
    void validate() const;
    void validate(const CircularWindow& window) const;
};

// Homogeneous Poisson process on a disk. Locations are i.i.d. uniform via
// inverse-CDF radius (r = R*sqrt(u)) plus uniform angle.
PointSet sample_ppp(double intensity, const CircularWindow& window, std::uint64_t seed);

// Fixed number of i.i.d. uniform points on the disk (binomial point process).
PointSet sample_uniform_disk(std::size_t count, const CircularWindow& window,
                             std::uint64_t seed);

// Fresh independent U(0,1) marks; locations untouched. Keyed by a seed derived
// from `seed` so that the same locations can be re-marked reproducibly.
PointSet assign_marks(const PointSet& points, std::uint64_t seed);

// Subset inside `window` (closed disk), order preserved. Marks follow points.
PointSet crop(const PointSet& points, const CircularWindow& window);

double pairwise_distance(const Point2& a, const Point2& b);

}  // namespace pilotgrid
