#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pilotgrid/geometry.hpp"
#include "pilotgrid/random.hpp"

using namespace pilotgrid;

namespace {
const CircularWindow kBig{Point2::Zero(), 1500.0};
}

TEST_CASE("sample_ppp: zero intensity gives an empty set") {
    const PointSet ps = sample_ppp(0.0, kBig, 7);
    CHECK(ps.points.empty());
    CHECK_FALSE(ps.has_marks());
}

TEST_CASE("sample_ppp rejects negative intensity and bad windows") {
    CHECK_THROWS_AS(sample_ppp(-1e-6, kBig, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_ppp(1e-6, CircularWindow{Point2::Zero(), 0.0}, 1),
                    std::invalid_argument);
}

TEST_CASE("sample_ppp: sample mean count over 1e4 seeds matches lambda*pi*R^2 within 1%") {
    const double lambda = 1e-3;
    const double expected = lambda * M_PI * 1500.0 * 1500.0;  // ~7068.6
    double total = 0.0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s)
        total += static_cast<double>(sample_ppp(lambda, kBig, static_cast<std::uint64_t>(s)).size());
    const double mean = total / seeds;
    CHECK(std::abs(mean - expected) / expected < 0.01);
}

TEST_CASE("sample_ppp: identical seed and parameters reproduce bitwise-identical points") {
    const PointSet a = sample_ppp(5e-5, kBig, 1234);
    const PointSet b = sample_ppp(5e-5, kBig, 1234);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.points[i].x() == b.points[i].x());
        CHECK(a.points[i].y() == b.points[i].y());
    }
    const PointSet c = sample_ppp(5e-5, kBig, 1235);
    CHECK(a.size() != c.size());  // different seed, overwhelmingly
}

TEST_CASE("sample_ppp: translating the window translates every point (same seed)") {
    const CircularWindow shifted{Point2(250.0, -400.0), 1500.0};
    const PointSet a = sample_ppp(2e-5, kBig, 99);
    const PointSet b = sample_ppp(2e-5, shifted, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b.points[i].x() == a.points[i].x() + 250.0);
        CHECK(b.points[i].y() == a.points[i].y() - 400.0);
    }
}

TEST_CASE("sample_ppp: points lie inside the window") {
    const PointSet ps = sample_ppp(1e-4, kBig, 5);
    for (const auto& p : ps.points) CHECK(kBig.contains(p));
}

TEST_CASE("assign_marks: empty set stays empty") {
    const PointSet ps = assign_marks(PointSet{}, 3);
    CHECK(ps.points.empty());
    CHECK(ps.marks.empty());
}

TEST_CASE("assign_marks: Kolmogorov-Smirnov statistic below the 1% critical value") {
    PointSet ps;
    ps.points.assign(100000, Point2::Zero());
    ps = assign_marks(ps, 2024);
    std::vector<double> marks = ps.marks;
    std::sort(marks.begin(), marks.end());
    double ks = 0.0;
    const double n = static_cast<double>(marks.size());
    for (std::size_t i = 0; i < marks.size(); ++i) {
        const double lo = i / n, hi = (i + 1) / n;
        ks = std::max(ks, std::max(std::abs(marks[i] - lo), std::abs(marks[i] - hi)));
    }
    CHECK(ks < 1.63 / std::sqrt(n));  // K-S critical value at alpha = 0.01
}

TEST_CASE("assign_marks: marks are distinct; duplicates fail validation") {
    PointSet ps;
    ps.points.assign(5000, Point2::Zero());
    ps = assign_marks(ps, 11);
    CHECK_NOTHROW(ps.validate());
    std::set<double> uniq(ps.marks.begin(), ps.marks.end());
    CHECK(uniq.size() == ps.marks.size());

    ps.marks[1] = ps.marks[0];
    CHECK_THROWS_AS(ps.validate(), std::invalid_argument);
}

TEST_CASE("assign_marks is reproducible and keyed separately from locations") {
    PointSet base = sample_ppp(1e-5, kBig, 42);
    const PointSet a = assign_marks(base, 7);
    const PointSet b = assign_marks(base, 7);
    CHECK(a.marks == b.marks);
    const PointSet c = assign_marks(base, 8);
    CHECK(a.marks != c.marks);
    CHECK(a.points[0] == base.points[0]);  // locations untouched
}

TEST_CASE("crop: original window is the identity") {
    const PointSet ps = assign_marks(sample_ppp(1e-5, kBig, 13), 13);
    const PointSet cropped = crop(ps, kBig);
    CHECK(cropped.size() == ps.size());
    CHECK(cropped.marks == ps.marks);
}

TEST_CASE("crop: point at exactly the radius is kept (closed disk)") {
    PointSet ps;
    ps.points.emplace_back(600.0, 0.0);
    ps.points.emplace_back(600.0 + 1e-9, 0.0);
    const PointSet cropped = crop(ps, CircularWindow{Point2::Zero(), 600.0});
    REQUIRE(cropped.size() == 1);
    CHECK(cropped.points[0].x() == 600.0);
}

TEST_CASE("crop: count ratio approaches the area ratio (600/1500)^2") {
    const CircularWindow inner{Point2::Zero(), 600.0};
    double total = 0.0, kept = 0.0;
    for (int s = 0; s < 300; ++s) {
        const PointSet ps = sample_ppp(2e-4, kBig, 9000 + static_cast<std::uint64_t>(s));
        total += static_cast<double>(ps.size());
        kept += static_cast<double>(crop(ps, inner).size());
    }
    const double ratio = kept / total;
    CHECK(std::abs(ratio - 0.16) / 0.16 < 0.02);
}

TEST_CASE("pairwise distance: symmetric, nonnegative, zero iff identical") {
    const Point2 a(3.0, -4.0), b(-1.0, 2.5);
    CHECK(pairwise_distance(a, b) == pairwise_distance(b, a));
    CHECK(pairwise_distance(a, b) > 0.0);
    CHECK(pairwise_distance(a, a) == 0.0);
}

TEST_CASE("sample_uniform_disk: exact count, inside window, deterministic") {
    const CircularWindow disk{Point2::Zero(), 400.0};
    const PointSet a = sample_uniform_disk(48, disk, 3);
    const PointSet b = sample_uniform_disk(48, disk, 3);
    REQUIRE(a.size() == 48);
    for (const auto& p : a.points) CHECK(disk.contains(p));
    CHECK(a.points == b.points);
}

TEST_CASE("validate flags points outside the window") {
    PointSet ps;
    ps.points.emplace_back(700.0, 0.0);
    CHECK_THROWS_AS(ps.validate(CircularWindow{Point2::Zero(), 600.0}),
                    std::invalid_argument);
}
