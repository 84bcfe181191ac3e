#include <doctest.h>

#include <cmath>
#include <vector>

#include "pilotgrid/assignment.hpp"
#include "pilotgrid/random.hpp"
#include "pilotgrid/rsa_theory.hpp"

using namespace pilotgrid;

namespace {

// Grid-counting oracle for the intersection area of two unit circles at
// center distance d.
double overlap_by_quadrature(double d) {
    const int n = 2500;
    const double x0 = d / 2.0;  // symmetry axis between centers at 0 and d
    double area = 0.0;
    const double cell = 2.0 / n;
    for (int i = 0; i < n; ++i) {
        const double x = x0 - 1.0 + (i + 0.5) * cell * 1.0;
        for (int j = 0; j < n; ++j) {
            const double y = -1.0 + (j + 0.5) * cell;
            const bool in_a = x * x + y * y <= 1.0;
            const double dx = x - d;
            const bool in_b = dx * dx + y * y <= 1.0;
            if (in_a && in_b) area += cell * cell;
        }
    }
    return area;
}

// Torus RSA at a target coverage, then the empirical probability that a
// uniform trial center clears every retained point by the exclusion distance.
double insertion_probability_mc(double target_theta, double box, std::uint64_t seed) {
    const double kappa = M_PI / 4.0;  // unit exclusion distance
    const int nc = static_cast<int>(box);
    const double cell = box / nc;
    std::vector<std::vector<std::pair<double, double>>> cells(
        static_cast<std::size_t>(nc) * nc);
    Rng rng(seed);
    auto torus_clear = [&](double x, double y) {
        const int cx = static_cast<int>(x / cell), cy = static_cast<int>(y / cell);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int gx = (cx + dx + nc) % nc, gy = (cy + dy + nc) % nc;
                for (const auto& q : cells[static_cast<std::size_t>(gy) * nc + gx]) {
                    double ddx = std::abs(q.first - x);
                    if (ddx > box / 2) ddx = box - ddx;
                    double ddy = std::abs(q.second - y);
                    if (ddy > box / 2) ddy = box - ddy;
                    if (ddx * ddx + ddy * ddy < 1.0) return false;
                }
            }
        return true;
    };
    const auto need = static_cast<std::size_t>(target_theta * box * box / kappa);
    std::size_t kept = 0;
    while (kept < need) {
        const double x = rng.next_double() * box, y = rng.next_double() * box;
        if (torus_clear(x, y)) {
            cells[static_cast<std::size_t>(static_cast<int>(y / cell)) * nc +
                  static_cast<int>(x / cell)]
                .push_back({x, y});
            ++kept;
        }
    }
    const int darts = 400000;
    int clear = 0;
    for (int i = 0; i < darts; ++i)
        if (torus_clear(rng.next_double() * box, rng.next_double() * box)) ++clear;
    return static_cast<double>(clear) / darts;
}

}  // namespace

TEST_CASE("circle_intersection_area: coincident and tangent circles") {
    CHECK(circle_intersection_area(0.0, 2.0) == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
    CHECK(circle_intersection_area(4.0, 2.0) == 0.0);
    CHECK(circle_intersection_area(5.0, 2.0) == 0.0);
    CHECK_THROWS_AS(circle_intersection_area(-0.1, 1.0), std::domain_error);
}

TEST_CASE("circle_intersection_area: r = R against closed form and quadrature") {
    const double closed = 2.0 * M_PI / 3.0 - std::sqrt(3.0) / 2.0;  // ~1.22837
    CHECK(circle_intersection_area(1.0, 1.0) == doctest::Approx(closed).epsilon(1e-14));
    CHECK(overlap_by_quadrature(1.0) == doctest::Approx(closed).epsilon(2e-3));
    CHECK(circle_intersection_area(1.3, 1.0) ==
          doctest::Approx(overlap_by_quadrature(1.3)).epsilon(2e-3));
}

TEST_CASE("available-area series coefficients match their closed forms") {
    double c2 = 0.0, c3 = 0.0;
    available_area_series_coefficients(c2, c3);
    CHECK(c2 == doctest::Approx(6.0 * std::sqrt(3.0) / M_PI).epsilon(1e-10));
    const double c3_closed = 40.0 / (std::sqrt(3.0) * M_PI) - 176.0 / (3.0 * M_PI * M_PI);
    CHECK(c3 == doctest::Approx(c3_closed).epsilon(1e-10));
}

TEST_CASE("fit coefficients: value and first three derivatives match the series at 0") {
    const FitCoefficients f = fit_coefficients();
    CHECK(f.b1 == doctest::Approx(3.0 - 4.0 * 0.5474).epsilon(1e-14));

    auto fit = [&](double theta) { return available_area_fraction(theta); };
    CHECK(fit(0.0) == 1.0);

    // one-sided finite differences at theta = 0 (second-order stencils)
    const double h = 1e-4;
    const double d1 = (-3.0 * fit(0.0) + 4.0 * fit(h) - fit(2 * h)) / (2.0 * h);
    CHECK(d1 == doctest::Approx(-4.0).epsilon(1e-6));

    double c2 = 0.0, c3 = 0.0;
    available_area_series_coefficients(c2, c3);
    const double d2 = (fit(0.0) - 2 * fit(h) + fit(2 * h)) / (h * h);
    CHECK(d2 / 2.0 == doctest::Approx(c2).epsilon(1e-3));
}

TEST_CASE("fit against the truncated series on [0, 0.3] within 1%") {
    for (double theta = 0.0; theta <= 0.3 + 1e-12; theta += 0.01) {
        const double fit = available_area_fraction(theta);
        const double series = available_area_series(theta);
        CHECK(std::abs(fit - series) / series < 0.01);
    }
}

TEST_CASE("available_area_fraction: boundary behavior") {
    CHECK(available_area_fraction(0.0) == 1.0);
    CHECK(available_area_fraction(0.5474) == 0.0);
    CHECK(available_area_fraction(0.6) == 0.0);  // clamped with a warning
    CHECK_THROWS_AS(available_area_fraction(-0.01), std::domain_error);
}

TEST_CASE("available_area_fraction at theta = 0.25 matches the insertion-probability oracle") {
    const double mc = insertion_probability_mc(0.25, 60.0, 31);
    const double fit = available_area_fraction(0.25);
    CHECK(std::abs(fit - mc) / mc < 0.02);
}

TEST_CASE("coverage curve: monotone, bounded by the jamming limit") {
    double prev = 0.0;
    for (double tau : {0.01, 0.1, 0.5, 1.0, 5.0, 25.0, 125.0, 625.0}) {
        const double theta = coverage_at(tau);
        CHECK(theta >= prev);
        CHECK(theta <= 0.5474);
        prev = theta;
    }
    CHECK(coverage_at(0.0) == 0.0);
    CHECK(coverage_at(1e4) == doctest::Approx(0.5474).epsilon(0.015));
}

TEST_CASE("retained_density: zero intensity and the low-coverage linear limit") {
    CHECK(retained_density(0.0, 200.0, 1.0) == 0.0);
    // kappa*lambda*t = 1e-3: retention probability is essentially 1
    const double kappa = M_PI * 200.0 * 200.0 / 4.0;
    const double lambda = 1e-3 / kappa;
    const double rho = retained_density(lambda, 200.0, 1.0);
    CHECK(std::abs(rho - lambda) / lambda < 0.005);
}

TEST_CASE("retained_density: alternative rate normalization differs by 1/kappa in time") {
    RsaKineticsOptions alt;
    alt.rate_over_kappa = true;
    const double kappa = M_PI * 100.0 * 100.0 / 4.0;
    const double lambda = 2e-4;
    // with the alternative normalization, time t corresponds to tau = lambda*t
    CHECK(retained_density(lambda, 100.0, 1.0, alt) ==
          doctest::Approx(retained_density(lambda / kappa, 100.0, 1.0)).epsilon(1e-9));
}

TEST_CASE("retained_density near saturation matches the Algorithm-1 oracle within 2%") {
    const double lambda = 1e-3, r = 200.0;
    const double kappa = M_PI * r * r / 4.0;
    const double theory = kappa * retained_density(lambda, r, 1.0);
    const CircularWindow gen{Point2::Zero(), 1500.0}, meas{Point2::Zero(), 600.0};
    const RsaDensityStats mc = rsa_density_mc(lambda, 1, r, gen, meas, 2000, 606);
    const double sim = kappa * mc.assigned_per_m2;
    CHECK(std::abs(theory - sim) / sim < 0.02);
}

TEST_CASE("density_curve: tabulation contract") {
    CHECK_THROWS_AS(density_curve(1e-4, 200.0, 1.0, 0.0), std::invalid_argument);
    const DensityModel m = density_curve(1e-4, 200.0, 1.0, 0.1);
    REQUIRE(m.t.size() == 11);
    CHECK(m.rho.front() == 0.0);
    for (std::size_t i = 1; i < m.rho.size(); ++i) CHECK(m.rho[i] >= m.rho[i - 1]);
    CHECK(m.kappa == doctest::Approx(M_PI * 1e4).epsilon(1e-15));
    for (std::size_t i = 0; i < m.rho.size(); ++i) CHECK(m.kappa * m.rho[i] <= 0.5474);
}

TEST_CASE("sequential_densities: P = 1 reduces to the single-pilot density") {
    const double one = retained_density(1e-4, 150.0, 1.0);
    const SequentialDensities seq = sequential_densities(1e-4, 150.0, 1);
    CHECK(seq.per_pilot_mean == doctest::Approx(one).epsilon(1e-12));
    CHECK(seq.total == doctest::Approx(one).epsilon(1e-12));
}

TEST_CASE("sequential_densities: everything assigned and split equally as lambda -> 0") {
    const double lambda = 1e-9;
    const SequentialDensities seq = sequential_densities(lambda, 200.0, 4);
    CHECK(seq.per_pilot_mean == doctest::Approx(lambda / 4.0).epsilon(5e-3));
}

TEST_CASE("sequential_densities: nonnegative, never exceeding the input intensity") {
    const SequentialDensities seq = sequential_densities(1e-5, 300.0, 16);
    double total = 0.0;
    for (double d : seq.per_pilot) {
        CHECK(d >= 0.0);
        total += d;
    }
    CHECK(total <= 1e-5 * (1.0 + 1e-9));
    CHECK(seq.total == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("sequential_densities: P = 4 near saturation within 5% of the paired simulation") {
    const double lambda = 1e-3, r = 200.0;
    const SequentialDensities seq = sequential_densities(lambda, r, 4);
    const CircularWindow gen{Point2::Zero(), 1500.0}, meas{Point2::Zero(), 600.0};
    const RsaDensityStats mc = rsa_density_mc(lambda, 4, r, gen, meas, 500, 19);
    CHECK(std::abs(seq.total - mc.assigned_per_m2) / mc.assigned_per_m2 < 0.05);
}

TEST_CASE("expected_inverse_count: large-mean limit and strict bound") {
    CHECK(expected_inverse_count(1e4, 4) * 1e4 == doctest::Approx(1.0).epsilon(0.002));
    for (double mean : {0.1, 1.0, 3.0, 10.0, 50.0})
        for (int p : {0, 1, 2, 5, 16})
            CHECK(expected_inverse_count(mean, p) < 1.0 / (p + 1));
    CHECK_THROWS_AS(expected_inverse_count(0.0, 1), std::invalid_argument);
}

TEST_CASE("expected_inverse_count: P = 0, mean = 1 against extended-precision summation") {
    // independent oracle: direct summation in long double
    long double numerator = 0.0L, tail = 0.0L, factorial = 1.0L;
    for (int n = 1; n <= 60; ++n) {
        factorial *= n;
        const long double pmf = std::exp(-1.0L) / factorial;
        numerator += pmf / n;
        tail += pmf;
    }
    const double oracle = static_cast<double>(numerator / tail);
    CHECK(oracle == doctest::Approx(0.767055).epsilon(1e-5));  // frozen from the oracle
    CHECK(expected_inverse_count(1.0, 0) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("expected_inverse_count_alt reproduces its stated closed form") {
    const double mean = 10.0;
    const int p = 2;
    const double cdf = poisson_cdf(mean, p);
    CHECK(expected_inverse_count_alt(mean, p) ==
          doctest::Approx((mean - cdf) / (1.0 - cdf)).epsilon(1e-12));
    // the alternative form grows with the mean instead of shrinking
    CHECK(expected_inverse_count_alt(1e4, 2) > 1.0);
}

TEST_CASE("assignment_probability: sparse regime is essentially certain") {
    AssignmentProbabilityInputs in;
    in.lambda_u = 1e-7;  // mean count 0.11 << P
    in.r_inh = 200.0;
    in.num_pilots = 4;
    in.r_s = 600.0;
    CHECK(assignment_probability(in) >= 0.99);
}

TEST_CASE("assignment_probability: P = 1 saturation point against the Monte Carlo oracle") {
    AssignmentProbabilityInputs in;
    in.lambda_u = 1e-3;
    in.r_inh = 200.0;
    in.num_pilots = 1;
    in.r_s = 600.0;
    const double theory = assignment_probability(in);
    const double mc = typical_assignment_mc(1e-3, 1, 200.0,
                                            CircularWindow{Point2::Zero(), 1500.0}, 10000, 5);
    CHECK(std::abs(theory - mc) < 0.03);
}

TEST_CASE("assignment_probability: monotone nondecreasing in P and inside [0, 1]") {
    for (double lambda : {1e-4, 1e-3})
        for (double r : {100.0, 200.0}) {
            double prev = 0.0;
            for (int p = 1; p <= 16; ++p) {
                AssignmentProbabilityInputs in{lambda, r, p, 600.0};
                const double v = assignment_probability(in);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                CHECK(v >= prev - 1e-12);
                prev = v;
            }
        }
}
