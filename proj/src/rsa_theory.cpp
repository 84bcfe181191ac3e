#include "pilotgrid/rsa_theory.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pilotgrid {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Nodes/weights of n-point Gauss-Legendre on [-1, 1], by Newton iteration on
// the Legendre polynomial (standard construction, deterministic).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

// Integral over u in [1, 2] of u * a2(u)^power, with a2 the unit-circle
// intersection area. The substitution u = 2 - s^2 removes the (2-u)^(3/2)
// endpoint behavior, after which 64-point Gauss-Legendre is exact to
// machine precision for practical purposes.
double overlap_moment(int power) {
    static std::vector<double> nodes, weights;
    if (nodes.empty()) gauss_legendre(64, nodes, weights);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double s = 0.5 * (nodes[i] + 1.0);  // s in [0, 1]
        const double u = 2.0 - s * s;
        const double a2 = circle_intersection_area(u, 1.0);
        double f = u;
        for (int p = 0; p < power; ++p) f *= a2;
        sum += weights[i] * 0.5 * f * 2.0 * s;  // du = -2s ds, orientation flip
    }
    return sum;
}

struct SeriesCoefficients {
    double c2, c3;
};

SeriesCoefficients series_coefficients() {
    static const SeriesCoefficients c = [] {
        SeriesCoefficients out;
        const double j1 = overlap_moment(1);
        const double j2 = overlap_moment(2);
        out.c2 = 16.0 / kPi * j1;
        const double s3 = (std::sqrt(3.0) * kPi - 14.0 / 3.0) / 8.0;
        out.c3 = 64.0 / (kPi * kPi) * (2.0 / 3.0 * j2 - s3);
        return out;
    }();
    return c;
}

struct FitPoly {
    double b1, b2, b3, theta_inf;
    bool alt_blocking;

    double operator()(double theta) const {
        const double x = theta / theta_inf;
        if (x >= 1.0) return 0.0;
        if (x <= 0.0) return 1.0;
        const double poly = 1.0 + x * (b1 + x * (b2 + x * b3));
        const double block = alt_blocking ? (1.0 - x * x * x)
                                          : (1.0 - x) * (1.0 - x) * (1.0 - x);
        const double phi = poly * block;
        return phi > 0.0 ? phi : 0.0;
    }
};

FitPoly make_fit(const RsaKineticsOptions& opts) {
    const FitCoefficients f = fit_coefficients(opts);
    return FitPoly{f.b1, f.b2, f.b3, opts.theta_inf, opts.blocking_one_minus_x_cubed};
}

void warn_once(std::atomic<bool>& flag, const char* message) {
    if (!flag.exchange(true)) std::fprintf(stderr, "pilotgrid: warning: %s\n", message);
}

std::atomic<bool> g_warned_theta{false};
std::atomic<bool> g_warned_rs{false};

// Dormand-Prince 5(4) step for the scalar autonomous ODE y' = f(y).
template <typename F>
bool dopri_step(const F& f, double& y, double& h, double rel_tol) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const double k1 = f(y);
    const double k2 = f(y + h * a21 * k1);
    const double k3 = f(y + h * (a31 * k1 + a32 * k2));
    const double k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double k7 = f(y5);
    const double err =
        std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    const double scale = 1e-12 + rel_tol * std::max(std::abs(y), std::abs(y5));
    const double ratio = err / scale;
    if (ratio <= 1.0) {
        y = y5;
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(ratio > 1e-16 ? ratio : 1e-16, -0.2)));
        return true;
    }
    h *= std::max(0.1, 0.9 * std::pow(ratio, -0.2));
    return false;
}

}  // namespace

double circle_intersection_area(double r, double R) {
    if (r < 0.0) throw std::domain_error("circle_intersection_area: r must be >= 0");
    if (!(R > 0.0)) throw std::domain_error("circle_intersection_area: R must be > 0");
    if (r >= 2.0 * R) return 0.0;
    const double half = r / (2.0 * R);
    return 2.0 * R * R * std::acos(half) - 0.5 * r * std::sqrt(4.0 * R * R - r * r);
}

void available_area_series_coefficients(double& c2, double& c3) {
    const SeriesCoefficients c = series_coefficients();
    c2 = c.c2;
    c3 = c.c3;
}

double available_area_series(double theta) {
    const SeriesCoefficients c = series_coefficients();
    return 1.0 + theta * (-4.0 + theta * (c.c2 + theta * c.c3));
}

FitCoefficients fit_coefficients(const RsaKineticsOptions& opts) {
    const SeriesCoefficients c = series_coefficients();
    const double ti = opts.theta_inf;
    FitCoefficients f;
    if (opts.blocking_one_minus_x_cubed) {
        f.b1 = -4.0 * ti;
        f.b2 = c.c2 * ti * ti;
        f.b3 = 1.0 + c.c3 * ti * ti * ti;
    } else {
        f.b1 = 3.0 - 4.0 * ti;
        f.b2 = c.c2 * ti * ti + 6.0 - 12.0 * ti;
        f.b3 = c.c3 * ti * ti * ti + 3.0 * c.c2 * ti * ti - 24.0 * ti + 10.0;
    }
    return f;
}

double available_area_fraction(double theta, const RsaKineticsOptions& opts) {
    if (theta < 0.0) throw std::domain_error("available_area_fraction: theta must be >= 0");
    if (theta > opts.theta_inf) {
        warn_once(g_warned_theta, "coverage above the jamming limit; clamping to 0");
        return 0.0;
    }
    return make_fit(opts)(theta);
}

double coverage_at(double tau, const RsaKineticsOptions& opts) {
    if (tau < 0.0) throw std::domain_error("coverage_at: tau must be >= 0");
    if (tau < 1e-12) return tau;  // linear regime; relative error O(tau)
    const FitPoly phi = make_fit(opts);

    double theta = 0.0;
    double s = 0.0;
    double h = std::min(0.01, tau);
    while (s < tau) {
        if (phi(theta) < 1e-10) break;  // effectively jammed
        if (h > tau - s) h = tau - s;
        double h_try = h;
        if (dopri_step(phi, theta, h_try, opts.rel_tol)) s += h;
        h = h_try;
        if (h < 1e-15 * tau)
            throw std::runtime_error("coverage_at: step size underflow");
    }
    return std::min(theta, opts.theta_inf);
}

double retained_density(double lambda, double r_inh, double t, const RsaKineticsOptions& opts) {
    if (lambda < 0.0) throw std::invalid_argument("retained_density: lambda must be >= 0");
    if (!(r_inh > 0.0)) throw std::invalid_argument("retained_density: r_inh must be > 0");
    if (lambda == 0.0 || t <= 0.0) return 0.0;
    const double kappa = kPi * r_inh * r_inh / 4.0;
    const double tau = opts.rate_over_kappa ? lambda * t : kappa * lambda * t;
    return coverage_at(tau, opts) / kappa;
}

DensityModel density_curve(double lambda, double r_inh, double t_max, double step,
                           const RsaKineticsOptions& opts) {
    if (!(step > 0.0)) throw std::invalid_argument("density_curve: step must be > 0");
    if (!(t_max >= 0.0)) throw std::invalid_argument("density_curve: t_max must be >= 0");
    DensityModel m;
    m.r_inh = r_inh;
    m.kappa = kPi * r_inh * r_inh / 4.0;
    m.theta_inf = opts.theta_inf;
    m.fit = fit_coefficients(opts);
    m.lambda = lambda;
    for (double t = 0.0; t <= t_max + 0.5 * step; t += step) {
        m.t.push_back(t);
        m.rho.push_back(retained_density(lambda, r_inh, t, opts));
    }
    return m;
}

SequentialDensities sequential_densities(double lambda_u, double r_inh, int num_pilots,
                                         const RsaKineticsOptions& opts) {
    if (num_pilots < 1) throw std::invalid_argument("sequential_densities: P must be >= 1");
    if (lambda_u < 0.0) throw std::invalid_argument("sequential_densities: lambda_u must be >= 0");
    SequentialDensities out;
    double remaining = lambda_u;
    for (int j = 0; j < num_pilots; ++j) {
        const double dj = remaining > 0.0 ? retained_density(remaining, r_inh, 1.0, opts) : 0.0;
        out.per_pilot.push_back(dj);
        out.total += dj;
        remaining -= dj;
    }
    out.per_pilot_mean = out.total / num_pilots;
    return out;
}

double poisson_cdf(double mean, int n) {
    if (n < 0) return 0.0;
    long double sum = 0.0L;
    for (int k = 0; k <= n; ++k) {
        const long double logp = k * std::log(static_cast<long double>(mean)) - mean -
                                 std::lgamma(static_cast<long double>(k) + 1.0L);
        sum += std::exp(logp);
    }
    return static_cast<double>(sum > 1.0L ? 1.0L : sum);
}

double expected_inverse_count(double mean, int num_pilots) {
    if (!(mean > 0.0)) throw std::invalid_argument("expected_inverse_count: mean must be > 0");
    const int p = num_pilots;
    const int n_max =
        std::max(p + 400, static_cast<int>(std::ceil(mean + 12.0 * std::sqrt(mean))) + p + 10);
    long double numerator = 0.0L;
    long double tail = 0.0L;
    const long double log_mean = std::log(static_cast<long double>(mean));
    for (int n = p + 1; n <= n_max; ++n) {
        const long double logp =
            n * log_mean - mean - std::lgamma(static_cast<long double>(n) + 1.0L);
        const long double pmf = std::exp(logp);
        numerator += pmf / n;
        tail += pmf;
    }
    if (tail < 1e-300L) return 1.0 / (p + 1);
    return static_cast<double>(numerator / tail);
}

double expected_inverse_count_alt(double mean, int num_pilots) {
    const double cdf = poisson_cdf(mean, num_pilots);
    const double tail = 1.0 - cdf;
    if (tail <= 0.0) return 0.0;
    return (mean - cdf) / tail;
}

double assignment_probability(const AssignmentProbabilityInputs& inputs,
                              const RsaKineticsOptions& opts) {
    if (!(inputs.lambda_u >= 0.0) || !(inputs.r_s > 0.0) || inputs.num_pilots < 1)
        throw std::invalid_argument("assignment_probability: invalid inputs");
    if (inputs.r_s < 3.0 * inputs.r_inh)
        warn_once(g_warned_rs, "observation radius below 3x inhibition distance");
    if (inputs.lambda_u == 0.0) return 1.0;

    const double mean = inputs.lambda_u * kPi * inputs.r_s * inputs.r_s;
    const double p_le = poisson_cdf(mean, inputs.num_pilots);
    const double p_gt = 1.0 - p_le;
    if (p_gt <= 0.0) return 1.0;

    const SequentialDensities seq =
        sequential_densities(inputs.lambda_u, inputs.r_inh, inputs.num_pilots, opts);
    const double mean_assigned = seq.total * kPi * inputs.r_s * inputs.r_s;
    const double prob = p_le + p_gt * mean_assigned * expected_inverse_count(mean, inputs.num_pilots);
    return std::min(1.0, std::max(0.0, prob));
}

}  // namespace pilotgrid
