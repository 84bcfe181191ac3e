#pragma once

#include <cstdint>
#include <vector>

namespace pilotgrid {

// Options for the inhibition-process kinetics. The defaults integrate
//   d rho / dt = lambda * Phi(kappa * rho),
// whose low-density limit is rho(t) = lambda*t (every early arrival retained).
// The two flags reproduce alternative conventions for comparison runs: an
// extra 1/kappa on the arrival rate, and a (1 - x^3) blocking factor in the
// fitted available-area function instead of (1 - x)^3.
struct RsaKineticsOptions {
    double theta_inf = 0.5474;          // jamming coverage fraction for disks
    bool rate_over_kappa = false;       // d rho/dt = (lambda/kappa) * Phi
    bool blocking_one_minus_x_cubed = false;
    double rel_tol = 1e-8;              // ODE relative tolerance
};

// Area of intersection of two circles of radius R whose centers are r apart:
// 2 R^2 acos(r/2R) - (r/2) sqrt(4R^2 - r^2) for r <= 2R, else 0.
double circle_intersection_area(double r, double R);

// Coefficients of the fitted available-area function
//   Phi_fit(x) = (1 + b1 x + b2 x^2 + b3 x^3) * (1 - x)^3,  x = theta/theta_inf,
// chosen so its Taylor series in theta matches the third-order expansion of
// the exact available-area fraction. Deterministic closed-form solve.
struct FitCoefficients {
    double b1 = 0.0, b2 = 0.0, b3 = 0.0;
};
FitCoefficients fit_coefficients(const RsaKineticsOptions& opts = {});

// Third-order series of the available-area fraction in the coverage theta:
//   1 - 4 theta + C2 theta^2 + C3 theta^3,
// with C2, C3 evaluated from circle-intersection integrals.
double available_area_series(double theta);
void available_area_series_coefficients(double& c2, double& c3);

// Fitted available-area fraction at coverage theta in [0, theta_inf]. Values
// above theta_inf are clamped to available area 0 (with a one-shot warning).
double available_area_fraction(double theta, const RsaKineticsOptions& opts = {});

// Coverage theta(tau) of the canonical unit-rate process d theta/d tau = Phi(theta).
double coverage_at(double tau, const RsaKineticsOptions& opts = {});

// Retained-point density after observing the process at time t, for arrivals
// of intensity lambda per unit area per unit time and inhibition distance r_inh.
double retained_density(double lambda, double r_inh, double t,
                        const RsaKineticsOptions& opts = {});

struct DensityModel {
    double r_inh = 0.0;
    double kappa = 0.0;        // pi r_inh^2 / 4
    double theta_inf = 0.5474;
    FitCoefficients fit;
    double lambda = 0.0;       // arrival intensity the curve was computed for
    std::vector<double> t;     // tabulation grid
    std::vector<double> rho;   // retained density at each t
};

// Tabulated rho(t) on t = 0, step, 2*step, ..., t_max.
DensityModel density_curve(double lambda, double r_inh, double t_max, double step,
                           const RsaKineticsOptions& opts = {});

// Per-pilot retained densities of the sequential scheme: pilot 1 packs at the
// full intensity, pilot j at the intensity left over from pilots 1..j-1 (the
// leftover process is treated as Poisson). Negative leftovers truncate to 0.
struct SequentialDensities {
    std::vector<double> per_pilot;   // lambda-tilde_j, j = 1..P
    double per_pilot_mean = 0.0;     // sum / P
    double total = 0.0;              // sum over pilots
};
SequentialDensities sequential_densities(double lambda_u, double r_inh, int num_pilots,
                                         const RsaKineticsOptions& opts = {});

// Exact E[1/N | N > P] for N ~ Poisson(mean), by truncated series.
double expected_inverse_count(double mean, int num_pilots);

// Documentation-only variant reproducing the alternative closed form
// (mean - P[N <= P]) / P[N > P]; kept for side-by-side comparison.
double expected_inverse_count_alt(double mean, int num_pilots);

double poisson_cdf(double mean, int n);

struct AssignmentProbabilityInputs {
    double lambda_u = 0.0;   // users per m^2
    double r_inh = 0.0;      // meters
    int num_pilots = 1;
    double r_s = 600.0;      // observation radius, meters
};

// P[typical user gets a pilot] =
//   P[N <= P] + P[N > P] * (P * lambda_phi_uo * pi R_s^2) * E[1/N | N > P],
// clamped to [0, 1]. Warns once if r_s < 3 r_inh.
double assignment_probability(const AssignmentProbabilityInputs& inputs,
                              const RsaKineticsOptions& opts = {});

}  // namespace pilotgrid
