#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "pilotgrid/geometry.hpp"
#include "pilotgrid/pathloss.hpp"

namespace pilotgrid {

// Pilot indices are 1..P; 0 means "no pilot assigned".
constexpr int kUnassigned = 0;

struct PilotAssignment {
    std::vector<int> pilot;  // per user, 0 or 1..P
    int num_pilots = 0;      // P
    double r_inh = 0.0;      // inhibition distance, 0 when not applicable

    std::size_t size() const { return pilot.size(); }
    bool assigned(std::size_t i) const { return pilot[i] != kUnassigned; }
};

// Large-scale gains for one co-pilot set: rows = RRHs, cols = set members.
Eigen::MatrixXd copilot_gains(const std::vector<Point2>& rrhs,
                              const std::vector<Point2>& users,
                              const std::vector<int>& member_indices,
                              const PathlossParams& params = {});

// Channel-estimation quality per (RRH, member):
//   gamma_mk = tau*rho * beta_mk^2 / (1 + tau*rho * sum_j beta_mj),
// the sum running over the whole co-pilot set including k.
Eigen::MatrixXd estimation_quality(const Eigen::MatrixXd& betas, double pilot_energy);

// Convenience form: gamma of a single set member, one value per RRH.
Eigen::VectorXd gamma_for_set(const Eigen::MatrixXd& betas, int target, double pilot_energy);

// Distributed power control over a co-pilot set:
//   eta_mk = gamma_mk / (P * sum_j gamma_mj),
// so that each RRH spends exactly 1/P on the set.
Eigen::MatrixXd power_control(const Eigen::MatrixXd& gammas, int num_pilots);

// Large-antenna-limit SINR of `target` within its co-pilot set. The
// interference term pairs the interferer powers eta_mk with the target's own
// estimation quality gamma_m,target. A singleton set has no interference and
// returns +infinity.
double asymptotic_sinr(const Eigen::MatrixXd& gammas, const Eigen::MatrixXd& etas, int target);

// log2(1 + min(sinr, cap)); cap keeps singleton sets finite.
double spectral_efficiency(double sinr, double sinr_cap);

inline double sinr_cap_from_db(double cap_db) { return std::pow(10.0, cap_db / 10.0); }

struct ChannelState {
    Eigen::MatrixXd beta;   // RRHs x users
    Eigen::MatrixXd gamma;  // zero where unassigned
    Eigen::MatrixXd eta;    // zero where unassigned
    double pilot_energy = 0.0;
};

ChannelState build_channel_state(const std::vector<Point2>& rrhs,
                                 const std::vector<Point2>& users,
                                 const PilotAssignment& assignment,
                                 double pilot_energy,
                                 const PathlossParams& params = {});

struct SinrReport {
    Eigen::VectorXd sinr;            // linear, +inf for singleton sets, NaN if not evaluated
    Eigen::VectorXd se;              // bits/s/Hz, 0 when unassigned
    std::vector<std::uint8_t> assigned;
    double sum_se = 0.0;             // over users inside the measurement window
};

struct SeOptions {
    double pilot_energy = 0.0;       // tau_p * rho_p, linear
    double sinr_cap = 1e4;           // 40 dB default
    PathlossParams pathloss{};
    bool window_users_only = false;  // evaluate SINR only where the sum needs it
};

// Per-user SINR/SE for a realization under `assignment`; sum SE is taken over
// the users inside `measure_window`.
SinrReport se_metrics(const std::vector<Point2>& rrhs,
                      const std::vector<Point2>& users,
                      const PilotAssignment& assignment,
                      const CircularWindow& measure_window,
                      const SeOptions& opts);

// SINR of one user only (cheap path for typical-user experiments).
double user_sinr(const std::vector<Point2>& rrhs,
                 const std::vector<Point2>& users,
                 const PilotAssignment& assignment,
                 std::size_t user_index,
                 double pilot_energy,
                 const PathlossParams& params = {});

}  // namespace pilotgrid
