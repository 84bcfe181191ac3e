#include "pilotgrid/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace pilotgrid {

Eigen::MatrixXd copilot_gains(const std::vector<Point2>& rrhs,
                              const std::vector<Point2>& users,
                              const std::vector<int>& member_indices,
                              const PathlossParams& params) {
    Eigen::MatrixXd betas(rrhs.size(), member_indices.size());
    for (Eigen::Index c = 0; c < betas.cols(); ++c) {
        const Point2& u = users[static_cast<std::size_t>(member_indices[c])];
        for (Eigen::Index r = 0; r < betas.rows(); ++r)
            betas(r, c) = large_scale_gain((rrhs[static_cast<std::size_t>(r)] - u).norm(), params);
    }
    return betas;
}

Eigen::MatrixXd estimation_quality(const Eigen::MatrixXd& betas, double pilot_energy) {
    if (betas.cols() == 0) throw std::invalid_argument("estimation_quality: empty co-pilot set");
    if (!(pilot_energy > 0.0)) throw std::invalid_argument("pilot_energy must be > 0");
    const Eigen::VectorXd denom =
        (1.0 + pilot_energy * betas.rowwise().sum().array()).matrix();
    return (pilot_energy * betas.array().square()).colwise() / denom.array();
}

Eigen::VectorXd gamma_for_set(const Eigen::MatrixXd& betas, int target, double pilot_energy) {
    if (target < 0 || target >= betas.cols())
        throw std::invalid_argument("gamma_for_set: target not in set");
    return estimation_quality(betas, pilot_energy).col(target);
}

Eigen::MatrixXd power_control(const Eigen::MatrixXd& gammas, int num_pilots) {
    if (num_pilots <= 0) throw std::invalid_argument("power_control: P must be >= 1");
    const Eigen::VectorXd row_sums = gammas.rowwise().sum();
    return (gammas.array().colwise() / (num_pilots * row_sums.array())).matrix();
}

double asymptotic_sinr(const Eigen::MatrixXd& gammas, const Eigen::MatrixXd& etas, int target) {
    const Eigen::Index n = gammas.cols();
    if (etas.rows() != gammas.rows() || etas.cols() != n)
        throw std::invalid_argument("asymptotic_sinr: gamma/eta shape mismatch");
    if (target < 0 || target >= n)
        throw std::invalid_argument("asymptotic_sinr: target not in set");
    if (n == 1) return std::numeric_limits<double>::infinity();

    const Eigen::ArrayXd g_target = gammas.col(target).array().sqrt();
    const double signal = (etas.col(target).array().sqrt() * g_target).sum();
    double interference = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (k == target) continue;
        const double term = (etas.col(k).array().sqrt() * g_target).sum();
        interference += term * term;
    }
    if (interference == 0.0) return std::numeric_limits<double>::infinity();
    return signal * signal / interference;
}

double spectral_efficiency(double sinr, double sinr_cap) {
    const double s = std::min(sinr, sinr_cap);
    return std::log2(1.0 + s);
}

namespace {

// Members of each pilot's co-pilot set, by user index.
std::vector<std::vector<int>> pilot_groups(const PilotAssignment& assignment) {
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(assignment.num_pilots) + 1);
    for (std::size_t i = 0; i < assignment.pilot.size(); ++i) {
        const int p = assignment.pilot[i];
        if (p != kUnassigned) groups[static_cast<std::size_t>(p)].push_back(static_cast<int>(i));
    }
    return groups;
}

}  // namespace

ChannelState build_channel_state(const std::vector<Point2>& rrhs,
                                 const std::vector<Point2>& users,
                                 const PilotAssignment& assignment,
                                 double pilot_energy,
                                 const PathlossParams& params) {
    ChannelState st;
    st.pilot_energy = pilot_energy;
    const Eigen::Index m = static_cast<Eigen::Index>(rrhs.size());
    const Eigen::Index n = static_cast<Eigen::Index>(users.size());
    st.beta.resize(m, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < m; ++r)
            st.beta(r, c) =
                large_scale_gain((rrhs[static_cast<std::size_t>(r)] - users[static_cast<std::size_t>(c)]).norm(), params);
    st.gamma = Eigen::MatrixXd::Zero(m, n);
    st.eta = Eigen::MatrixXd::Zero(m, n);

    for (const auto& members : pilot_groups(assignment)) {
        if (members.empty()) continue;
        Eigen::MatrixXd betas(m, static_cast<Eigen::Index>(members.size()));
        for (std::size_t c = 0; c < members.size(); ++c)
            betas.col(static_cast<Eigen::Index>(c)) = st.beta.col(members[c]);
        const Eigen::MatrixXd gammas = estimation_quality(betas, pilot_energy);
        const Eigen::MatrixXd etas = power_control(gammas, assignment.num_pilots);
        for (std::size_t c = 0; c < members.size(); ++c) {
            st.gamma.col(members[c]) = gammas.col(static_cast<Eigen::Index>(c));
            st.eta.col(members[c]) = etas.col(static_cast<Eigen::Index>(c));
        }
    }
    return st;
}

SinrReport se_metrics(const std::vector<Point2>& rrhs,
                      const std::vector<Point2>& users,
                      const PilotAssignment& assignment,
                      const CircularWindow& measure_window,
                      const SeOptions& opts) {
    const std::size_t n = users.size();
    if (assignment.pilot.size() != n)
        throw std::invalid_argument("se_metrics: assignment does not cover the user set");

    SinrReport rep;
    rep.sinr = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n),
                                         std::numeric_limits<double>::quiet_NaN());
    rep.se = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    rep.assigned.resize(n);
    for (std::size_t i = 0; i < n; ++i) rep.assigned[i] = assignment.assigned(i) ? 1 : 0;

    std::vector<std::uint8_t> in_window(n);
    for (std::size_t i = 0; i < n; ++i) in_window[i] = measure_window.contains(users[i]) ? 1 : 0;

    for (const auto& members : pilot_groups(assignment)) {
        if (members.empty()) continue;
        std::vector<int> targets;
        for (std::size_t c = 0; c < members.size(); ++c) {
            if (!opts.window_users_only || in_window[static_cast<std::size_t>(members[c])])
                targets.push_back(static_cast<int>(c));
        }
        if (targets.empty()) continue;

        const Eigen::MatrixXd betas = copilot_gains(rrhs, users, members, opts.pathloss);
        const Eigen::MatrixXd gammas = estimation_quality(betas, opts.pilot_energy);
        const Eigen::MatrixXd etas = power_control(gammas, assignment.num_pilots);
        const Eigen::MatrixXd a = etas.array().sqrt().matrix();  // sqrt(eta), RRHs x set
        const Eigen::MatrixXd g = gammas.array().sqrt().matrix();

        // cross(k, t) = sum_m sqrt(eta_mk) * sqrt(gamma_mt)
        Eigen::MatrixXd g_t(g.rows(), static_cast<Eigen::Index>(targets.size()));
        for (std::size_t c = 0; c < targets.size(); ++c)
            g_t.col(static_cast<Eigen::Index>(c)) = g.col(targets[c]);
        const Eigen::MatrixXd cross = a.transpose() * g_t;

        for (std::size_t c = 0; c < targets.size(); ++c) {
            const int t = targets[c];
            const int user = members[static_cast<std::size_t>(t)];
            const double own = cross(t, static_cast<Eigen::Index>(c));
            const double total = cross.col(static_cast<Eigen::Index>(c)).squaredNorm();
            const double interference = total - own * own;
            const double sinr = (members.size() == 1 || interference <= 0.0)
                                    ? std::numeric_limits<double>::infinity()
                                    : own * own / interference;
            rep.sinr[user] = sinr;
            rep.se[user] = spectral_efficiency(sinr, opts.sinr_cap);
        }
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (in_window[i] && rep.assigned[i]) sum += rep.se[static_cast<Eigen::Index>(i)];
    rep.sum_se = sum;
    return rep;
}

double user_sinr(const std::vector<Point2>& rrhs,
                 const std::vector<Point2>& users,
                 const PilotAssignment& assignment,
                 std::size_t user_index,
                 double pilot_energy,
                 const PathlossParams& params) {
    const int p = assignment.pilot[user_index];
    if (p == kUnassigned) return std::numeric_limits<double>::quiet_NaN();
    std::vector<int> members;
    int target = -1;
    for (std::size_t i = 0; i < assignment.pilot.size(); ++i) {
        if (assignment.pilot[i] == p) {
            if (i == user_index) target = static_cast<int>(members.size());
            members.push_back(static_cast<int>(i));
        }
    }
    const Eigen::MatrixXd betas = copilot_gains(rrhs, users, members, params);
    const Eigen::MatrixXd gammas = estimation_quality(betas, pilot_energy);
    const Eigen::MatrixXd etas = power_control(gammas, assignment.num_pilots);
    return asymptotic_sinr(gammas, etas, target);
}

}  // namespace pilotgrid
