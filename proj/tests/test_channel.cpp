#include <doctest.h>

#include <cmath>
#include <vector>

#include "pilotgrid/channel.hpp"
#include "pilotgrid/pathloss.hpp"
#include "pilotgrid/random.hpp"

using namespace pilotgrid;

namespace {

// Straight-from-the-expression SINR evaluation, kept independent of the
// library path (plain loops, no shared helpers).
double sinr_reference(const Eigen::MatrixXd& gammas, const Eigen::MatrixXd& etas, int target) {
    double signal = 0.0;
    for (Eigen::Index m = 0; m < gammas.rows(); ++m)
        signal += std::sqrt(etas(m, target) * gammas(m, target));
    double interference = 0.0;
    for (Eigen::Index k = 0; k < gammas.cols(); ++k) {
        if (k == target) continue;
        double term = 0.0;
        for (Eigen::Index m = 0; m < gammas.rows(); ++m)
            term += std::sqrt(etas(m, k) * gammas(m, target));
        interference += term * term;
    }
    return signal * signal / interference;
}

Eigen::MatrixXd random_betas(int rrhs, int users, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd b(rrhs, users);
    for (Eigen::Index c = 0; c < users; ++c)
        for (Eigen::Index r = 0; r < rrhs; ++r)
            b(r, c) = std::pow(10.0, -12.0 + 5.0 * rng.next_double());
    return b;
}

}  // namespace

TEST_CASE("pathloss slope: l(2000) - l(1000) equals the distance-term coefficient") {
    const double slope = (43.42 - 3.1 * std::log10(40.0)) * std::log10(2.0);
    const double diff = pathloss_db(2000.0) - pathloss_db(1000.0);
    CHECK(diff == doctest::Approx(slope).epsilon(1e-12));
    CHECK(diff == doctest::Approx(11.575654).epsilon(1e-6));
}

TEST_CASE("pathloss at 1 km: two independent evaluations agree to 1e-9 dB") {
    // term-by-term re-evaluation, separate arithmetic from the library path
    const double w = 20.0, hap = 40.0, hat = 1.5, h = 5.0, fc = 0.45;
    double expected = 0.0;
    expected += 161.04;
    expected -= 7.1 * std::log10(w);
    expected += 7.5 * std::log10(h);
    expected -= (24.37 - 3.7 * (h / hap) * (h / hap)) * std::log10(hap);
    expected += (43.42 - 3.1 * std::log10(hap)) * (std::log10(1000.0) - 3.0);
    expected += 20.0 * std::log10(fc);
    const double lg = std::log10(11.75 * hat);
    expected -= 3.2 * lg * lg - 4.97;
    CHECK(pathloss_db(1000.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(pathloss_db(1000.0) - expected) < 1e-9);
    // regression lock after the hand evaluation above
    CHECK(pathloss_db(1000.0) == doctest::Approx(111.160319).epsilon(1e-6));
}

TEST_CASE("pathloss: monotone in distance; domain errors") {
    CHECK(pathloss_db(200.0) > pathloss_db(100.0));
    CHECK_THROWS_AS(pathloss_db(0.0), std::domain_error);
    CHECK_THROWS_AS(pathloss_db(-5.0), std::domain_error);
}

TEST_CASE("gain_from_db: 0 dB is unity, 30 dB is 1e-3") {
    CHECK(gain_from_db(0.0) == 1.0);
    CHECK(gain_from_db(30.0) == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("large_scale_gain: strictly decreasing over [1, 1e4] m") {
    double prev = large_scale_gain(1.0);
    for (int i = 1; i < 100; ++i) {
        const double d = std::pow(10.0, 4.0 * i / 99.0);
        const double g = large_scale_gain(d);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("large_scale_gain: sub-meter distances clamp to 1 m") {
    CHECK(large_scale_gain(0.2) == large_scale_gain(1.0));
}

TEST_CASE("estimation quality: single user with beta=1 and unit pilot energy gives 1/2") {
    Eigen::MatrixXd betas(1, 1);
    betas(0, 0) = 1.0;
    CHECK(estimation_quality(betas, 1.0)(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("estimation quality: gamma approaches beta as pilot energy grows") {
    Eigen::MatrixXd betas(1, 1);
    betas(0, 0) = 0.37;
    const double g = estimation_quality(betas, 1e12)(0, 0);
    CHECK(std::abs(g - 0.37) / 0.37 < 1e-6);
}

TEST_CASE("estimation quality: two users with equal beta at one RRH") {
    const double b = 2.5e-7, energy = 1.6e9;
    Eigen::MatrixXd betas(1, 2);
    betas << b, b;
    const Eigen::MatrixXd g = estimation_quality(betas, energy);
    const double expected = energy * b * b / (1.0 + 2.0 * energy * b);
    CHECK(g(0, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(g(0, 1) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("estimation quality: empty set and nonpositive energy rejected") {
    CHECK_THROWS_AS(estimation_quality(Eigen::MatrixXd(3, 0), 1.0), std::invalid_argument);
    Eigen::MatrixXd betas = Eigen::MatrixXd::Constant(1, 1, 1.0);
    CHECK_THROWS_AS(estimation_quality(betas, 0.0), std::invalid_argument);
}

TEST_CASE("gamma never exceeds beta") {
    const Eigen::MatrixXd betas = random_betas(6, 5, 31);
    for (double energy : {1.0, 1e6, 1e12}) {
        const Eigen::MatrixXd g = estimation_quality(betas, energy);
        CHECK(((betas - g).array() > 0.0).all());
    }
}

TEST_CASE("power control: singleton set uses 1/P at every RRH") {
    const Eigen::MatrixXd betas = random_betas(4, 1, 17);
    const Eigen::MatrixXd g = estimation_quality(betas, 1e9);
    const Eigen::MatrixXd eta = power_control(g, 8);
    for (Eigen::Index m = 0; m < 4; ++m)
        CHECK(eta(m, 0) == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
}

TEST_CASE("power control: two users with equal gamma get 1/(2P) each") {
    Eigen::MatrixXd g(2, 2);
    g << 0.3, 0.3, 1e-4, 1e-4;
    const Eigen::MatrixXd eta = power_control(g, 4);
    CHECK(eta(0, 0) == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
    CHECK(eta(1, 1) == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
}

TEST_CASE("power control: per-RRH per-pilot budget sums to 1/P within 1e-12") {
    const Eigen::MatrixXd betas = random_betas(7, 3, 23);
    const Eigen::MatrixXd g = estimation_quality(betas, 1.6e9);
    const int p = 16;
    const Eigen::MatrixXd eta = power_control(g, p);
    const Eigen::VectorXd sums = eta.rowwise().sum();
    for (Eigen::Index m = 0; m < sums.size(); ++m)
        CHECK(std::abs(sums[m] - 1.0 / p) < 1e-12);
}

TEST_CASE("asymptotic SINR: singleton set has no interference") {
    const Eigen::MatrixXd betas = random_betas(5, 1, 3);
    const Eigen::MatrixXd g = estimation_quality(betas, 1e9);
    const Eigen::MatrixXd eta = power_control(g, 2);
    CHECK(std::isinf(asymptotic_sinr(g, eta, 0)));
}

TEST_CASE("asymptotic SINR: mirror-symmetric two-user/two-RRH geometry gives 0 dB") {
    // RRHs on the users' perpendicular bisector: every gain is equal by symmetry
    const std::vector<Point2> users = {Point2(-100.0, 0.0), Point2(100.0, 0.0)};
    const std::vector<Point2> rrhs = {Point2(0.0, 60.0), Point2(0.0, -60.0)};
    const Eigen::MatrixXd betas = copilot_gains(rrhs, users, {0, 1});
    const Eigen::MatrixXd g = estimation_quality(betas, 1.6e9);
    const Eigen::MatrixXd eta = power_control(g, 2);
    for (int target : {0, 1}) {
        CHECK(asymptotic_sinr(g, eta, target) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sinr_reference(g, eta, target) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("asymptotic SINR: fixed 5-RRH/3-user instance matches the reference evaluation") {
    const Eigen::MatrixXd betas = random_betas(5, 3, 77);
    const Eigen::MatrixXd g = estimation_quality(betas, 1.6e9);
    const Eigen::MatrixXd eta = power_control(g, 3);
    for (int t = 0; t < 3; ++t) {
        const double lib = asymptotic_sinr(g, eta, t);
        const double ref = sinr_reference(g, eta, t);
        CHECK(std::abs(lib - ref) / ref < 1e-12);
    }
}

TEST_CASE("asymptotic SINR: invariant to a common scaling of gamma when eta is recomputed") {
    const Eigen::MatrixXd betas = random_betas(6, 4, 5);
    const Eigen::MatrixXd g = estimation_quality(betas, 1.6e9);
    const Eigen::MatrixXd eta = power_control(g, 4);
    const Eigen::MatrixXd g2 = 3.7 * g;
    const Eigen::MatrixXd eta2 = power_control(g2, 4);
    for (int t = 0; t < 4; ++t)
        CHECK(asymptotic_sinr(g2, eta2, t) ==
              doctest::Approx(asymptotic_sinr(g, eta, t)).epsilon(1e-12));
}

TEST_CASE("power control is unchanged by per-RRH scaling of gamma") {
    const Eigen::MatrixXd betas = random_betas(5, 3, 6);
    Eigen::MatrixXd g = estimation_quality(betas, 1.6e9);
    const Eigen::MatrixXd eta = power_control(g, 2);
    for (Eigen::Index m = 0; m < g.rows(); ++m) g.row(m) *= (1.0 + m);
    const Eigen::MatrixXd eta2 = power_control(g, 2);
    CHECK((eta - eta2).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("adding a co-pilot user never increases the target's SINR") {
    for (int inst = 0; inst < 200; ++inst) {
        Rng rng(1000 + static_cast<std::uint64_t>(inst));
        const int m = 2 + static_cast<int>(rng.next_index(6));
        const int n = 2 + static_cast<int>(rng.next_index(5));
        const Eigen::MatrixXd betas = random_betas(m, n + 1, 5000 + inst);
        const Eigen::MatrixXd small = betas.leftCols(n);
        const Eigen::MatrixXd gs = estimation_quality(small, 1.6e9);
        const Eigen::MatrixXd es = power_control(gs, 4);
        const Eigen::MatrixXd gl = estimation_quality(betas, 1.6e9);
        const Eigen::MatrixXd el = power_control(gl, 4);
        for (int t = 0; t < n; ++t) {
            const double before = asymptotic_sinr(gs, es, t);
            const double after = asymptotic_sinr(gl, el, t);
            CHECK(after <= before * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("se_metrics: all users unassigned gives zero sum SE") {
    const std::vector<Point2> rrhs = {Point2(10.0, 0.0)};
    const std::vector<Point2> users = {Point2(0.0, 0.0), Point2(50.0, 0.0)};
    PilotAssignment a;
    a.num_pilots = 2;
    a.pilot = {kUnassigned, kUnassigned};
    SeOptions opts;
    opts.pilot_energy = 1.6e9;
    const SinrReport rep = se_metrics(rrhs, users, a, CircularWindow{Point2::Zero(), 600.0}, opts);
    CHECK(rep.sum_se == 0.0);
}

TEST_CASE("se_metrics: lone assigned user hits the 40 dB cap") {
    const std::vector<Point2> rrhs = {Point2(10.0, 0.0)};
    const std::vector<Point2> users = {Point2(0.0, 0.0)};
    PilotAssignment a;
    a.num_pilots = 2;
    a.pilot = {1};
    SeOptions opts;
    opts.pilot_energy = 1.6e9;
    opts.sinr_cap = 1e4;
    const SinrReport rep = se_metrics(rrhs, users, a, CircularWindow{Point2::Zero(), 600.0}, opts);
    CHECK(rep.se[0] == doctest::Approx(std::log2(1.0 + 1e4)).epsilon(1e-14));
    CHECK(rep.sum_se == doctest::Approx(std::log2(1.0 + 1e4)).epsilon(1e-14));
}

TEST_CASE("se_metrics: sum SE equals the sum of per-user SEs inside the window") {
    Rng rng(2);
    std::vector<Point2> rrhs, users;
    for (int i = 0; i < 12; ++i)
        rrhs.emplace_back(800.0 * rng.next_double() - 400.0, 800.0 * rng.next_double() - 400.0);
    for (int i = 0; i < 20; ++i)
        users.emplace_back(1600.0 * rng.next_double() - 800.0, 1600.0 * rng.next_double() - 800.0);
    PilotAssignment a;
    a.num_pilots = 3;
    a.pilot.resize(users.size());
    for (std::size_t i = 0; i < users.size(); ++i)
        a.pilot[i] = static_cast<int>(i % 4);  // pilot 0 entries stay unassigned
    SeOptions opts;
    opts.pilot_energy = 4.8e9;
    const CircularWindow win{Point2::Zero(), 500.0};
    const SinrReport rep = se_metrics(rrhs, users, a, win, opts);
    double manual = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i)
        if (rep.assigned[i] && win.contains(users[i])) manual += rep.se[static_cast<Eigen::Index>(i)];
    CHECK(rep.sum_se == doctest::Approx(manual).epsilon(1e-14));
}

TEST_CASE("full per-RRH power budget is 1 when all P pilots are in use") {
    Rng rng(8);
    std::vector<Point2> rrhs, users;
    for (int i = 0; i < 5; ++i)
        rrhs.emplace_back(600.0 * rng.next_double(), 600.0 * rng.next_double());
    for (int i = 0; i < 12; ++i)
        users.emplace_back(900.0 * rng.next_double(), 900.0 * rng.next_double());
    PilotAssignment a;
    a.num_pilots = 4;
    a.pilot.resize(users.size());
    for (std::size_t i = 0; i < users.size(); ++i) a.pilot[i] = 1 + static_cast<int>(i % 4);
    const ChannelState st = build_channel_state(rrhs, users, a, 6.4e9);
    const Eigen::VectorXd totals = st.eta.rowwise().sum();
    for (Eigen::Index m = 0; m < totals.size(); ++m)
        CHECK(std::abs(totals[m] - 1.0) < 1e-9);
    // gamma defined only relative to a co-pilot set, never above beta
    CHECK(((st.beta - st.gamma).array() >= 0.0).all());
}

TEST_CASE("user_sinr matches asymptotic_sinr through the assignment plumbing") {
    Rng rng(12);
    std::vector<Point2> rrhs, users;
    for (int i = 0; i < 4; ++i)
        rrhs.emplace_back(500.0 * rng.next_double(), 500.0 * rng.next_double());
    for (int i = 0; i < 6; ++i)
        users.emplace_back(700.0 * rng.next_double(), 700.0 * rng.next_double());
    PilotAssignment a;
    a.num_pilots = 2;
    a.pilot = {1, 2, 1, 2, 1, 2};
    const double sinr = user_sinr(rrhs, users, a, 2, 1.6e9);
    const Eigen::MatrixXd betas = copilot_gains(rrhs, users, {0, 2, 4});
    const Eigen::MatrixXd g = estimation_quality(betas, 1.6e9);
    const Eigen::MatrixXd eta = power_control(g, 2);
    CHECK(sinr == doctest::Approx(asymptotic_sinr(g, eta, 1)).epsilon(1e-14));
}
