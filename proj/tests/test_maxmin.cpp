#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pilotgrid/geometry.hpp"
#include "pilotgrid/maxmin.hpp"
#include "pilotgrid/random.hpp"

using namespace pilotgrid;

namespace {

// Brute-force max-min value over all partitions into exactly P parts with the
// size floor; exponential, test-scale only.
struct BruteResult {
    double best = -1.0;
    bool feasible_at(double t) const { return best >= t; }
};

void brute_recurse(const std::vector<Point2>& users, int user, int open, int p, int floor,
                   std::vector<int>& label, std::vector<int>& sizes, double current_min,
                   double& best) {
    const int n = static_cast<int>(users.size());
    if (current_min < best) return;
    if (user == n) {
        if (open != p) return;
        for (int c = 0; c < open; ++c)
            if (sizes[static_cast<std::size_t>(c)] < floor) return;
        best = std::max(best, current_min);
        return;
    }
    int need = (p - open) * floor;
    for (int c = 0; c < open; ++c)
        need += std::max(0, floor - sizes[static_cast<std::size_t>(c)]);
    if (need > n - user) return;

    for (int c = 0; c <= std::min(open, p - 1); ++c) {
        double new_min = current_min;
        if (c < open) {
            for (int v = 0; v < user; ++v)
                if (label[static_cast<std::size_t>(v)] == c)
                    new_min = std::min(new_min, (users[static_cast<std::size_t>(v)] -
                                                 users[static_cast<std::size_t>(user)])
                                                    .norm());
        }
        if (new_min < best) continue;
        label[static_cast<std::size_t>(user)] = c;
        ++sizes[static_cast<std::size_t>(c)];
        const int new_open = std::max(open, c + 1);
        brute_recurse(users, user + 1, new_open, p, floor, label, sizes, new_min, best);
        --sizes[static_cast<std::size_t>(c)];
    }
    label[static_cast<std::size_t>(user)] = -1;
}

double brute_maxmin(const std::vector<Point2>& users, int p, int floor) {
    std::vector<int> label(users.size(), -1), sizes(users.size() + 1, 0);
    double best = -1.0;
    brute_recurse(users, 0, 0, p, floor, label, sizes,
                  std::numeric_limits<double>::infinity(), best);
    return best;
}

std::vector<Point2> random_users(int n, double radius, std::uint64_t seed) {
    const PointSet ps = sample_uniform_disk(static_cast<std::size_t>(n),
                                            CircularWindow{Point2::Zero(), radius}, seed);
    return ps.points;
}

bool membership_valid(const PartitionInstance& inst, const std::vector<int>& membership,
                      double t) {
    std::vector<int> sizes(static_cast<std::size_t>(inst.num_partitions), 0);
    for (std::size_t i = 0; i < membership.size(); ++i) {
        if (membership[i] < 0 || membership[i] >= inst.num_partitions) return false;
        ++sizes[static_cast<std::size_t>(membership[i])];
        for (std::size_t j = i + 1; j < membership.size(); ++j)
            if (membership[i] == membership[j] &&
                (inst.users[i] - inst.users[j]).norm() < t)
                return false;
    }
    for (int s : sizes)
        if (s < inst.size_floor) return false;
    return true;
}

}  // namespace

TEST_CASE("min_copilot_distance: pairs, singletons, brute-force comparison") {
    std::vector<Point2> users = {Point2(0, 0), Point2(50, 0), Point2(0, 200)};
    CHECK(min_copilot_distance({0, 0, 1}, users) == doctest::Approx(50.0));
    CHECK(std::isinf(min_copilot_distance({0, 1, 2}, users)));

    const std::vector<Point2> rnd = random_users(12, 300.0, 5);
    std::vector<int> membership;
    for (int i = 0; i < 12; ++i) membership.push_back(i % 3);
    double brute = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rnd.size(); ++i)
        for (std::size_t j = i + 1; j < rnd.size(); ++j)
            if (membership[i] == membership[j])
                brute = std::min(brute, (rnd[i] - rnd[j]).norm());
    CHECK(min_copilot_distance(membership, rnd) == doctest::Approx(brute).epsilon(1e-15));
}

TEST_CASE("feasibility: empty conflict graph is trivially feasible") {
    PartitionInstance inst;
    inst.users = random_users(9, 200.0, 2);
    inst.num_partitions = 3;
    const FeasibilityResult res = feasibility(inst, 0.0);
    REQUIRE(res.feasible);
    CHECK(membership_valid(inst, res.membership, 0.0));
}

TEST_CASE("feasibility on four collinear users") {
    PartitionInstance inst;
    inst.users = {Point2(0, 0), Point2(1, 0), Point2(2, 0), Point2(3, 0)};
    inst.num_partitions = 2;

    const FeasibilityResult ok = feasibility(inst, 1.5);
    REQUIRE(ok.feasible);
    CHECK(membership_valid(inst, ok.membership, 1.5));
    // the only valid split at t = 1.5 pairs {0,2} and {1,3}
    CHECK(ok.membership[0] == ok.membership[2]);
    CHECK(ok.membership[1] == ok.membership[3]);

    const FeasibilityResult bad = feasibility(inst, 2.5);
    CHECK_FALSE(bad.feasible);
    CHECK(bad.resolved);
    CHECK(brute_maxmin(inst.users, 2, 2) < 2.5);  // oracle agrees
}

TEST_CASE("maxmin_assign: four collinear users reach t* = 2 within epsilon") {
    PartitionInstance inst;
    inst.users = {Point2(0, 0), Point2(1, 0), Point2(2, 0), Point2(3, 0)};
    inst.num_partitions = 2;
    inst.epsilon = 0.05;
    const PartitionResult res = maxmin_assign(inst);
    REQUIRE(res.status == PartitionStatus::optimal_within_epsilon);
    CHECK(res.t_star == doctest::Approx(2.0).epsilon(0.05));
    CHECK(min_copilot_distance(res.membership, inst.users) >= res.last_feasible_t);
}

TEST_CASE("maxmin_assign: diametrically opposite pairs on a circle") {
    PartitionInstance inst;
    const int p = 3;
    for (int i = 0; i < 2 * p; ++i) {
        const double a = M_PI * i / p;
        inst.users.emplace_back(100.0 * std::cos(a), 100.0 * std::sin(a));
    }
    inst.num_partitions = p;
    inst.epsilon = 0.5;
    const PartitionResult res = maxmin_assign(inst);
    REQUIRE(res.status == PartitionStatus::optimal_within_epsilon);
    CHECK(res.t_star == doctest::Approx(200.0).epsilon(0.01));
    CHECK(std::abs(res.t_star - brute_maxmin(inst.users, p, 2)) <= inst.epsilon);
}

TEST_CASE("maxmin_assign: P = 1 returns the global minimum pairwise distance") {
    PartitionInstance inst;
    inst.users = random_users(10, 400.0, 9);
    inst.num_partitions = 1;
    inst.epsilon = 0.25;
    const PartitionResult res = maxmin_assign(inst);
    REQUIRE(res.status == PartitionStatus::optimal_within_epsilon);
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < inst.users.size(); ++i)
        for (std::size_t j = i + 1; j < inst.users.size(); ++j)
            dmin = std::min(dmin, (inst.users[i] - inst.users[j]).norm());
    CHECK(res.t_star == doctest::Approx(dmin).epsilon(1e-12));
    for (int m : res.membership) CHECK(m == 0);
}

TEST_CASE("maxmin_assign: infeasible when the floor cannot be met") {
    PartitionInstance inst;
    inst.users = random_users(5, 200.0, 3);
    inst.num_partitions = 3;  // needs >= 6 users at floor 2
    CHECK(maxmin_assign(inst).status == PartitionStatus::infeasible);
}

TEST_CASE("maxmin_assign: near-optimal against brute force on random instances") {
    for (int inst_id = 0; inst_id < 12; ++inst_id) {
        PartitionInstance inst;
        const int n = 8 + inst_id % 5;
        const int p = 2 + inst_id % 2;
        inst.users = random_users(n, 350.0, 1000 + static_cast<std::uint64_t>(inst_id));
        inst.num_partitions = p;
        inst.epsilon = 0.5;
        const PartitionResult res = maxmin_assign(inst);
        REQUIRE(res.status == PartitionStatus::optimal_within_epsilon);
        const double brute = brute_maxmin(inst.users, p, 2);
        CHECK(res.t_star <= brute * (1.0 + 1e-12));
        CHECK(std::abs(res.t_star - brute) <= inst.epsilon);
        CHECK(membership_valid(inst, res.membership, res.last_feasible_t));
    }
}

TEST_CASE("feasibility is monotone in t") {
    PartitionInstance inst;
    inst.users = random_users(14, 300.0, 77);
    inst.num_partitions = 3;
    for (double t2 : {40.0, 90.0, 160.0, 260.0}) {
        if (feasibility(inst, t2).feasible)
            CHECK(feasibility(inst, t2 * 0.5).feasible);
    }
}

TEST_CASE("feasibility: size floor above 2") {
    PartitionInstance inst;
    inst.users = random_users(9, 300.0, 8);
    inst.num_partitions = 2;
    inst.size_floor = 4;
    const FeasibilityResult res = feasibility(inst, 10.0);
    if (res.feasible) {
        std::vector<int> sizes(2, 0);
        for (int m : res.membership) ++sizes[static_cast<std::size_t>(m)];
        CHECK(sizes[0] >= 4);
        CHECK(sizes[1] >= 4);
    }
    // 9 users cannot fill floors of 5
    inst.size_floor = 5;
    CHECK_FALSE(feasibility(inst, 0.0).feasible);
}
