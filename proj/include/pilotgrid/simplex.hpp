#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pilotgrid {

// max c'x  s.t.  A x = b,  0 <= x <= upper.
struct LpProblem {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    Eigen::VectorXd upper;
};

enum class LpStatus { optimal, iteration_limit, singular_basis };

struct LpSolution {
    LpStatus status = LpStatus::optimal;
    Eigen::VectorXd x;
    Eigen::VectorXd duals;  // y with B' y = c_B at optimality
    double objective = 0.0;
    std::vector<int> basis;
};

// Bounded-variable revised simplex (Dantzig pricing, Bland fallback after a
// degenerate stall). `initial_basis` must index an invertible square submatrix
// whose basic solution, with every nonbasic variable at lower bound 0, is
// primal feasible.
LpSolution solve_bounded_lp(const LpProblem& problem, const std::vector<int>& initial_basis);

}  // namespace pilotgrid
