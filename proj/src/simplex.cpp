#include "pilotgrid/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pilotgrid {

namespace {
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr int kMaxIterations = 200000;
constexpr int kStallLimit = 64;  // degenerate steps before switching to Bland
}  // namespace

LpSolution solve_bounded_lp(const LpProblem& problem, const std::vector<int>& initial_basis) {
    const int m = static_cast<int>(problem.a.rows());
    const int n = static_cast<int>(problem.a.cols());
    if (static_cast<int>(initial_basis.size()) != m)
        throw std::invalid_argument("solve_bounded_lp: basis size must equal row count");

    std::vector<int> basis = initial_basis;
    std::vector<bool> is_basic(n, false);
    std::vector<bool> at_upper(n, false);
    for (int j : basis) is_basic[j] = true;

    LpSolution sol;
    sol.x = Eigen::VectorXd::Zero(n);

    Eigen::MatrixXd bmat(m, m);
    Eigen::VectorXd xb(m), y(m), w(m);

    int stall = 0;
    bool bland = false;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        for (int i = 0; i < m; ++i) bmat.col(i) = problem.a.col(basis[i]);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
        {
            // singularity guard: |diag(U)| too small
            const Eigen::VectorXd diag = lu.matrixLU().diagonal();
            for (int i = 0; i < m; ++i)
                if (std::abs(diag[i]) < 1e-13) {
                    sol.status = LpStatus::singular_basis;
                    return sol;
                }
        }

        // primal point: basic values given nonbasic at their bounds
        Eigen::VectorXd rhs = problem.b;
        for (int j = 0; j < n; ++j)
            if (!is_basic[j] && at_upper[j]) rhs -= problem.a.col(j) * problem.upper[j];
        xb = lu.solve(rhs);

        // duals and reduced costs
        Eigen::VectorXd cb(m);
        for (int i = 0; i < m; ++i) cb[i] = problem.c[basis[i]];
        y = lu.transpose().solve(cb);

        int entering = -1;
        double best_violation = bland ? 0.0 : kDualTol;
        bool entering_increases = true;
        for (int j = 0; j < n; ++j) {
            if (is_basic[j]) continue;
            const double d = problem.c[j] - y.dot(problem.a.col(j));
            if (!at_upper[j] && d > kDualTol) {
                if (bland) {
                    entering = j;
                    entering_increases = true;
                    break;
                }
                if (d > best_violation) {
                    best_violation = d;
                    entering = j;
                    entering_increases = true;
                }
            } else if (at_upper[j] && d < -kDualTol) {
                if (bland) {
                    entering = j;
                    entering_increases = false;
                    break;
                }
                if (-d > best_violation) {
                    best_violation = -d;
                    entering = j;
                    entering_increases = false;
                }
            }
        }

        if (entering < 0) {
            // optimal: assemble solution
            for (int j = 0; j < n; ++j)
                if (!is_basic[j]) sol.x[j] = at_upper[j] ? problem.upper[j] : 0.0;
            for (int i = 0; i < m; ++i) sol.x[basis[i]] = xb[i];
            sol.duals = y;
            sol.objective = problem.c.dot(sol.x);
            sol.basis = basis;
            sol.status = LpStatus::optimal;
            return sol;
        }

        w = lu.solve(problem.a.col(entering));

        // ratio test; `step` is the magnitude of the entering variable's move
        double step = problem.upper[entering];
        int leaving_pos = -1;       // position in basis
        bool leaving_to_upper = false;
        const double sign = entering_increases ? 1.0 : -1.0;
        for (int i = 0; i < m; ++i) {
            const double wi = sign * w[i];  // basic value changes by -step*wi
            const int bj = basis[i];
            if (wi > kPivotTol) {
                const double t = xb[i] / wi;
                if (t < step - 1e-12 || (std::abs(t - step) <= 1e-12 &&
                                         (leaving_pos < 0 || bj < basis[leaving_pos]))) {
                    step = std::max(0.0, t);
                    leaving_pos = i;
                    leaving_to_upper = false;
                }
            } else if (wi < -kPivotTol) {
                const double t = (problem.upper[bj] - xb[i]) / (-wi);
                if (t < step - 1e-12 || (std::abs(t - step) <= 1e-12 &&
                                         (leaving_pos < 0 || bj < basis[leaving_pos]))) {
                    step = std::max(0.0, t);
                    leaving_pos = i;
                    leaving_to_upper = true;
                }
            }
        }

        if (step <= 1e-12) {
            if (++stall > kStallLimit) bland = true;
        } else {
            stall = 0;
        }

        if (leaving_pos < 0) {
            // bound-to-bound flip of the entering variable
            at_upper[entering] = entering_increases;
            continue;
        }

        const int leaving = basis[leaving_pos];
        is_basic[leaving] = false;
        at_upper[leaving] = leaving_to_upper;
        basis[leaving_pos] = entering;
        is_basic[entering] = true;
        // entering leaves its bound; when it was at upper it is now interior
        at_upper[entering] = false;
    }

    sol.status = LpStatus::iteration_limit;
    return sol;
}

}  // namespace pilotgrid
