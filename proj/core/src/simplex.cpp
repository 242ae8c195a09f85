#include "lqgibbs/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace lqg {

namespace {

constexpr double kTol = 1e-11;

// Full-tableau simplex on    minimize c^T x, T x = rhs, x >= 0
// with a starting basis of column indices `basis` (must be an identity-like
// feasible basis). Bland's rule; returns false on unboundedness.
bool run_simplex(DenseMatrix& t, std::vector<double>& rhs, std::vector<double> cost,
                 std::vector<int>& basis, double& objective, std::vector<char>& allowed) {
    const int m = t.rows();
    const int n = t.cols();

    // reduced cost row: z_j = c_j - c_B^T B^{-1} A_j; maintained by pivoting
    std::vector<double> z = cost;
    double obj = 0.0;
    for (int r = 0; r < m; ++r) {
        const double cb = cost[static_cast<std::size_t>(basis[static_cast<std::size_t>(r)])];
        if (cb == 0.0) continue;
        for (int j = 0; j < n; ++j) z[static_cast<std::size_t>(j)] -= cb * t(r, j);
        obj -= cb * rhs[static_cast<std::size_t>(r)];
    }

    for (;;) {
        int enter = -1;
        for (int j = 0; j < n; ++j) {
            if (!allowed[static_cast<std::size_t>(j)]) continue;
            if (z[static_cast<std::size_t>(j)] < -kTol) {
                enter = j;  // Bland: smallest index
                break;
            }
        }
        if (enter < 0) {
            objective = -obj;
            return true;
        }
        int leave = -1;
        double best = 0.0;
        for (int r = 0; r < m; ++r) {
            const double a = t(r, enter);
            if (a > kTol) {
                const double ratio = rhs[static_cast<std::size_t>(r)] / a;
                if (leave < 0 || ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 &&
                     basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
                    leave = r;
                    best = ratio;
                }
            }
        }
        if (leave < 0) return false;  // unbounded

        // pivot
        const double piv = t(leave, enter);
        for (int j = 0; j < n; ++j) t(leave, j) /= piv;
        rhs[static_cast<std::size_t>(leave)] /= piv;
        for (int r = 0; r < m; ++r) {
            if (r == leave) continue;
            const double f = t(r, enter);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) t(r, j) -= f * t(leave, j);
            rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(leave)];
        }
        const double zf = z[static_cast<std::size_t>(enter)];
        if (zf != 0.0) {
            for (int j = 0; j < n; ++j) z[static_cast<std::size_t>(j)] -= zf * t(leave, j);
            obj -= zf * rhs[static_cast<std::size_t>(leave)];
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }
}

}  // namespace

LpResult simplex_solve(const DenseMatrix& a, const std::vector<double>& b,
                       const std::vector<double>& c) {
    const int m = a.rows();
    const int n = a.cols();

    // tableau with artificial columns appended; rows normalized to rhs >= 0
    DenseMatrix t(m, n + m);
    std::vector<double> rhs(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) {
        const double sign = b[static_cast<std::size_t>(r)] < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) t(r, j) = sign * a(r, j);
        rhs[static_cast<std::size_t>(r)] = sign * b[static_cast<std::size_t>(r)];
        t(r, n + r) = 1.0;
    }
    std::vector<int> basis(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = n + r;

    // phase 1: minimize the artificial sum
    std::vector<double> phase1(static_cast<std::size_t>(n + m), 0.0);
    for (int r = 0; r < m; ++r) phase1[static_cast<std::size_t>(n + r)] = 1.0;
    std::vector<char> allowed(static_cast<std::size_t>(n + m), 1);
    double obj1 = 0.0;
    run_simplex(t, rhs, phase1, basis, obj1, allowed);
    if (obj1 > 1e-9) return {LpStatus::infeasible, {}, 0.0};

    // drive remaining artificials out of the basis where possible
    for (int r = 0; r < m; ++r) {
        if (basis[static_cast<std::size_t>(r)] < n) continue;
        int enter = -1;
        for (int j = 0; j < n; ++j) {
            if (std::abs(t(r, j)) > kTol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) continue;  // redundant row
        const double piv = t(r, enter);
        for (int j = 0; j < n + m; ++j) t(r, j) /= piv;
        rhs[static_cast<std::size_t>(r)] /= piv;
        for (int rr = 0; rr < m; ++rr) {
            if (rr == r) continue;
            const double f = t(rr, enter);
            if (f == 0.0) continue;
            for (int j = 0; j < n + m; ++j) t(rr, j) -= f * t(r, j);
            rhs[static_cast<std::size_t>(rr)] -= f * rhs[static_cast<std::size_t>(r)];
        }
        basis[static_cast<std::size_t>(r)] = enter;
    }
    for (int j = n; j < n + m; ++j) allowed[static_cast<std::size_t>(j)] = 0;

    // phase 2
    std::vector<double> cost(static_cast<std::size_t>(n + m), 0.0);
    for (int j = 0; j < n; ++j) cost[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)];
    double obj2 = 0.0;
    if (!run_simplex(t, rhs, cost, basis, obj2, allowed)) return {LpStatus::unbounded, {}, 0.0};

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < m; ++r)
        if (basis[static_cast<std::size_t>(r)] < n)
            x[static_cast<std::size_t>(basis[static_cast<std::size_t>(r)])] = rhs[static_cast<std::size_t>(r)];
    return {LpStatus::optimal, std::move(x), obj2};
}

MinInfNormResult min_inf_norm_solution(const DenseMatrix& a, const std::vector<double>& b) {
    const int m = a.rows();
    const int n = a.cols();
    // variables (u_0..u_{n-1}, v_0..v_{n-1}, t); x = (u - v) / 2, u_k + v_k = 2 t
    const int nvar = 2 * n + 1;
    DenseMatrix big(m + n, nvar);
    std::vector<double> rhs(static_cast<std::size_t>(m + n), 0.0);
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j < n; ++j) {
            big(r, j) = 0.5 * a(r, j);
            big(r, n + j) = -0.5 * a(r, j);
        }
        rhs[static_cast<std::size_t>(r)] = b[static_cast<std::size_t>(r)];
    }
    for (int k = 0; k < n; ++k) {
        big(m + k, k) = 1.0;
        big(m + k, n + k) = 1.0;
        big(m + k, 2 * n) = -2.0;
    }
    std::vector<double> cost(static_cast<std::size_t>(nvar), 0.0);
    cost[static_cast<std::size_t>(2 * n)] = 1.0;

    LpResult lp = simplex_solve(big, rhs, cost);
    MinInfNormResult out{lp.status, {}, 0.0};
    if (lp.status != LpStatus::optimal) return out;
    out.t = lp.objective;
    out.x.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        out.x[static_cast<std::size_t>(k)] =
            0.5 * (lp.x[static_cast<std::size_t>(k)] - lp.x[static_cast<std::size_t>(n + k)]);
    return out;
}

}  // namespace lqg
