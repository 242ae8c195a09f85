#pragma once

#include <vector>

#include "lqgibbs/linalg.hpp"

namespace lqg {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status;
    std::vector<double> x;
    double objective = 0.0;
};

/// Dense two-phase primal simplex with Bland's rule for
///   minimize c^T x  subject to  A x = b,  x >= 0.
LpResult simplex_solve(const DenseMatrix& a, const std::vector<double>& b,
                       const std::vector<double>& c);

/// Chebyshev feasibility problem
///   minimize t  subject to  A x = b,  |x_k| <= t,
/// solved in standard form via u = t + x >= 0, v = t - x >= 0.
struct MinInfNormResult {
    LpStatus status;
    std::vector<double> x;
    double t = 0.0;
};

MinInfNormResult min_inf_norm_solution(const DenseMatrix& a, const std::vector<double>& b);

}  // namespace lqg
