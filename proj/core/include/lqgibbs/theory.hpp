#pragma once

#include <span>
#include <vector>

#include "lqgibbs/errors.hpp"

namespace lqg {
namespace theory {

/// Nodal overshoot of the L^1-best approximation of 1 on the two-element mesh
/// (0,1-h), (1-h,1): 1 for h <= 0.5, sqrt(2h) otherwise.
double alpha_two_element_l1(double h);

/// The alpha > 1 root of
///   0 = -(1-h) a^2 q (a-1)^{q-1} - h (a q + 1)(a-1)^q + h,  1 < q < inf,
/// located by bisection to 1e-13.
double alpha_two_element_lq(double h, double q);

/// Backward recursion theta_N = 0,
/// theta_i^2 = (1 - (2(1-theta_{i+1})^2 - 1) h_{i+1}/h_i) / 2, with
/// M the largest index where theta_i >= 1 - 1/sqrt(2). theta entries are NaN
/// once the recursion leaves [0,1) (recorded as infeasible at that index).
struct ThetaSchedule {
    std::vector<double> theta;     // theta[i-1] = theta_i, i = 1..N
    std::vector<bool> feasible;    // feasible[i-1]: h_i >= (2(1-theta_{i+1})^2-1) h_{i+1}
    int M = 0;

    /// The graded condition h_i >= ... holds for all i = max(M,1)..N-1.
    bool graded_condition_holds() const;
};

ThetaSchedule theta_schedule(std::span<const double> h);

enum class OvershootVerdict { SUFFICIENT_MINLAST, SUFFICIENT_GRADED, UNKNOWN };

/// Sufficient conditions for an overshoot-free L^1-best approximation of 1:
/// the last element no larger than all others, or the graded recursion.
/// Neither condition being met proves nothing, hence UNKNOWN.
OvershootVerdict check_no_overshoot_l1(std::span<const double> h);

/// Overshoot value sqrt(2 h_last / (h_last + h_prev)) at the second-to-last
/// node when only the last element is oversized.
double interior_overshoot_value(double h_prev, double h_last);

/// One member of the L^1-best approximation family for sgn(x) on the
/// symmetric four-element mesh (-1,-h,0,h,1), parameterized by beta = u_h(0).
struct JumpSolution {
    double alpha;  // u_h(-h)
    double beta;   // u_h(0)
    double gamma;  // u_h(h)
};

JumpSolution jump_family(double h, double beta);

/// alpha > 1 roots of 2a^3 - 5a + 2 (criss-cross mesh) and -3a^3 + 8a - 4
/// (mesh 2), bisection on (1,2) to 1e-13.
double alpha_mesh1_l1();
double alpha_mesh2_l1();

/// alpha > 1 root of
///   0 = (a-1)^{q-1} [4a^3 q + 4(1-q)a^2 + (q-6)a + 2] - a(q+4) + 2.
double alpha_mesh1_lq(double q);

}  // namespace theory
}  // namespace lqg
