#include "lqgibbs/theory.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace lqg {
namespace theory {

namespace {

// bisection on a verified bracket, to absolute tolerance 1e-13
double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) throw NumericalError("bisection bracket has no sign change");
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// (a-1)^{q-1} with a guard for a -> 1+ and q -> 1+
double pow_am1(double a, double q) {
    const double d = a - 1.0;
    if (d <= 0.0) return 0.0;
    return std::exp((q - 1.0) * std::log(d));
}

}  // namespace

double alpha_two_element_l1(double h) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("h must lie in (0,1)");
    return h <= 0.5 ? 1.0 : std::sqrt(2.0 * h);
}

double alpha_two_element_lq(double h, double q) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("h must lie in (0,1)");
    if (!(q > 1.0)) throw DomainError("q must exceed 1");
    auto f = [h, q](double a) {
        const double p = pow_am1(a, q);
        return -(1.0 - h) * a * a * q * p - h * (a * q + 1.0) * p * (a - 1.0) + h;
    };
    double lo = 1.0 + 1e-12, hi = 2.0;
    if (f(lo) < 0.0) {
        // h <= 0.5, q near 1: the root sits at 1 + delta with delta decaying
        // like (h/(1-h)/q)^{1/(q-1)}; bisect in log(alpha - 1) instead
        auto g = [&f](double t) { return f(1.0 + std::exp(t)); };
        if (g(-700.0) < 0.0) throw NumericalError("no bracket in log scale");
        return 1.0 + std::exp(bisect(g, -700.0, std::log(1e-12)));
    }
    if ((f(lo) < 0.0) == (f(hi) < 0.0)) {
        hi = 4.0;  // widen once; the root satisfies alpha < 2 for all q
        if ((f(lo) < 0.0) == (f(hi) < 0.0))
            throw NumericalError("no sign change for the two-element alpha equation");
    }
    return bisect(f, lo, hi);
}

bool ThetaSchedule::graded_condition_holds() const {
    const int n = static_cast<int>(theta.size());
    for (int i = std::max(M, 1); i <= n - 1; ++i) {
        if (!feasible[static_cast<std::size_t>(i - 1)]) return false;
    }
    return true;
}

ThetaSchedule theta_schedule(std::span<const double> h) {
    const int n = static_cast<int>(h.size());
    if (n < 2) throw DomainError("need at least two elements");
    for (double hi : h)
        if (!(hi > 0.0)) throw DomainError("element lengths must be positive");

    ThetaSchedule s;
    s.theta.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
    s.feasible.assign(static_cast<std::size_t>(n), true);
    s.theta[static_cast<std::size_t>(n - 1)] = 0.0;

    for (int i = n - 1; i >= 1; --i) {
        const double tn = s.theta[static_cast<std::size_t>(i)];  // theta_{i+1}
        if (std::isnan(tn)) break;                               // recursion already broke
        const double rhs = (2.0 * (1.0 - tn) * (1.0 - tn) - 1.0) * h[static_cast<std::size_t>(i)];
        const double t2 = 0.5 * (1.0 - rhs / h[static_cast<std::size_t>(i - 1)]);
        s.feasible[static_cast<std::size_t>(i - 1)] = h[static_cast<std::size_t>(i - 1)] >= rhs - 1e-15;
        if (t2 < 0.0) continue;  // theta_i undefined; feasible flag already records it
        s.theta[static_cast<std::size_t>(i - 1)] = std::sqrt(t2);
    }

    const double threshold = 1.0 - 1.0 / std::sqrt(2.0);
    s.M = 0;
    for (int i = 1; i <= n - 1; ++i) {
        const double t = s.theta[static_cast<std::size_t>(i - 1)];
        if (!std::isnan(t) && t >= threshold) s.M = i;
    }
    return s;
}

OvershootVerdict check_no_overshoot_l1(std::span<const double> h) {
    const int n = static_cast<int>(h.size());
    if (n < 2) throw DomainError("need at least two elements");
    double hmin = h[0];
    for (int i = 0; i < n - 1; ++i) hmin = std::min(hmin, h[static_cast<std::size_t>(i)]);
    if (h[static_cast<std::size_t>(n - 1)] <= hmin + 1e-15) return OvershootVerdict::SUFFICIENT_MINLAST;
    if (theta_schedule(h).graded_condition_holds()) return OvershootVerdict::SUFFICIENT_GRADED;
    return OvershootVerdict::UNKNOWN;
}

double interior_overshoot_value(double h_prev, double h_last) {
    if (!(h_prev > 0.0) || !(h_last > h_prev))
        throw PreconditionError("requires h_last > h_prev > 0");
    return std::sqrt(2.0 * h_last / (h_last + h_prev));
}

JumpSolution jump_family(double h, double beta) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("h must lie in (0,1)");
    if (std::abs(beta) > 1.0) throw DomainError("beta must lie in [-1,1]");
    if (h <= 0.5) return {-1.0, beta, 1.0};
    const double s = std::sqrt(2.0 * h);
    return {-s - beta * (s - 1.0), beta, s - beta * (s - 1.0)};
}

double alpha_mesh1_l1() {
    return bisect([](double a) { return 2.0 * a * a * a - 5.0 * a + 2.0; }, 1.0, 2.0);
}

double alpha_mesh2_l1() {
    return bisect([](double a) { return -3.0 * a * a * a + 8.0 * a - 4.0; }, 1.0, 2.0);
}

double alpha_mesh1_lq(double q) {
    if (!(q > 1.0)) throw DomainError("q must exceed 1");
    auto f = [q](double a) {
        const double p = pow_am1(a, q);
        const double bracket = 4.0 * a * a * a * q + 4.0 * (1.0 - q) * a * a + (q - 6.0) * a + 2.0;
        return p * bracket - a * (q + 4.0) + 2.0;
    };
    return bisect(f, 1.0 + 1e-12, 2.0);
}

}  // namespace theory
}  // namespace lqg
