#pragma once

#include <functional>
#include <vector>

namespace lqg {

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

/// n-point Gauss–Legendre rule, computed once per n and cached.
const GaussRule& gauss_legendre(int n);

/// Integrate f over [a, b] with an n-point Gauss–Legendre rule.
double gauss(const std::function<double(double)>& f, double a, double b, int n);

/// Adaptive Gauss(7)/Kronrod(15) integration of f over [a, b] to the given
/// absolute tolerance; bisection with a depth limit.
double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double abs_tol, int max_depth = 48);

/// Geometrically graded panels toward z = 0: integrate f over [a, b] with
/// panel ends no further than a factor 2 from max(panel start, scale).
/// Integrands that are analytic away from 0 with inner scale `scale`
/// (e.g. z^{q-1} or (z^2 + eps^2)^{s}) converge to near machine precision.
double graded_gauss(const std::function<double(double)>& f, double a, double b,
                    double scale, int points_per_panel = 24);

/// Graded panels toward both interval ends, for integrands with endpoint
/// features (integrable singularities or smoothing-scale kinks) of inner
/// scale end_scale; deterministic cost, no adaptivity.
double graded_both_ends(const std::function<double(double)>& f, double a, double b,
                        double end_scale, int points_per_panel = 16);

}  // namespace lqg
