#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lqgibbs/fespace.hpp"
#include "lqgibbs/mesh.hpp"

namespace lqg {

enum class RegionSign { POS, NEG, ZERO };

/// Convex sub-region of one element on which the residual r = u - u_h has one
/// sign. In 1D the polygon holds the two interval endpoints (y = 0).
struct SignedRegion {
    RegionSign sign;
    std::vector<Point2> polygon;  // CCW
    double measure;
};

struct ElementPartition {
    std::vector<SignedRegion> regions;
};

/// Affine function on an element reconstructed from its vertex values.
struct AffineOnElement {
    double c0 = 0.0, cx = 0.0, cy = 0.0;

    static AffineOnElement from_vertex_values(std::span<const Point2> verts,
                                              std::span<const double> values);
    double operator()(Point2 p) const { return c0 + cx * p.x + cy * p.y; }
    double grad_norm() const;
};

double polygon_measure(std::span<const Point2> poly);

/// Split an element by the zero line of the affine residual r (given by its
/// vertex values). When max |r| <= tol over the element the whole element is
/// a single ZERO region; otherwise the nonzero-measure POS/NEG parts are
/// returned, cut exactly along r = 0.
ElementPartition partition_element(std::span<const Point2> verts,
                                   std::span<const double> r_values, double tol);

/// Exact integral over a convex sub-region of the affine function with the
/// given element-vertex values.
double integrate_affine_region(std::span<const Point2> element_verts,
                               std::span<const double> vertex_values,
                               std::span<const Point2> region);

/// \int_element sgn(r) |r|^{q-1} phi with r and phi affine on the element
/// (both given by vertex values); exact up to roundoff for any q >= 1.
/// For q = 1 the integrand on {r = 0} is taken as 0.
double integrate_signed_power(std::span<const Point2> verts,
                              std::span<const double> r_values,
                              std::span<const double> phi_values, double q,
                              double zero_tol = 0.0);

// --- element kernels used by the solver ------------------------------------
// Smoothing replaces sgn(r)|r|^{q-1} by rho(r) = r (r^2 + eps^2)^{(q-2)/2};
// its coefficient derivative is rho'(r) = (r^2+eps^2)^{(q-4)/2}((q-1)r^2+eps^2).

/// out[k] += s * \int_element rho(r) phi_k for every local node k; eps = 0
/// gives the unsmoothed signed power.
void element_residual_kernel(std::span<const Point2> verts,
                             std::span<const double> r_values, double q, double eps,
                             double zero_tol, std::span<double> out);

/// out[k*n+l] += \int_element rho'(r) phi_k phi_l (row-major local matrix);
/// eps = 0 gives the exact derivative (q-1)|r|^{q-2} of the unsmoothed
/// residual, integrable for q > 1.
void element_jacobian_kernel(std::span<const Point2> verts,
                             std::span<const double> r_values, double q, double eps,
                             std::span<double> out);

/// Residual of the L^q optimality condition, one entry per free node:
/// F_i = \int sgn(u - u_h) |u - u_h|^{q-1} phi_i. Elements are visited in
/// ascending order and per-node contributions combined by pairwise summation,
/// so the result does not depend on any parallel split of the element loop.
std::vector<double> residual_vector(const P1Space& space, const FEFunction& f,
                                    const TargetFunction& u, double q);

/// Element-wise vertex values of an affine-per-element target (the SGN_X sign
/// is taken at the element centroid; elements must not straddle the jump).
std::vector<double> target_vertex_values(const TargetFunction& u,
                                         std::span<const Point2> verts);

double pairwise_sum(std::span<const double> xs);

/// Sign-change locations of a scalar function on [x0, x1]: equispaced scan
/// followed by bisection to absolute tolerance 1e-14.
std::vector<double> find_sign_crossings(const std::function<double(double)>& r,
                                        double x0, double x1, int samples = 33);

/// Zero-region classification tolerance: max nodal |r| <= 1e-10 (1 + |u|_inf).
double zero_tolerance(const TargetFunction& u);

}  // namespace lqg
