#include "lqgibbs/signsplit.hpp"

#include <algorithm>
#include <cmath>

#include "lqgibbs/quadrature.hpp"

namespace lqg {

double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 4) {
        double s = xs[0];
        for (std::size_t i = 1; i < n; ++i) s += xs[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double zero_tolerance(const TargetFunction& u) { return 1e-10 * (1.0 + u.sup_norm_hint()); }

AffineOnElement AffineOnElement::from_vertex_values(std::span<const Point2> verts,
                                                    std::span<const double> values) {
    AffineOnElement f;
    if (verts.size() == 2) {
        f.cx = (values[1] - values[0]) / (verts[1].x - verts[0].x);
        f.cy = 0.0;
        f.c0 = values[0] - f.cx * verts[0].x;
        return f;
    }
    const Point2 d1 = verts[1] - verts[0];
    const Point2 d2 = verts[2] - verts[0];
    const double det = cross(d1, d2);
    const double w1 = values[1] - values[0];
    const double w2 = values[2] - values[0];
    f.cx = (w1 * d2.y - w2 * d1.y) / det;
    f.cy = (w2 * d1.x - w1 * d2.x) / det;
    f.c0 = values[0] - f.cx * verts[0].x - f.cy * verts[0].y;
    return f;
}

double AffineOnElement::grad_norm() const { return std::hypot(cx, cy); }

double polygon_measure(std::span<const Point2> poly) {
    if (poly.size() < 2) return 0.0;
    if (poly.size() == 2) return std::abs(poly[1].x - poly[0].x);
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % poly.size()];
        twice += cross(a, b);
    }
    return 0.5 * std::abs(twice);
}

namespace {

constexpr double kTinyMeasure = 1e-30;

// keep the f >= 0 part of a convex CCW polygon (Sutherland–Hodgman)
std::vector<Point2> clip_nonneg(std::span<const Point2> poly, const AffineOnElement& f) {
    if (poly.size() == 2) {
        const double f0 = f(poly[0]), f1 = f(poly[1]);
        if (f0 >= 0.0 && f1 >= 0.0) return {poly[0], poly[1]};
        if (f0 < 0.0 && f1 < 0.0) return {};
        const double t = f0 / (f0 - f1);
        const Point2 cut = poly[0] + t * (poly[1] - poly[0]);
        return f0 >= 0.0 ? std::vector<Point2>{poly[0], cut} : std::vector<Point2>{cut, poly[1]};
    }
    std::vector<Point2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i], b = poly[(i + 1) % n];
        const double fa = f(a), fb = f(b);
        if (fa >= 0.0) out.push_back(a);
        if ((fa >= 0.0) != (fb >= 0.0)) out.push_back(a + (fa / (fa - fb)) * (b - a));
    }
    return out;
}

AffineOnElement negate(const AffineOnElement& f) { return {-f.c0, -f.cx, -f.cy}; }

using GEval = std::function<double(Point2)>;

// exact integral of a degree <= gdeg polynomial over a convex region
double integrate_callable_region(std::span<const Point2> region, const GEval& g, int gdeg) {
    if (region.size() == 2) {
        const Point2 a = region[0], b = region[1];
        const double len = std::abs(b.x - a.x);
        if (gdeg <= 1) return 0.5 * len * (g(a) + g(b));
        return len / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b));
    }
    double sum = 0.0;
    for (std::size_t i = 1; i + 1 < region.size(); ++i) {
        const Point2 a = region[0], b = region[i], c = region[i + 1];
        const double area = triangle_area(a, b, c);
        if (gdeg <= 1) {
            sum += area * (g(a) + g(b) + g(c)) / 3.0;
        } else {
            sum += area * (g(0.5 * (a + b)) + g(0.5 * (b + c)) + g(0.5 * (c + a))) / 3.0;
        }
    }
    return sum;
}

// rho(z) = z (z^2+eps^2)^{(q-2)/2}; deriv selects rho'(z). eps = 0 is the
// pure power family z^{q-1} / (q-1) z^{q-2}.
struct Kernel {
    double q;
    double eps;
    bool deriv;

    double operator()(double z) const {
        if (eps == 0.0) return deriv ? (q - 1.0) * std::pow(z, q - 2.0) : std::pow(z, q - 1.0);
        const double m = z * z + eps * eps;
        if (deriv) return std::pow(m, 0.5 * q - 2.0) * ((q - 1.0) * z * z + eps * eps);
        return z * std::pow(m, 0.5 * q - 1.0);
    }
    bool odd() const { return !deriv; }
    bool power_family() const { return eps == 0.0; }
};

// exact z-integral of z^mu times the polynomial through the given chord
// samples, taken over [za, zb]; the fit is in tau = z / zb
double analytic_power_piece(double za, double zb, double mu,
                            const std::function<double(double)>& chord, int fit_n) {
    const double ta = za / zb;
    std::vector<double> tau(static_cast<std::size_t>(fit_n)), val(static_cast<std::size_t>(fit_n));
    for (int s = 0; s < fit_n; ++s) {
        tau[static_cast<std::size_t>(s)] = ta + (1.0 - ta) * (s + 0.5) / fit_n;
        val[static_cast<std::size_t>(s)] = chord(zb * tau[static_cast<std::size_t>(s)]);
    }
    // Vandermonde solve for chord(z) = sum a_j tau^j
    const int n = fit_n;
    std::vector<double> m(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r) {
        double p = 1.0;
        for (int c = 0; c < n; ++c) {
            m[static_cast<std::size_t>(r * n + c)] = p;
            p *= tau[static_cast<std::size_t>(r)];
        }
    }
    std::vector<double> a = val;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[static_cast<std::size_t>(r * n + c)]) > std::abs(m[static_cast<std::size_t>(piv * n + c)])) piv = r;
        for (int k = 0; k < n; ++k) std::swap(m[static_cast<std::size_t>(c * n + k)], m[static_cast<std::size_t>(piv * n + k)]);
        std::swap(a[static_cast<std::size_t>(c)], a[static_cast<std::size_t>(piv)]);
        for (int r = c + 1; r < n; ++r) {
            const double fac = m[static_cast<std::size_t>(r * n + c)] / m[static_cast<std::size_t>(c * n + c)];
            for (int k = c; k < n; ++k) m[static_cast<std::size_t>(r * n + k)] -= fac * m[static_cast<std::size_t>(c * n + k)];
            a[static_cast<std::size_t>(r)] -= fac * a[static_cast<std::size_t>(c)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        for (int k = r + 1; k < n; ++k) a[static_cast<std::size_t>(r)] -= m[static_cast<std::size_t>(r * n + k)] * a[static_cast<std::size_t>(k)];
        a[static_cast<std::size_t>(r)] /= m[static_cast<std::size_t>(r * n + r)];
    }
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double e = mu + j + 1.0;
        sum += a[static_cast<std::size_t>(j)] * (1.0 - std::pow(ta, e)) / e;
    }
    return std::pow(zb, mu + 1.0) * sum;
}

double integrate_piece(double za, double zb, const std::function<double(double)>& chord,
                       int fit_n, const Kernel& K) {
    if (!(zb - za > 0.0)) return 0.0;
    if (K.power_family()) {
        const double mu = K.deriv ? K.q - 2.0 : K.q - 1.0;
        const double fac = K.deriv ? K.q - 1.0 : 1.0;
        if (za <= zb / 3.0) return fac * analytic_power_piece(za, zb, mu, chord, fit_n);
        return gauss([&](double z) { return K(z) * chord(z); }, za, zb, 20);
    }
    const double scale = std::max(K.eps, 1e-14 * zb);
    return graded_gauss([&](double z) { return K(z) * chord(z); }, za, zb, scale, 24);
}

// chord function of a convex region: z -> (integral of g along {fabs = z}) / |grad fabs|
struct ChordEval {
    std::span<const Point2> region;
    const AffineOnElement* fabs;
    const GEval* g;
    int gdeg;
    double inv_gnorm;

    double operator()(double z) const {
        if (region.size() == 2) {
            const double x = (z - fabs->c0) / fabs->cx;
            return (*g)({x, 0.0}) * inv_gnorm;
        }
        Point2 pts[2];
        int cnt = 0;
        const std::size_t n = region.size();
        for (std::size_t i = 0; i < n && cnt < 2; ++i) {
            const Point2 a = region[i], b = region[(i + 1) % n];
            const double fa = (*fabs)(a), fb = (*fabs)(b);
            if ((fa - z) * (fb - z) < 0.0) pts[cnt++] = a + ((z - fa) / (fb - fa)) * (b - a);
        }
        if (cnt < 2) return 0.0;
        const double len = std::hypot(pts[1].x - pts[0].x, pts[1].y - pts[0].y);
        double mean;
        if (gdeg <= 1) {
            mean = 0.5 * ((*g)(pts[0]) + (*g)(pts[1]));
        } else {
            mean = ((*g)(pts[0]) + 4.0 * (*g)(0.5 * (pts[0] + pts[1])) + (*g)(pts[1])) / 6.0;
        }
        return len * mean * inv_gnorm;
    }
};

// \int_region K(fabs) g with fabs affine and >= 0 on the region
double integrate_region_kernel(std::span<const Point2> region, const AffineOnElement& fabs,
                               const GEval& g, int gdeg, const Kernel& K) {
    std::vector<double> z(region.size());
    double zmax = 0.0;
    for (std::size_t i = 0; i < region.size(); ++i) {
        z[i] = std::max(0.0, fabs(region[i]));
        zmax = std::max(zmax, z[i]);
    }
    std::sort(z.begin(), z.end());
    if (zmax - z.front() <= 1e-13 * (zmax + 1e-300)) {
        // residual constant over the region
        if (K.power_family() && K.deriv && zmax == 0.0) return 0.0;
        return K(0.5 * (zmax + z.front())) * integrate_callable_region(region, g, gdeg);
    }
    ChordEval chord{region, &fabs, &g, gdeg, 1.0 / fabs.grad_norm()};
    const int fit_n = gdeg + 2;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        if (z[i + 1] - z[i] <= 1e-13 * zmax) continue;
        sum += integrate_piece(z[i], z[i + 1], std::cref(chord), fit_n, K);
    }
    return sum;
}

// Element split + kernel dispatch. Odd kernels carry sgn(r); even kernels do
// not. ztol classifies an (almost) vanishing residual as the zero region.
double integrate_element_kernel(std::span<const Point2> verts, std::span<const double> r_values,
                                const GEval& g, int gdeg, const Kernel& K, double ztol) {
    double rmin = r_values[0], rmax = r_values[0];
    for (double v : r_values) {
        rmin = std::min(rmin, v);
        rmax = std::max(rmax, v);
    }
    const double rabs = std::max(std::abs(rmin), std::abs(rmax));
    if (K.odd() && rabs <= ztol) return 0.0;

    const AffineOnElement r = AffineOnElement::from_vertex_values(verts, r_values);
    if (rmax - rmin <= 1e-13 * (rabs + 1e-300)) {
        // constant residual
        if (K.odd()) {
            const double s = rmax > 0.0 ? 1.0 : -1.0;
            return s * K(rabs) * integrate_callable_region(verts, g, gdeg);
        }
        if (K.power_family() && rabs <= ztol) return 0.0;  // subgradient choice at r == 0
        return K(rabs) * integrate_callable_region(verts, g, gdeg);
    }

    double sum = 0.0;
    if (rmax > 0.0) {
        auto pos = clip_nonneg(verts, r);
        if (polygon_measure(pos) > kTinyMeasure)
            sum += integrate_region_kernel(pos, r, g, gdeg, K);
    }
    if (rmin < 0.0) {
        const AffineOnElement nr = negate(r);
        auto neg = clip_nonneg(verts, nr);
        if (polygon_measure(neg) > kTinyMeasure) {
            const double s = K.odd() ? -1.0 : 1.0;
            sum += s * integrate_region_kernel(neg, nr, g, gdeg, K);
        }
    }
    return sum;
}

GEval affine_eval(std::span<const Point2> verts, std::span<const double> values) {
    const AffineOnElement f = AffineOnElement::from_vertex_values(verts, values);
    return [f](Point2 p) { return f(p); };
}

GEval hat_eval(std::span<const Point2> verts, std::size_t k) {
    std::vector<double> e(verts.size(), 0.0);
    e[k] = 1.0;
    return affine_eval(verts, e);
}

}  // namespace

ElementPartition partition_element(std::span<const Point2> verts,
                                   std::span<const double> r_values, double tol) {
    ElementPartition part;
    double rabs = 0.0, rmin = r_values[0], rmax = r_values[0];
    for (double v : r_values) {
        rabs = std::max(rabs, std::abs(v));
        rmin = std::min(rmin, v);
        rmax = std::max(rmax, v);
    }
    std::vector<Point2> whole(verts.begin(), verts.end());
    if (rabs <= tol) {
        part.regions.push_back({RegionSign::ZERO, whole, polygon_measure(whole)});
        return part;
    }
    const AffineOnElement r = AffineOnElement::from_vertex_values(verts, r_values);
    if (rmin >= 0.0) {
        part.regions.push_back({RegionSign::POS, whole, polygon_measure(whole)});
        return part;
    }
    if (rmax <= 0.0) {
        part.regions.push_back({RegionSign::NEG, whole, polygon_measure(whole)});
        return part;
    }
    auto pos = clip_nonneg(verts, r);
    auto neg = clip_nonneg(verts, negate(r));
    if (const double m = polygon_measure(pos); m > kTinyMeasure)
        part.regions.push_back({RegionSign::POS, std::move(pos), m});
    if (const double m = polygon_measure(neg); m > kTinyMeasure)
        part.regions.push_back({RegionSign::NEG, std::move(neg), m});
    return part;
}

double integrate_affine_region(std::span<const Point2> element_verts,
                               std::span<const double> vertex_values,
                               std::span<const Point2> region) {
    return integrate_callable_region(region, affine_eval(element_verts, vertex_values), 1);
}

double integrate_signed_power(std::span<const Point2> verts, std::span<const double> r_values,
                              std::span<const double> phi_values, double q, double zero_tol) {
    return integrate_element_kernel(verts, r_values, affine_eval(verts, phi_values), 1,
                                    Kernel{q, 0.0, false}, zero_tol);
}

void element_residual_kernel(std::span<const Point2> verts, std::span<const double> r_values,
                             double q, double eps, double zero_tol, std::span<double> out) {
    for (std::size_t k = 0; k < verts.size(); ++k)
        out[k] += integrate_element_kernel(verts, r_values, hat_eval(verts, k), 1,
                                           Kernel{q, eps, false}, zero_tol);
}

void element_jacobian_kernel(std::span<const Point2> verts, std::span<const double> r_values,
                             double q, double eps, std::span<double> out) {
    const std::size_t n = verts.size();
    std::vector<AffineOnElement> lam(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> e(n, 0.0);
        e[k] = 1.0;
        lam[k] = AffineOnElement::from_vertex_values(verts, e);
    }
    const double ztol = 1e-14;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = k; l < n; ++l) {
            GEval g = [&lam, k, l](Point2 p) { return lam[k](p) * lam[l](p); };
            const double v = integrate_element_kernel(verts, r_values, g, 2,
                                                      Kernel{q, eps, true}, ztol);
            out[k * n + l] += v;
            if (l != k) out[l * n + k] += v;
        }
    }
}

std::vector<double> target_vertex_values(const TargetFunction& u, std::span<const Point2> verts) {
    std::vector<double> vals(verts.size());
    if (u.kind() == TargetFunction::Kind::constant_one) {
        std::fill(vals.begin(), vals.end(), 1.0);
        return vals;
    }
    if (u.kind() == TargetFunction::Kind::sgn_x) {
        Point2 c{0, 0};
        for (const Point2& v : verts) c = c + v;
        const double cx = c.x / static_cast<double>(verts.size());
        if (std::abs(cx) < 1e-14)
            throw InvalidProblem("element straddles the jump of sgn(x)");
        std::fill(vals.begin(), vals.end(), cx > 0.0 ? 1.0 : -1.0);
        return vals;
    }
    throw InvalidProblem("target is not affine per element");
}

// sign-change scan + bisection to absolute tolerance 1e-14
std::vector<double> find_sign_crossings(const std::function<double(double)>& r, double x0, double x1,
                                        int samples) {
    std::vector<double> xs;
    double xa = x0, ra = r(x0);
    for (int i = 1; i <= samples; ++i) {
        const double xb = x0 + (x1 - x0) * i / samples;
        const double rb = r(xb);
        if ((ra < 0.0) != (rb < 0.0)) {
            double lo = xa, hi = xb, rlo = ra;
            while (hi - lo > 1e-14) {
                const double mid = 0.5 * (lo + hi);
                const double rm = r(mid);
                if ((rlo < 0.0) == (rm < 0.0)) {
                    lo = mid;
                    rlo = rm;
                } else {
                    hi = mid;
                }
            }
            xs.push_back(0.5 * (lo + hi));
        }
        xa = xb;
        ra = rb;
    }
    return xs;
}

namespace {

int scan_samples(const TargetFunction& u, double len) {
    if (u.kind() == TargetFunction::Kind::sine_perturbed)
        return std::max(33, static_cast<int>(std::ceil(64.0 * std::abs(u.frequency()) * len)));
    return 33;
}

}  // namespace

std::vector<double> residual_vector(const P1Space& space, const FEFunction& f,
                                    const TargetFunction& u, double q) {
    if (q < 1.0) throw DomainError("q must be >= 1");
    const int nfree = space.n_free();
    const int ne = space.n_elements();
    const double ztol = zero_tolerance(u);

    // per-node contribution lists in ascending element order
    std::vector<std::vector<double>> contrib(static_cast<std::size_t>(nfree));

    const bool affine = u.affine_per_element();
    if (!affine && space.dim() != 1)
        throw Unsupported("smooth targets are only supported on 1D meshes");

    for (int e = 0; e < ne; ++e) {
        const auto nodes = space.element_nodes(e);
        const auto verts = space.element_vertices(e);
        const std::size_t nloc = nodes.size();
        std::vector<double> local(nloc, 0.0);

        if (affine) {
            std::vector<double> r_vals = target_vertex_values(u, verts);
            for (std::size_t k = 0; k < nloc; ++k)
                r_vals[k] -= f.coeff(nodes[k]);
            element_residual_kernel(verts, r_vals, q, 0.0, ztol, local);
        } else {
            const double x0 = verts[0].x, x1 = verts[1].x, len = x1 - x0;
            const double c0 = f.coeff(nodes[0]), c1 = f.coeff(nodes[1]);
            auto r = [&](double x) { return u(x) - (c0 + (c1 - c0) * (x - x0) / len); };
            auto xs = find_sign_crossings(r, x0, x1, scan_samples(u, len));
            xs.insert(xs.begin(), x0);
            xs.push_back(x1);
            for (std::size_t p = 0; p + 1 < xs.size(); ++p) {
                const double a = xs[p], b = xs[p + 1];
                if (!(b - a > 1e-15)) continue;
                const double rm = r(0.5 * (a + b));
                if (std::abs(rm) <= ztol) continue;
                const double s = rm > 0.0 ? 1.0 : -1.0;
                for (std::size_t k = 0; k < nloc; ++k) {
                    auto integrand = [&, k](double x) {
                        const double t = (x - x0) / len;
                        const double phi = k == 0 ? 1.0 - t : t;
                        return std::pow(std::abs(r(x)), q - 1.0) * phi;
                    };
                    local[k] += s * graded_both_ends(integrand, a, b, 1e-13 * len);
                }
            }
        }

        for (std::size_t k = 0; k < nloc; ++k) {
            const int fi = space.free_index(nodes[k]);
            if (fi >= 0) contrib[static_cast<std::size_t>(fi)].push_back(local[k]);
        }
    }

    std::vector<double> F(static_cast<std::size_t>(nfree));
    for (int i = 0; i < nfree; ++i) F[static_cast<std::size_t>(i)] = pairwise_sum(contrib[static_cast<std::size_t>(i)]);
    return F;
}

}  // namespace lqg
