#include "lqgibbs/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "lqgibbs/errors.hpp"

namespace lqg {

namespace {

GaussRule compute_gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Newton from the Chebyshev-based initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

double gauss(const std::function<double(double)>& f, double a, double b, int n) {
    const auto& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += rule.weights[static_cast<std::size_t>(i)] * f(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
    return half * sum;
}

namespace {

// QUADPACK 15-point Kronrod extension of 7-point Gauss
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

void gk15(const std::function<double(double)>& f, double a, double b, double& kronrod, double& err) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double fc = f(mid);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        resk += kWgk[i] * fsum;
        if (i % 2 == 1) resg += kWg[i / 2] * fsum;
    }
    kronrod = resk * half;
    err = std::abs((resk - resg) * half);
}

double adaptive_gk_impl(const std::function<double(double)>& f, double a, double b,
                        double tol, int depth, int max_depth) {
    double val = 0.0, err = 0.0;
    gk15(f, a, b, val, err);
    // local acceptance with a roundoff floor; halving the tolerance per level
    // would make it unreachable near kinks and blow the recursion tree up
    if (err <= tol || err <= 64.0 * 2.2e-16 * (std::abs(val) + 1e-30) || depth >= max_depth)
        return val;
    const double mid = 0.5 * (a + b);
    return adaptive_gk_impl(f, a, mid, 0.1 * tol, depth + 1, max_depth) +
           adaptive_gk_impl(f, mid, b, 0.1 * tol, depth + 1, max_depth);
}

}  // namespace

double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    return adaptive_gk_impl(f, a, b, abs_tol, 0, max_depth);
}

double graded_gauss(const std::function<double(double)>& f, double a, double b,
                    double scale, int points_per_panel) {
    if (!(b > a)) return 0.0;
    if (!(scale > 0.0)) throw NumericalError("graded_gauss needs a positive scale");
    double sum = 0.0;
    double lo = a;
    while (lo < b) {
        const double hi = std::min(b, 2.0 * std::max(lo, scale));
        sum += gauss(f, lo, hi, points_per_panel);
        lo = hi;
    }
    return sum;
}

double graded_both_ends(const std::function<double(double)>& f, double a, double b,
                        double end_scale, int points_per_panel) {
    if (!(b > a)) return 0.0;
    const double mid = 0.5 * (a + b);
    const double left = graded_gauss([&](double t) { return f(a + t); }, 0.0, mid - a,
                                     end_scale, points_per_panel);
    const double right = graded_gauss([&](double t) { return f(b - t); }, 0.0, b - mid,
                                      end_scale, points_per_panel);
    return left + right;
}

}  // namespace lqg
