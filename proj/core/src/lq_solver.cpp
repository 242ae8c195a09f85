#include "lqgibbs/lq_solver.hpp"

#include <algorithm>
#include <cmath>

#include "lqgibbs/quadrature.hpp"

namespace lqg {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double smoothed_rho(double r, double q, double eps) {
    return r * std::pow(r * r + eps * eps, 0.5 * q - 1.0);
}

double smoothed_rho_deriv(double r, double q, double eps) {
    const double m = r * r + eps * eps;
    return std::pow(m, 0.5 * q - 2.0) * ((q - 1.0) * r * r + eps * eps);
}

// local exact P1 mass matrix, row-major
std::vector<double> local_mass(double measure, int nloc) {
    if (nloc == 2) {
        const double h = measure;
        return {h / 3.0, h / 6.0, h / 6.0, h / 3.0};
    }
    const double a = measure;
    return {a / 6.0, a / 12.0, a / 12.0,
            a / 12.0, a / 6.0, a / 12.0,
            a / 12.0, a / 12.0, a / 6.0};
}

}  // namespace

std::vector<double> assemble_residual(const P1Space& space, const FEFunction& f,
                                      const TargetFunction& u, double q, double eps) {
    if (eps == 0.0) return residual_vector(space, f, u, q);
    const int nfree = space.n_free();
    std::vector<std::vector<double>> contrib(static_cast<std::size_t>(nfree));
    for (int e = 0; e < space.n_elements(); ++e) {
        const auto nodes = space.element_nodes(e);
        const auto verts = space.element_vertices(e);
        const std::size_t nloc = nodes.size();
        std::vector<double> local(nloc, 0.0);
        if (u.affine_per_element()) {
            std::vector<double> r_vals = target_vertex_values(u, verts);
            for (std::size_t k = 0; k < nloc; ++k) r_vals[k] -= f.coeff(nodes[k]);
            element_residual_kernel(verts, r_vals, q, eps, 0.0, local);
        } else {
            const double x0 = verts[0].x, x1 = verts[1].x, len = x1 - x0;
            const double c0 = f.coeff(nodes[0]), c1 = f.coeff(nodes[1]);
            auto r = [&](double x) { return u(x) - (c0 + (c1 - c0) * (x - x0) / len); };
            auto cross = find_sign_crossings(r, x0, x1);
            std::vector<double> xs{x0};
            xs.insert(xs.end(), cross.begin(), cross.end());
            xs.push_back(x1);
            const double scale = std::max(eps, 1e-13) * len;
            for (std::size_t k = 0; k < nloc; ++k) {
                auto integrand = [&, k](double x) {
                    const double t = (x - x0) / len;
                    return smoothed_rho(r(x), q, eps) * (k == 0 ? 1.0 - t : t);
                };
                for (std::size_t p = 0; p + 1 < xs.size(); ++p)
                    local[k] += graded_both_ends(integrand, xs[p], xs[p + 1], scale);
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

DenseMatrix assemble_jacobian(const P1Space& space, const FEFunction& f,
                              const TargetFunction& u, double q, double eps) {
    const int nfree = space.n_free();
    DenseMatrix J(nfree, nfree);
    for (int e = 0; e < space.n_elements(); ++e) {
        const auto nodes = space.element_nodes(e);
        const auto verts = space.element_vertices(e);
        const std::size_t nloc = nodes.size();
        std::vector<double> local(nloc * nloc, 0.0);
        if (u.affine_per_element()) {
            std::vector<double> r_vals = target_vertex_values(u, verts);
            for (std::size_t k = 0; k < nloc; ++k) r_vals[k] -= f.coeff(nodes[k]);
            element_jacobian_kernel(verts, r_vals, q, eps, local);
        } else {
            const double x0 = verts[0].x, x1 = verts[1].x, len = x1 - x0;
            const double c0 = f.coeff(nodes[0]), c1 = f.coeff(nodes[1]);
            auto r = [&](double x) { return u(x) - (c0 + (c1 - c0) * (x - x0) / len); };
            // |r|^{q-2}-type kernels concentrate at the crossings; split there
            // and grade the panels in
            auto cross = find_sign_crossings(r, x0, x1);
            std::vector<double> xs{x0};
            xs.insert(xs.end(), cross.begin(), cross.end());
            xs.push_back(x1);
            const double scale = std::max(eps, 1e-13) * len;
            for (std::size_t k = 0; k < nloc; ++k) {
                for (std::size_t l = k; l < nloc; ++l) {
                    auto integrand = [&](double x) {
                        const double t = (x - x0) / len;
                        const double pk = k == 0 ? 1.0 - t : t;
                        const double pl = l == 0 ? 1.0 - t : t;
                        return smoothed_rho_deriv(r(x), q, eps) * pk * pl;
                    };
                    double v = 0.0;
                    for (std::size_t p = 0; p + 1 < xs.size(); ++p)
                        v += graded_both_ends(integrand, xs[p], xs[p + 1], scale);
                    local[k * nloc + l] += v;
                    if (l != k) local[l * nloc + k] += v;
                }
            }
        }
        for (std::size_t k = 0; k < nloc; ++k) {
            const int fi = space.free_index(nodes[k]);
            if (fi < 0) continue;
            for (std::size_t l = 0; l < nloc; ++l) {
                const int fj = space.free_index(nodes[l]);
                if (fj < 0) continue;
                J(fi, fj) -= local[k * nloc + l];  // dr/dc_j = -phi_j
            }
        }
    }
    return J;
}

FEFunction solve_l2(const SpacePtr& space, const TargetFunction& u) {
    const int nfree = space->n_free();
    DenseMatrix M(nfree, nfree);
    std::vector<double> rhs(static_cast<std::size_t>(nfree), 0.0);

    for (int e = 0; e < space->n_elements(); ++e) {
        const auto nodes = space->element_nodes(e);
        const auto verts = space->element_vertices(e);
        const std::size_t nloc = nodes.size();
        const auto mass = local_mass(space->element_measure(e), static_cast<int>(nloc));

        std::vector<double> load(nloc, 0.0);
        if (u.affine_per_element()) {
            const auto uv = target_vertex_values(u, verts);
            for (std::size_t k = 0; k < nloc; ++k)
                for (std::size_t l = 0; l < nloc; ++l)
                    load[k] += mass[k * nloc + l] * uv[l];
        } else {
            const double x0 = verts[0].x, x1 = verts[1].x, len = x1 - x0;
            for (std::size_t k = 0; k < nloc; ++k) {
                auto integrand = [&, k](double x) {
                    const double t = (x - x0) / len;
                    return u(x) * (k == 0 ? 1.0 - t : t);
                };
                load[k] = adaptive_gk(integrand, x0, x1, 1e-13);
            }
        }

        for (std::size_t k = 0; k < nloc; ++k) {
            const int fi = space->free_index(nodes[k]);
            if (fi < 0) continue;
            rhs[static_cast<std::size_t>(fi)] += load[k];
            for (std::size_t l = 0; l < nloc; ++l) {
                const int fj = space->free_index(nodes[l]);
                if (fj >= 0) {
                    M(fi, fj) += mass[k * nloc + l];
                } else {
                    rhs[static_cast<std::size_t>(fi)] -= mass[k * nloc + l] * space->constrained().at(nodes[l]);
                }
            }
        }
    }
    auto c = lu_solve(std::move(M), std::move(rhs));
    return FEFunction::from_free(space, c);
}

namespace {

// Newton with backtracking on max|F|; returns iterations used, throws on stall.
int newton_stage(const P1Space& space, FEFunction& f, const TargetFunction& u, double q,
                 double eps, double tol, int max_iters, double damping, bool frozen_jacobian,
                 double frozen_eps) {
    std::vector<double> c = f.free_values();
    std::vector<double> F = assemble_residual(space, f, u, q, eps);
    double norm = max_abs(F);
    int iters = 0;
    DenseMatrix Jfrozen;
    if (frozen_jacobian) Jfrozen = assemble_jacobian(space, f, u, q, frozen_eps);

    while (norm > tol) {
        if (iters >= max_iters) throw NonConvergence("Newton stage exhausted its iterations", q, eps);
        DenseMatrix J = frozen_jacobian ? Jfrozen : assemble_jacobian(space, f, u, q, eps);
        std::vector<double> negF(F.size());
        for (std::size_t i = 0; i < F.size(); ++i) negF[i] = -F[i];
        std::vector<double> d = lu_solve(std::move(J), std::move(negF));

        double step = 1.0;
        bool accepted = false;
        for (int back = 0; back <= 30; ++back) {
            std::vector<double> trial = c;
            for (std::size_t i = 0; i < c.size(); ++i) trial[i] += step * d[i];
            f.set_free(trial);
            std::vector<double> Ft = assemble_residual(space, f, u, q, eps);
            const double nt = max_abs(Ft);
            if (nt < norm * (1.0 - 1e-4 * step) || nt <= tol) {
                c = std::move(trial);
                F = std::move(Ft);
                norm = nt;
                accepted = true;
                break;
            }
            step *= damping;
        }
        ++iters;
        if (!accepted) throw NonConvergence("line search stalled", q, eps);
    }
    f.set_free(c);
    return iters;
}

std::vector<double> default_q_path(double q_target) {
    std::vector<double> path{2.0};
    if (std::abs(q_target - 2.0) <= 1e-12) return path;
    const double rate = q_target < 2.0 ? 0.7 : 1.4;
    double t = 2.0;
    while (std::abs(t - q_target) > 1e-3) {
        t = 1.0 + rate * (t - 1.0);
        if ((q_target < 2.0 && t < q_target) || (q_target > 2.0 && t > q_target)) break;
        path.push_back(t);
    }
    if (std::abs(path.back() - q_target) > 1e-12) path.push_back(q_target);
    return path;
}

// eps walk + unsmoothed polish at one value of q
void q_stage(const P1Space& space, FEFunction& f, const TargetFunction& u, double q,
             const SolverOptions& opts, std::vector<StageInfo>& stages) {
    double last_eps = 0.0;
    for (double eps : opts.eps_schedule) {
        if (!(eps >= 0.0)) throw DomainError("eps schedule entries must be >= 0");
        if (eps == 0.0) continue;  // the polish below handles the limit
        const double stage_tol = std::max(opts.newton_tol, 1e-3 * eps);
        const int it = newton_stage(space, f, u, q, eps, stage_tol, opts.max_iters,
                                    opts.damping, false, eps);
        stages.push_back({q, eps, it});
        last_eps = eps;
    }
    // polish on the unsmoothed residual: frozen Jacobian first, then exact
    const double frozen_eps = last_eps > 0.0 ? last_eps : 1e-6;
    try {
        const int it = newton_stage(space, f, u, q, 0.0, opts.newton_tol, 20,
                                    opts.damping, true, frozen_eps);
        stages.push_back({q, 0.0, it});
        return;
    } catch (const NonConvergence&) {
        // frozen-Jacobian iteration stalled; fall through to exact Newton
    }
    const int it = newton_stage(space, f, u, q, 0.0, opts.newton_tol, 15,
                                opts.damping, false, 0.0);
    stages.push_back({q, 0.0, it});
}

}  // namespace

SolveReport solve_lq(const SpacePtr& space, const TargetFunction& u, const SolverOptions& opts) {
    if (!(opts.q_target > 1.0)) throw DomainError("q_target must exceed 1");
    std::vector<double> path = opts.q_path.empty() ? default_q_path(opts.q_target) : opts.q_path;
    if (std::abs(path.front() - 2.0) > 1e-12) throw DomainError("q path must start at 2");

    FEFunction f = solve_l2(space, u);
    std::vector<StageInfo> stages;
    for (double q : path) {
        if (std::abs(q - 2.0) <= 1e-12) continue;  // L2 start is exact
        q_stage(*space, f, u, q, opts, stages);
    }
    // at q == 2 the projection already is the solution; still report honestly
    std::vector<double> F = residual_vector(*space, f, u, opts.q_target);
    const double norm = max_abs(F);
    return {std::move(f), norm, std::move(stages), norm <= 10.0 * opts.newton_tol};
}

std::vector<SweepRow> sweep_q(const SpacePtr& space, const TargetFunction& u,
                              const std::vector<double>& q_list, const SolverOptions& base) {
    for (std::size_t i = 1; i < q_list.size(); ++i)
        if (!(q_list[i] < q_list[i - 1])) throw DomainError("q list must be strictly descending");

    std::vector<SweepRow> table;
    FEFunction f = solve_l2(space, u);
    bool have_start = false;
    for (double q : q_list) {
        SolverOptions opts = base;
        opts.q_target = q;
        bool converged = false;
        try {
            if (!have_start) {
                SolveReport rep = solve_lq(space, u, opts);
                f = rep.coeffs;
                converged = rep.converged;
                have_start = true;
            } else {
                std::vector<StageInfo> stages;
                q_stage(*space, f, u, q, opts, stages);
                converged = true;
            }
        } catch (const NonConvergence&) {
            try {  // retry with full continuation from scratch
                SolveReport rep = solve_lq(space, u, opts);
                f = rep.coeffs;
                converged = rep.converged;
            } catch (const NonConvergence&) {
                converged = false;
            }
        }
        const auto rep = nodal_overshoot(f, u);
        table.push_back({q, f, rep.max_over, rep.max_under, converged});
    }
    return table;
}

FEFunction extrapolate_to_l1(const std::vector<SweepRow>& table) {
    std::vector<const SweepRow*> rows;
    for (const auto& r : table)
        if (r.converged && r.q <= 1.3 + 1e-12) rows.push_back(&r);
    if (rows.size() < 3) throw DomainError("need at least 3 converged rows with q <= 1.3");
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->q < b->q; });
    rows.resize(3);

    // per-node least-squares line in t = q - 1, evaluated at t = 0
    const std::size_t n = rows[0]->coeffs.coeffs().size();
    double st = 0.0, stt = 0.0;
    for (const auto* r : rows) {
        const double t = r->q - 1.0;
        st += t;
        stt += t * t;
    }
    const double det = 3.0 * stt - st * st;
    std::vector<double> extrap(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sy = 0.0, sty = 0.0;
        for (const auto* r : rows) {
            const double t = r->q - 1.0;
            const double y = r->coeffs.coeffs()[i];
            sy += y;
            sty += t * y;
        }
        extrap[i] = (stt * sy - st * sty) / det;
    }
    return FEFunction(rows[0]->coeffs.space_ptr(), std::move(extrap));
}

}  // namespace lqg
