#include "lqgibbs/l1_certifier.hpp"

#include <algorithm>
#include <cmath>

#include "lqgibbs/simplex.hpp"
#include "lqgibbs/theory.hpp"

namespace lqg {

double PsiWitness::sup_norm() const {
    double s = 0.0;
    for (const auto& part : partitions)
        for (const auto& region : part.regions)
            if (region.sign != RegionSign::ZERO) s = std::max(s, 1.0);
    for (const auto& piece : zero_pieces) {
        for (double v : piece.nodal_values) s = std::max(s, std::abs(v));
        for (const auto& pv : piece.piece_values)
            s = std::max({s, std::abs(pv[0]), std::abs(pv[1])});
    }
    return s;
}

namespace {

constexpr double kFeasTol = 1e-9;

// exact \int_element psi0 phi_k with both affine (edge-midpoint rule)
double product_integral(std::span<const Point2> verts, std::span<const double> psi_vals,
                        std::size_t k) {
    std::vector<double> hat(verts.size(), 0.0);
    hat[k] = 1.0;
    const auto psi = AffineOnElement::from_vertex_values(verts, psi_vals);
    const auto phi = AffineOnElement::from_vertex_values(verts, hat);
    if (verts.size() == 2) {
        const Point2 a = verts[0], b = verts[1], m = 0.5 * (a + b);
        const double len = std::abs(b.x - a.x);
        return len / 6.0 * (psi(a) * phi(a) + 4.0 * psi(m) * phi(m) + psi(b) * phi(b));
    }
    const Point2 a = verts[0], b = verts[1], c = verts[2];
    const double area = triangle_area(a, b, c);
    const Point2 mab = 0.5 * (a + b), mbc = 0.5 * (b + c), mca = 0.5 * (c + a);
    return area / 3.0 * (psi(mab) * phi(mab) + psi(mbc) * phi(mbc) + psi(mca) * phi(mca));
}

// ---------------------------------------------------------------------------
// Exact feasibility over the full class |psi0| <= t on 1D zero elements.
// The pair of hat moments (m_left, m_right) of one interval ranges over a
// convex body with the closed-form support function L * \int_0^1 |n_a (1-s)
// + n_b s| ds; minimize t by a cutting-plane LP over these bodies and realize
// the optimal moments by a one-switch two-level psi0. Needed because the
// published witnesses for the jump family at beta = +-1 switch sign inside a
// zero element, which no affine-per-element psi0 can do.
// ---------------------------------------------------------------------------

double abs_affine_mean(double ga, double gb) {
    if (ga * gb >= 0.0) return 0.5 * std::abs(ga + gb);
    return 0.5 * (ga * ga + gb * gb) / (std::abs(ga) + std::abs(gb));
}

struct MomentElement {
    int element;
    double length;
    std::array<int, 2> var;  // moment-variable index per local node, -1 untracked
};

struct ExactMomentResult {
    bool solved = false;
    double t = 0.0;
    std::vector<double> moments;
};

ExactMomentResult exact_moment_minimax(const std::vector<MomentElement>& elems, int n_vars,
                                       const std::vector<std::pair<int, double>>& row_of_var,
                                       const std::vector<double>& row_rhs, int n_rows) {
    // cuts: (element index into elems, direction (na, nb)); single-tracked
    // elements only ever need the two axis cuts
    struct Cut {
        int elem;
        double na, nb, support;
    };
    std::vector<Cut> cuts;
    for (std::size_t e = 0; e < elems.size(); ++e) {
        const auto& me = elems[e];
        for (int axis = 0; axis < 2; ++axis) {
            if (me.var[static_cast<std::size_t>(axis)] < 0) continue;
            for (double s : {1.0, -1.0}) {
                const double na = axis == 0 ? s : 0.0;
                const double nb = axis == 1 ? s : 0.0;
                cuts.push_back({static_cast<int>(e), na, nb,
                                me.length * abs_affine_mean(na, nb)});
            }
        }
        if (me.var[0] >= 0 && me.var[1] >= 0) {
            for (double na : {1.0, -1.0})
                for (double nb : {1.0, -1.0})
                    cuts.push_back({static_cast<int>(e), na, nb,
                                    me.length * abs_affine_mean(na, nb)});
        }
    }

    ExactMomentResult out;
    for (int round = 0; round < 60; ++round) {
        // variables: [x+ (n_vars), x- (n_vars), t, slack per cut]
        const int nc = static_cast<int>(cuts.size());
        const int nv = 2 * n_vars + 1 + nc;
        DenseMatrix A(n_rows + nc, nv);
        std::vector<double> b(static_cast<std::size_t>(n_rows + nc), 0.0);
        for (std::size_t v = 0; v < row_of_var.size(); ++v) {
            const auto& [row, coef] = row_of_var[v];
            A(row, static_cast<int>(v)) += coef;
            A(row, n_vars + static_cast<int>(v)) -= coef;
        }
        for (int r = 0; r < n_rows; ++r) b[static_cast<std::size_t>(r)] = row_rhs[static_cast<std::size_t>(r)];
        for (int k = 0; k < nc; ++k) {
            const auto& cut = cuts[static_cast<std::size_t>(k)];
            const auto& me = elems[static_cast<std::size_t>(cut.elem)];
            for (int loc = 0; loc < 2; ++loc) {
                const int var = me.var[static_cast<std::size_t>(loc)];
                if (var < 0) continue;
                const double n = loc == 0 ? cut.na : cut.nb;
                A(n_rows + k, var) += n;
                A(n_rows + k, n_vars + var) -= n;
            }
            A(n_rows + k, 2 * n_vars) = -cut.support;
            A(n_rows + k, 2 * n_vars + 1 + k) = 1.0;
        }
        std::vector<double> cost(static_cast<std::size_t>(nv), 0.0);
        cost[static_cast<std::size_t>(2 * n_vars)] = 1.0;

        const LpResult lp = simplex_solve(A, b, cost);
        if (lp.status != LpStatus::optimal) return out;
        std::vector<double> x(static_cast<std::size_t>(n_vars));
        for (int v = 0; v < n_vars; ++v)
            x[static_cast<std::size_t>(v)] =
                lp.x[static_cast<std::size_t>(v)] - lp.x[static_cast<std::size_t>(n_vars + v)];
        const double t = lp.objective;

        // separation: coarse direction scan plus local refinement, so the
        // retained moments end up within ~1e-12 of the exact body
        bool violated = false;
        for (std::size_t e = 0; e < elems.size(); ++e) {
            const auto& me = elems[e];
            if (me.var[0] < 0 || me.var[1] < 0) continue;
            const double ma = x[static_cast<std::size_t>(me.var[0])];
            const double mb = x[static_cast<std::size_t>(me.var[1])];
            auto viol = [&](double th) {
                const double na = std::cos(th), nb = std::sin(th);
                return na * ma + nb * mb - t * me.length * abs_affine_mean(na, nb);
            };
            double best_th = 0.0, best = -1e300;
            for (int a = 0; a < 1024; ++a) {
                const double th = 2.0 * M_PI * a / 1024.0;
                const double v = viol(th);
                if (v > best) {
                    best = v;
                    best_th = th;
                }
            }
            double lo = best_th - 2.0 * M_PI / 1024.0, hi = best_th + 2.0 * M_PI / 1024.0;
            for (int it = 0; it < 60; ++it) {
                const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                if (viol(m1) >= viol(m2))
                    hi = m2;
                else
                    lo = m1;
            }
            best_th = 0.5 * (lo + hi);
            if (viol(best_th) > 1e-12 * (1.0 + me.length * (t + 1.0))) {
                const double na = std::cos(best_th), nb = std::sin(best_th);
                cuts.push_back({static_cast<int>(e), na, nb,
                                me.length * abs_affine_mean(na, nb)});
                violated = true;
            }
        }
        if (!violated) {
            out.solved = true;
            out.t = t;
            out.moments = std::move(x);
            return out;
        }
    }
    return out;
}

// realize (ma, mb) with a one-switch two-level psi0 of levels within tmax
bool reconstruct_one_switch(double len, double ma, double mb, double tmax,
                            std::vector<double>& breaks,
                            std::vector<std::array<double, 2>>& values) {
    const double ra = ma / len, rb = mb / len;
    double best_tau = -1.0, best_p = 0.0, best_r = 0.0, best_cost = 1e300;
    auto eval = [&](double tau) {
        const double A = tau - 0.5 * tau * tau;
        const double B = 0.5 * tau * tau;
        const double det = 0.5 * (tau - tau * tau);
        if (std::abs(det) < 1e-14) return 1e300;
        const double p = ((0.5 - B) * ra - (0.5 - A) * rb) / det;
        const double r = (A * rb - B * ra) / det;
        const double cost = std::max(std::abs(p), std::abs(r));
        if (cost < best_cost) {
            best_cost = cost;
            best_tau = tau;
            best_p = p;
            best_r = r;
        }
        return cost;
    };
    for (int j = 1; j < 2048; ++j) eval(j / 2048.0);
    // local ternary refinement around the best grid point
    double lo = std::max(1e-9, best_tau - 2.0 / 2048.0);
    double hi = std::min(1.0 - 1e-9, best_tau + 2.0 / 2048.0);
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (eval(m1) <= eval(m2))
            hi = m2;
        else
            lo = m1;
    }
    if (best_cost > tmax + 1e-9) return false;
    breaks = {0.0, best_tau, 1.0};
    values = {{best_p, best_p}, {best_r, best_r}};
    return true;
}

struct Analysis {
    std::vector<ElementPartition> partitions;
    std::vector<int> zero_elements;
    std::vector<double> fixed;  // c_i per free node, from the sign regions
};

Analysis analyse(const P1Space& space, const FEFunction& f, const TargetFunction& u) {
    if (!u.affine_per_element())
        throw InvalidProblem("certification requires an affine-per-element target");
    const double ztol = zero_tolerance(u);
    Analysis an;
    an.fixed.assign(static_cast<std::size_t>(space.n_free()), 0.0);
    std::vector<std::vector<double>> contrib(static_cast<std::size_t>(space.n_free()));

    for (int e = 0; e < space.n_elements(); ++e) {
        const auto nodes = space.element_nodes(e);
        const auto verts = space.element_vertices(e);
        std::vector<double> r_vals = target_vertex_values(u, verts);
        for (std::size_t k = 0; k < nodes.size(); ++k) r_vals[k] -= f.coeff(nodes[k]);

        ElementPartition part = partition_element(verts, r_vals, ztol);
        if (part.regions.size() == 1 && part.regions[0].sign == RegionSign::ZERO) {
            an.zero_elements.push_back(e);
        } else {
            for (const auto& region : part.regions) {
                const double s = region.sign == RegionSign::POS ? 1.0 : -1.0;
                for (std::size_t k = 0; k < nodes.size(); ++k) {
                    const int fi = space.free_index(nodes[k]);
                    if (fi < 0) continue;
                    std::vector<double> hat(nodes.size(), 0.0);
                    hat[k] = 1.0;
                    contrib[static_cast<std::size_t>(fi)].push_back(
                        s * integrate_affine_region(verts, hat, region.polygon));
                }
            }
        }
        an.partitions.push_back(std::move(part));
    }
    for (int i = 0; i < space.n_free(); ++i)
        an.fixed[static_cast<std::size_t>(i)] = pairwise_sum(contrib[static_cast<std::size_t>(i)]);
    return an;
}

// independent recheck of a witness: || \int psi phi_i ||_inf over free nodes
double verify_witness(const P1Space& space, const PsiWitness& w) {
    std::vector<double> res(static_cast<std::size_t>(space.n_free()), 0.0);
    for (int e = 0; e < space.n_elements(); ++e) {
        const auto nodes = space.element_nodes(e);
        const auto verts = space.element_vertices(e);
        for (const auto& region : w.partitions[static_cast<std::size_t>(e)].regions) {
            if (region.sign == RegionSign::ZERO) continue;
            const double s = region.sign == RegionSign::POS ? 1.0 : -1.0;
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                const int fi = space.free_index(nodes[k]);
                if (fi < 0) continue;
                std::vector<double> hat(nodes.size(), 0.0);
                hat[k] = 1.0;
                res[static_cast<std::size_t>(fi)] += s * integrate_affine_region(verts, hat, region.polygon);
            }
        }
    }
    for (const auto& piece : w.zero_pieces) {
        const auto nodes = space.element_nodes(piece.element);
        const auto verts = space.element_vertices(piece.element);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const int fi = space.free_index(nodes[k]);
            if (fi < 0) continue;
            if (!piece.nodal_values.empty()) {
                res[static_cast<std::size_t>(fi)] += product_integral(verts, piece.nodal_values, k);
            } else {
                // 1D sub-pieces in the local coordinate; Simpson is exact for
                // the affine-times-affine integrand
                const double len = verts[1].x - verts[0].x;
                for (std::size_t j = 0; j + 1 < piece.breaks.size(); ++j) {
                    const double s0 = piece.breaks[j], s1 = piece.breaks[j + 1];
                    const double v0 = piece.piece_values[j][0], v1 = piece.piece_values[j][1];
                    auto phi = [&](double s) { return k == 0 ? 1.0 - s : s; };
                    auto psi = [&](double s) {
                        const double t = (s - s0) / (s1 - s0);
                        return v0 + (v1 - v0) * t;
                    };
                    const double sm = 0.5 * (s0 + s1);
                    res[static_cast<std::size_t>(fi)] +=
                        len * (s1 - s0) / 6.0 *
                        (psi(s0) * phi(s0) + 4.0 * psi(sm) * phi(sm) + psi(s1) * phi(s1));
                }
            }
        }
    }
    double m = 0.0;
    for (double v : res) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

CertificateResult certify_l1(const SpacePtr& space, const FEFunction& f, const TargetFunction& u) {
    Analysis an = analyse(*space, f, u);
    const int nfree = space->n_free();

    double cmax = 0.0;
    int worst = -1;
    for (int i = 0; i < nfree; ++i) {
        const double v = std::abs(an.fixed[static_cast<std::size_t>(i)]);
        if (v > cmax) {
            cmax = v;
            worst = space->free_nodes()[static_cast<std::size_t>(i)];
        }
    }

    if (an.zero_elements.empty()) {
        // psi is forced a.e.; the fixed contributions decide outright
        if (cmax <= kFeasTol) {
            PsiWitness w{an.partitions, {}};
            const double resid = verify_witness(*space, w);
            if (resid <= kFeasTol) return {CertVerdict::CERTIFIED, std::move(w), std::nullopt, 1.0};
            return {CertVerdict::UNDECIDED, std::nullopt, std::nullopt, 0.0};
        }
        return {CertVerdict::NOT_OPTIMAL, std::nullopt, worst, -cmax};
    }

    // capacity bound: psi0 cannot beat \int_{zero} phi_i whatever its sign
    std::vector<double> cap(static_cast<std::size_t>(nfree), 0.0);
    for (int e : an.zero_elements) {
        const auto nodes = space->element_nodes(e);
        const auto verts = space->element_vertices(e);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const int fi = space->free_index(nodes[k]);
            if (fi < 0) continue;
            std::vector<double> hat(nodes.size(), 0.0);
            hat[k] = 1.0;
            cap[static_cast<std::size_t>(fi)] += integrate_affine_region(verts, hat, verts);
        }
    }
    for (int i = 0; i < nfree; ++i) {
        const double excess = std::abs(an.fixed[static_cast<std::size_t>(i)]) - cap[static_cast<std::size_t>(i)];
        if (excess > kFeasTol)
            return {CertVerdict::NOT_OPTIMAL, std::nullopt,
                    space->free_nodes()[static_cast<std::size_t>(i)], -excess};
    }

    // LP over the affine psi0 dofs: A x = -c, minimize max |x_k|
    const int ndof = static_cast<int>(an.zero_elements.size()) * space->nodes_per_element();
    DenseMatrix A(nfree, ndof);
    for (std::size_t ze = 0; ze < an.zero_elements.size(); ++ze) {
        const int e = an.zero_elements[ze];
        const auto nodes = space->element_nodes(e);
        const auto verts = space->element_vertices(e);
        for (std::size_t d = 0; d < nodes.size(); ++d) {
            std::vector<double> unit(nodes.size(), 0.0);
            unit[d] = 1.0;
            const int col = static_cast<int>(ze * nodes.size() + d);
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                const int fi = space->free_index(nodes[k]);
                if (fi >= 0) A(fi, col) += product_integral(verts, unit, k);
            }
        }
    }
    std::vector<double> rhs(static_cast<std::size_t>(nfree));
    for (int i = 0; i < nfree; ++i) rhs[static_cast<std::size_t>(i)] = -an.fixed[static_cast<std::size_t>(i)];

    const MinInfNormResult lp = min_inf_norm_solution(A, rhs);
    double margin = lp.status == LpStatus::optimal ? 1.0 - lp.t : 0.0;
    if (lp.status == LpStatus::optimal && lp.t <= 1.0 + kFeasTol) {
        PsiWitness w;
        w.partitions = an.partitions;
        for (std::size_t ze = 0; ze < an.zero_elements.size(); ++ze) {
            const std::size_t nloc = static_cast<std::size_t>(space->nodes_per_element());
            std::vector<double> vals(nloc);
            for (std::size_t d = 0; d < nloc; ++d) vals[d] = lp.x[ze * nloc + d];
            w.zero_pieces.push_back({an.zero_elements[ze], std::move(vals), {}, {}});
        }
        const double resid = verify_witness(*space, w);
        if (resid <= kFeasTol && w.sup_norm() <= 1.0 + kFeasTol)
            return {CertVerdict::CERTIFIED, std::move(w), std::nullopt, margin};
        return {CertVerdict::UNDECIDED, std::nullopt, std::nullopt, margin};
    }

    // The affine-per-element class can be too small in 1D: witnesses may
    // switch sign inside a zero element. Solve the exact moment problem over
    // all |psi0| <= t and realize the optimum with a one-switch psi0.
    if (space->dim() == 1) {
        std::vector<MomentElement> elems;
        std::vector<std::pair<int, double>> row_of_var;
        std::vector<int> row_of_free(static_cast<std::size_t>(nfree), -1);
        std::vector<double> row_rhs;
        int n_vars = 0;
        for (int e : an.zero_elements) {
            const auto nodes = space->element_nodes(e);
            MomentElement me{e, space->element_measure(e), {-1, -1}};
            for (std::size_t loc = 0; loc < 2; ++loc) {
                const int fi = space->free_index(nodes[loc]);
                if (fi < 0) continue;
                if (row_of_free[static_cast<std::size_t>(fi)] < 0) {
                    row_of_free[static_cast<std::size_t>(fi)] = static_cast<int>(row_rhs.size());
                    row_rhs.push_back(-an.fixed[static_cast<std::size_t>(fi)]);
                }
                me.var[loc] = n_vars++;
                row_of_var.push_back({row_of_free[static_cast<std::size_t>(fi)], 1.0});
            }
            elems.push_back(me);
        }

        const ExactMomentResult ex =
            exact_moment_minimax(elems, n_vars, row_of_var, row_rhs,
                                 static_cast<int>(row_rhs.size()));
        if (ex.solved) {
            margin = std::max(margin, 1.0 - ex.t);
            if (ex.t <= 1.0 + kFeasTol) {
                PsiWitness w;
                w.partitions = an.partitions;
                bool realized = true;
                for (const auto& me : elems) {
                    PsiWitness::ZeroPiece piece{me.element, {}, {}, {}};
                    if (me.var[0] >= 0 && me.var[1] >= 0) {
                        // the witness bound is what certification needs
                        realized = realized &&
                                   reconstruct_one_switch(
                                       me.length, ex.moments[static_cast<std::size_t>(me.var[0])],
                                       ex.moments[static_cast<std::size_t>(me.var[1])],
                                       1.0 + kFeasTol, piece.breaks, piece.piece_values);
                    } else {
                        const int var = me.var[0] >= 0 ? me.var[0] : me.var[1];
                        const double level =
                            var < 0 ? 0.0
                                    : 2.0 * ex.moments[static_cast<std::size_t>(var)] / me.length;
                        piece.breaks = {0.0, 1.0};
                        piece.piece_values = {{level, level}};
                    }
                    w.zero_pieces.push_back(std::move(piece));
                }
                if (realized) {
                    const double resid = verify_witness(*space, w);
                    if (resid <= kFeasTol && w.sup_norm() <= 1.0 + kFeasTol)
                        return {CertVerdict::CERTIFIED, std::move(w), std::nullopt, 1.0 - ex.t};
                }
            }
        }
    }
    return {CertVerdict::UNDECIDED, std::nullopt, std::nullopt, margin};
}

CertificateResult certify_family_jump(double h, double beta) {
    const theory::JumpSolution sol = theory::jump_family(h, beta);
    Mesh1D mesh({-1.0, -h, 0.0, h, 1.0});
    SpacePtr space = build_space(mesh, Problem::JUMP_1D);
    FEFunction f(space, {-1.0, sol.alpha, sol.beta, sol.gamma, 1.0});
    return certify_l1(space, f, TargetFunction::sgn_x());
}

std::vector<AreaHeuristicEntry> area_heuristic_2d(const TriMesh& mesh) {
    const int nv = mesh.n_vertices();
    std::vector<std::vector<int>> adjacent(static_cast<std::size_t>(nv));
    for (int t = 0; t < mesh.n_triangles(); ++t)
        for (int v : mesh.tri(t)) adjacent[static_cast<std::size_t>(v)].push_back(t);

    auto is_outflow = [&](int v) {
        return mesh.markers()[static_cast<std::size_t>(v)] == BoundaryMarker::outflow;
    };

    std::vector<AreaHeuristicEntry> report;
    for (int v = 0; v < nv; ++v) {
        const auto m = mesh.markers()[static_cast<std::size_t>(v)];
        if (m == BoundaryMarker::inflow || m == BoundaryMarker::outflow) continue;
        double touching = 0.0, remaining = 0.0;
        bool connected = false;
        for (int t : adjacent[static_cast<std::size_t>(v)]) {
            bool touches = false;
            for (int w : mesh.tri(t)) touches = touches || is_outflow(w);
            (touches ? touching : remaining) += mesh.area(t);
            connected = connected || touches;
        }
        if (!connected) continue;
        report.push_back({v, touching, remaining, touching <= remaining + 1e-12});
    }
    return report;
}

}  // namespace lqg
