// Acceptance suite: runs every published-value criterion at its stated
// tolerance and prints one PASS/FAIL line each. Exit code 1 if any fail.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lqgibbs/l1_certifier.hpp"
#include "lqgibbs/lq_solver.hpp"
#include "lqgibbs/mesh.hpp"
#include "lqgibbs/theory.hpp"
#include "oracles.hpp"

using namespace lqg;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s — %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
    if (!ok) ++g_failures;
}

bool near(double got, double want, double tol) { return std::abs(got - want) <= tol; }

std::string num2(double a, double b) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "got %.8g, want %.8g", a, b);
    return buf;
}

// ---------------------------------------------------------------------------

void criterion1_closed_form_roots() {
    const double a1 = theory::alpha_mesh1_l1();
    report("1a closed-form root 2a^3-5a+2 near 1.3200 (tol 5e-4)", near(a1, 1.3200, 5e-4),
           num2(a1, 1.3200));
    const double a2 = theory::alpha_mesh2_l1();
    report("1b closed-form root -3a^3+8a-4 near 1.2723 (tol 5e-4)", near(a2, 1.2723, 5e-4),
           num2(a2, 1.2723));
    const double a3 = theory::alpha_mesh1_lq(2.0);
    report("1c criss-cross alpha(q=2) = 1.5 (tol 1e-10)", near(a3, 1.5, 1e-10), num2(a3, 1.5));
}

void criterion2_two_element() {
    const double a = theory::alpha_two_element_l1(0.75);
    report("2a two-element L1 overshoot sqrt(1.5) (tol 1e-12)", near(a, std::sqrt(1.5), 1e-12),
           num2(a, std::sqrt(1.5)));

    const double b = theory::alpha_two_element_lq(0.5, 2.0);
    report("2b two-element alpha(h=0.5, q=2) = 1.25 (tol 1e-10)", near(b, 1.25, 1e-10),
           num2(b, 1.25));

    // brute-force L2 line search, step 1e-5
    SpacePtr space = build_space(interval_mesh({0.0, 0.5, 1.0}), Problem::BOUNDARY_1D);
    const auto u = TargetFunction::constant_one();
    auto objective = [&](double alpha) {
        return oracle::lq_objective_1d(FEFunction::from_free(space, {alpha}), u, 2.0);
    };
    const double argmin = oracle::grid_minimize(objective, 1.0, 1.5, 1e-5);
    report("2c brute-force L2 line search confirms 1.25 (grid 1e-5)", near(argmin, 1.25, 2e-5),
           num2(argmin, 1.25));
}

void criterion3_fig1() {
    SpacePtr space = build_space(uniform_mesh(0, 1, 4), Problem::BOUNDARY_1D);
    const auto u = TargetFunction::constant_one();
    const FEFunction f2 = solve_l2(space, u);
    const double want2[3] = {1.018, 0.929, 1.268};
    bool ok = true;
    for (int i = 0; i < 3; ++i) ok = ok && near(f2.coeff(i + 1), want2[i], 5e-3);
    report("3a uniform four-element nodal values at q=2 (tol 5e-3)", ok);

    SolverOptions opts;
    opts.q_target = 1.2;
    const FEFunction f12 = solve_lq(space, u, opts).coeffs;
    const double want12[3] = {1.000, 0.992, 1.088};
    ok = true;
    for (int i = 0; i < 3; ++i) ok = ok && near(f12.coeff(i + 1), want12[i], 5e-3);
    report("3b uniform four-element nodal values at q=1.2 (tol 5e-3)", ok);
}

std::vector<double> descending(double from, double to, double step) {
    std::vector<double> v;
    for (double q = from; q >= to - 1e-12; q -= step) v.push_back(q);
    return v;
}

void criterion4_fig10() {
    const auto u = TargetFunction::constant_one();
    const auto qs = descending(2.0, 1.1, 0.1);
    struct Want {
        SquarePattern pattern;
        const char* name;
        double at_q2;
        double at_q11;
    };
    const Want wants[3] = {{SquarePattern::MESH2, "mesh2", 1.417, 1.297},
                           {SquarePattern::MESH3, "mesh3", 1.357, 1.092},
                           {SquarePattern::MESH4, "mesh4", 1.357, 1.092}};
    for (const auto& w : wants) {
        SpacePtr space = build_space(structured_square_mesh(w.pattern), Problem::BOUNDARY_2D);
        const auto table = sweep_q(space, u, qs);
        const double v2 = 1.0 + table.front().max_over;
        const double v11 = 1.0 + table.back().max_over;
        report(std::string("4 ") + w.name + " sweep q=2 (tol 1e-2)", near(v2, w.at_q2, 1e-2),
               num2(v2, w.at_q2));
        report(std::string("4 ") + w.name + " sweep q=1.1 (tol 1e-2)", near(v11, w.at_q11, 1e-2),
               num2(v11, w.at_q11));

        const FEFunction l1 = extrapolate_to_l1(table);
        const double overshoot = nodal_overshoot(l1, u).max_over;
        if (w.pattern == SquarePattern::MESH2) {
            report("4 mesh2 extrapolated q->1 overshoot stays >= 0.25", overshoot >= 0.25,
                   num2(overshoot, 0.27));
        } else {
            report(std::string("4 ") + w.name + " extrapolated q->1 overshoot < 0.1",
                   overshoot < 0.1, num2(overshoot, 0.0));
        }
    }
}

void criterion5_fig7() {
    for (int refine = 0; refine <= 3; ++refine) {
        SpacePtr space = build_space(structured_square_mesh(SquarePattern::MESH1, refine),
                                     Problem::BOUNDARY_2D);
        const FEFunction f = solve_l2(space, TargetFunction::constant_one());
        double maxv = 0.0;
        for (double c : f.coeffs()) maxv = std::max(maxv, c);
        report("5 criss-cross refine " + std::to_string(refine) + " max(u_h) = 1.5 (tol 1e-6)",
               near(maxv, 1.5, 1e-6), num2(maxv, 1.5));
    }
}

void criterion6_three_element() {
    const auto u = TargetFunction::constant_one();
    std::vector<double> qs = descending(2.0, 1.2, 0.1);
    for (double q : {1.1, 1.05, 1.02, 1.01, 1.009, 1.008}) qs.push_back(q);

    SpacePtr mesh_a = build_space(interval_mesh({0.0, 0.1, 0.55, 1.0}), Problem::BOUNDARY_1D);
    const auto table_a = sweep_q(mesh_a, u, qs);
    const FEFunction l1a = extrapolate_to_l1(table_a);
    report("6a q->1 extrapolation u_h(0.1) near 0.9931 (tol 5e-3)",
           near(l1a.coeff(1), 0.9931, 5e-3), num2(l1a.coeff(1), 0.9931));
    report("6b q->1 extrapolation u_h(0.55) near 1.0247 (tol 5e-3)",
           near(l1a.coeff(2), 1.0247, 5e-3), num2(l1a.coeff(2), 1.0247));

    SpacePtr mesh_b = build_space(interval_mesh({0.0, 0.1, 0.6, 1.0}), Problem::BOUNDARY_1D);
    const auto table_b = sweep_q(mesh_b, u, qs);
    const FEFunction l1b = extrapolate_to_l1(table_b);
    const auto rep_b = nodal_overshoot(l1b, u);
    const double over_b = std::max(rep_b.max_over, rep_b.max_under);
    report("6c graded mesh (0.1,0.5,0.4): extrapolated overshoot <= 1e-3", over_b <= 1e-3,
           num2(over_b, 0.0));

    const double err_a2 = std::max(table_a.front().max_over, table_a.front().max_under);
    const double err_b2 = std::max(table_b.front().max_over, table_b.front().max_under);
    report("6d max nodal error at q=2, h2=0.45 (tol 1e-3)", near(err_a2, 0.278481, 1e-3),
           num2(err_a2, 0.278481));
    report("6e max nodal error at q=2, h2=0.5 (tol 1e-3)", near(err_b2, 0.251309, 1e-3),
           num2(err_b2, 0.251309));
}

void criterion7_certificates() {
    const auto u = TargetFunction::constant_one();

    bool ok = true;
    for (double h : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        SpacePtr space = build_space(interval_mesh({0.0, 1.0 - h, 1.0}), Problem::BOUNDARY_1D);
        FEFunction f = FEFunction::from_free(space, {theory::alpha_two_element_l1(h)});
        ok = ok && certify_l1(space, f, u).verdict == CertVerdict::CERTIFIED;
    }
    report("7a two-element closed forms CERTIFIED on the h grid", ok);

    ok = true;
    for (double h : {0.2, 0.4, 0.6, 0.8}) {
        for (double beta : {-1.0, -0.4, 0.0, 0.5, 1.0}) {
            ok = ok && certify_family_jump(h, beta).verdict == CertVerdict::CERTIFIED;
        }
    }
    report("7b jump family CERTIFIED on the (h, beta) grid", ok);

    auto square = [&](SquarePattern p, std::vector<double> vals) {
        SpacePtr space = build_space(structured_square_mesh(p), Problem::BOUNDARY_2D);
        return certify_l1(space, FEFunction::from_free(space, vals), u);
    };
    report("7c mesh3 all-ones CERTIFIED",
           square(SquarePattern::MESH3, {1, 1, 1}).verdict == CertVerdict::CERTIFIED);
    report("7d mesh4 all-ones CERTIFIED",
           square(SquarePattern::MESH4, {1, 1, 1}).verdict == CertVerdict::CERTIFIED);
    report("7e mesh1 all-ones NOT_OPTIMAL",
           square(SquarePattern::MESH1, {1.0}).verdict == CertVerdict::NOT_OPTIMAL);

    ok = true;
    for (double h : {0.2, 0.5, 0.8}) {
        const double alpha = theory::alpha_two_element_l1(h) + 0.05;
        SpacePtr space = build_space(interval_mesh({0.0, 1.0 - h, 1.0}), Problem::BOUNDARY_1D);
        FEFunction f = FEFunction::from_free(space, {alpha});
        ok = ok && certify_l1(space, f, u).verdict == CertVerdict::NOT_OPTIMAL;
    }
    report("7f perturbed measure-zero candidates NOT_OPTIMAL", ok);

    // every certificate above re-verifies its witness internally to 1e-9;
    // confirm the reported witnesses satisfy the sup-norm bound
    const auto res = square(SquarePattern::MESH4, {1, 1, 1});
    report("7g reported witness obeys |psi| <= 1 + 1e-9",
           res.witness.has_value() && res.witness->sup_norm() <= 1.0 + 1e-9);
}

void criterion8_property_suites() {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unif(-0.3, 1.4);

    // Jacobian vs central finite differences
    bool ok = true;
    {
        SpacePtr space = build_space(uniform_mesh(0, 1, 5), Problem::BOUNDARY_1D);
        const auto u = TargetFunction::constant_one();
        for (double q : {1.3, 2.0, 3.0}) {
            for (double eps : {1e-2, 1e-4}) {
                std::vector<double> c(static_cast<std::size_t>(space->n_free()));
                for (auto& v : c) v = unif(rng);
                FEFunction f = FEFunction::from_free(space, c);
                const DenseMatrix J = assemble_jacobian(*space, f, u, q, eps);
                auto residual_of = [&](const std::vector<double>& x) {
                    FEFunction g = FEFunction::from_free(space, x);
                    return assemble_residual(*space, g, u, q, eps);
                };
                const auto fd = oracle::fd_jacobian(residual_of, c, 1e-6);
                double scale = 0.0, diff = 0.0;
                for (int i = 0; i < space->n_free(); ++i) {
                    for (int j = 0; j < space->n_free(); ++j) {
                        scale = std::max(scale, std::abs(J(i, j)));
                        diff = std::max(diff, std::abs(J(i, j) -
                                                       fd[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]));
                    }
                }
                ok = ok && diff <= 1e-5 * scale;
            }
        }
    }
    report("8a assembled Jacobian matches finite differences (rel 1e-5)", ok);

    // partition of unity and measure conservation
    ok = true;
    {
        SpacePtr space = build_space(structured_square_mesh(SquarePattern::MESH1, 1),
                                     Problem::BOUNDARY_2D);
        P1Space plain(space->mesh(), {});
        auto plain_ptr = std::make_shared<const P1Space>(plain);
        FEFunction ones(plain_ptr,
                        std::vector<double>(static_cast<std::size_t>(plain_ptr->n_nodes()), 1.0));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const Point2 p{unit(rng), unit(rng)};
            ok = ok && std::abs(eval(ones, p) - 1.0) <= 1e-13;
        }
        std::uniform_real_distribution<double> rv(-1.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const Point2 a{rv(rng), rv(rng)}, b{rv(rng), rv(rng)}, c{rv(rng), rv(rng)};
            if (triangle_area(a, b, c) < 1e-3) continue;
            const std::vector<Point2> verts{a, b, c};
            const auto part =
                partition_element(verts, std::vector<double>{rv(rng), rv(rng), rv(rng)}, 1e-10);
            double sum = 0.0;
            for (const auto& region : part.regions) sum += region.measure;
            ok = ok && std::abs(sum - triangle_area(a, b, c)) <= 1e-13 * (1.0 + triangle_area(a, b, c));
        }
    }
    report("8b partition of unity and measure conservation (tol 1e-13)", ok);

    // q = 2 residual equals the linear projection residual
    ok = true;
    {
        SpacePtr space = build_space(structured_square_mesh(SquarePattern::MESH2),
                                     Problem::BOUNDARY_2D);
        const auto u = TargetFunction::constant_one();
        std::vector<double> c(static_cast<std::size_t>(space->n_free()));
        for (auto& v : c) v = unif(rng);
        FEFunction f = FEFunction::from_free(space, c);
        const auto F = residual_vector(*space, f, u, 2.0);
        std::vector<double> want(F.size(), 0.0);
        for (int e = 0; e < space->n_elements(); ++e) {
            const auto nodes = space->element_nodes(e);
            const double m = space->element_measure(e);
            for (std::size_t k = 0; k < 3; ++k) {
                const int fi = space->free_index(nodes[k]);
                if (fi < 0) continue;
                for (std::size_t l = 0; l < 3; ++l)
                    want[static_cast<std::size_t>(fi)] +=
                        (k == l ? m / 6.0 : m / 12.0) * (1.0 - f.coeff(nodes[l]));
            }
        }
        for (std::size_t i = 0; i < F.size(); ++i) ok = ok && std::abs(F[i] - want[i]) <= 1e-12;
    }
    report("8c q=2 residual equals exact projection residual (tol 1e-12)", ok);

    // jump solutions odd
    ok = true;
    for (double h : {0.25, 0.75}) {
        SpacePtr space = build_space(interval_mesh({-1.0, -h, 0.0, h, 1.0}), Problem::JUMP_1D);
        SolverOptions opts;
        opts.q_target = 1.4;
        const FEFunction f = solve_lq(space, TargetFunction::sgn_x(), opts).coeffs;
        ok = ok && std::abs(f.coeff(2)) <= 1e-9 && std::abs(f.coeff(1) + f.coeff(3)) <= 1e-9;
    }
    report("8d jump-problem solutions odd (tol 1e-9)", ok);

    // theta schedule feasible when the last element is smallest
    ok = true;
    {
        std::uniform_real_distribution<double> len(0.05, 1.0);
        std::uniform_int_distribution<int> count(2, 12);
        for (int trial = 0; trial < 1000; ++trial) {
            const int n = count(rng);
            std::vector<double> h(static_cast<std::size_t>(n));
            double hmin = 1e30;
            for (int i = 0; i < n - 1; ++i) {
                h[static_cast<std::size_t>(i)] = len(rng);
                hmin = std::min(hmin, h[static_cast<std::size_t>(i)]);
            }
            h[static_cast<std::size_t>(n - 1)] = hmin * len(rng);
            ok = ok && theory::theta_schedule(h).graded_condition_holds();
        }
    }
    report("8e theta schedule feasible on 1000 random min-last meshes", ok);
}

}  // namespace

int main() {
    criterion1_closed_form_roots();
    criterion2_two_element();
    criterion3_fig1();
    criterion4_fig10();
    criterion5_fig7();
    criterion6_three_element();
    criterion7_certificates();
    criterion8_property_suites();
    std::printf("%s (%d failure%s)\n", g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                g_failures, g_failures == 1 ? "" : "s");
    return g_failures == 0 ? 0 : 1;
}
