#include <benchmark/benchmark.h>

#include "lqgibbs/l1_certifier.hpp"
#include "lqgibbs/lq_solver.hpp"
#include "lqgibbs/theory.hpp"

using namespace lqg;

static void BM_ResidualAssembly2D(benchmark::State& state) {
    SpacePtr space = build_space(structured_square_mesh(SquarePattern::MESH1, static_cast<int>(state.range(0))),
                                 Problem::BOUNDARY_2D);
    const auto u = TargetFunction::constant_one();
    FEFunction f = solve_l2(space, u);
    for (auto _ : state) {
        auto F = residual_vector(*space, f, u, 1.5);
        benchmark::DoNotOptimize(F);
    }
}
BENCHMARK(BM_ResidualAssembly2D)->Arg(0)->Arg(2)->Arg(3);

static void BM_SmoothedJacobian2D(benchmark::State& state) {
    SpacePtr space = build_space(structured_square_mesh(SquarePattern::MESH1, 2), Problem::BOUNDARY_2D);
    const auto u = TargetFunction::constant_one();
    FEFunction f = solve_l2(space, u);
    for (auto _ : state) {
        auto J = assemble_jacobian(*space, f, u, 1.5, 1e-4);
        benchmark::DoNotOptimize(J);
    }
}
BENCHMARK(BM_SmoothedJacobian2D);

static void BM_SolveL2Refined(benchmark::State& state) {
    SpacePtr space = build_space(structured_square_mesh(SquarePattern::MESH1, static_cast<int>(state.range(0))),
                                 Problem::BOUNDARY_2D);
    const auto u = TargetFunction::constant_one();
    for (auto _ : state) {
        auto f = solve_l2(space, u);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_SolveL2Refined)->Arg(1)->Arg(2)->Arg(3);

static void BM_SolveLqMesh2(benchmark::State& state) {
    SpacePtr space = build_space(structured_square_mesh(SquarePattern::MESH2), Problem::BOUNDARY_2D);
    const auto u = TargetFunction::constant_one();
    SolverOptions opts;
    opts.q_target = 1.0 + 0.1 * static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto rep = solve_lq(space, u, opts);
        benchmark::DoNotOptimize(rep);
    }
}
BENCHMARK(BM_SolveLqMesh2)->Arg(5)->Arg(2)->Arg(1);

static void BM_SolveLqSmoothTarget(benchmark::State& state) {
    SpacePtr space = build_space(uniform_mesh(0, 1, static_cast<int>(state.range(0))),
                                 Problem::BOUNDARY_1D);
    const auto u = TargetFunction::sine_perturbed(0.1, 1.0);
    SolverOptions opts;
    opts.q_target = 1.5;
    for (auto _ : state) {
        auto rep = solve_lq(space, u, opts);
        benchmark::DoNotOptimize(rep);
    }
}
BENCHMARK(BM_SolveLqSmoothTarget)->Arg(5)->Arg(25);

static void BM_CertifyJumpFamily(benchmark::State& state) {
    for (auto _ : state) {
        auto res = certify_family_jump(0.75, 0.4);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_CertifyJumpFamily);

static void BM_CertifyJumpExtreme(benchmark::State& state) {
    // beta = 1 exercises the exact moment path with its cutting-plane LP
    for (auto _ : state) {
        auto res = certify_family_jump(0.75, 1.0);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_CertifyJumpExtreme);

static void BM_ThetaSchedule(benchmark::State& state) {
    std::vector<double> h(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = 0.3 + 0.01 * static_cast<double>(i % 7);
    for (auto _ : state) {
        auto s = theory::theta_schedule(h);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_ThetaSchedule)->Arg(16)->Arg(256);

static void BM_AlphaMesh1Lq(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(theory::alpha_mesh1_lq(1.2));
    }
}
BENCHMARK(BM_AlphaMesh1Lq);

BENCHMARK_MAIN();
