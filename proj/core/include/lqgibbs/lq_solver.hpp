#pragma once

#include <vector>

#include "lqgibbs/fespace.hpp"
#include "lqgibbs/linalg.hpp"
#include "lqgibbs/signsplit.hpp"

namespace lqg {

struct SolverOptions {
    double q_target = 2.0;
    /// Continuation path in q starting at 2; empty selects the geometric
    /// default q_{k+1} = 1 + 0.7 (q_k - 1) downward (1 + 1.4 (q_k - 1) upward)
    /// until within 1e-3 of the target.
    std::vector<double> q_path;
    /// Smoothing continuation within each q stage.
    std::vector<double> eps_schedule = {1e-2, 1e-3, 1e-4, 1e-6};
    double newton_tol = 1e-10;  // on max|F|
    int max_iters = 50;         // per stage
    double damping = 0.5;       // backtracking factor on max|F|
};

struct StageInfo {
    double q;
    double eps;  // 0 marks the unsmoothed polish
    int iterations;
};

struct SolveReport {
    FEFunction coeffs;
    double residual_norm;  // unsmoothed max|F| at the returned coefficients
    std::vector<StageInfo> stages;
    bool converged;
};

/// Constrained L^2 projection: one linear solve with the exact P1 mass matrix.
FEFunction solve_l2(const SpacePtr& space, const TargetFunction& u);

/// Smoothed Newton with continuation in q and in the smoothing parameter,
/// finished by an unsmoothed polish. Throws NonConvergence when a stage
/// exhausts its iteration budget.
SolveReport solve_lq(const SpacePtr& space, const TargetFunction& u, const SolverOptions& opts);

struct SweepRow {
    double q;
    FEFunction coeffs;
    double max_over;
    double max_under;
    bool converged;
};

/// Warm-started continuation down a descending q list; failed rows are
/// marked unconverged instead of aborting the table.
std::vector<SweepRow> sweep_q(const SpacePtr& space, const TargetFunction& u,
                              const std::vector<double>& q_list,
                              const SolverOptions& base = {});

/// Per-node linear extrapolation in (q - 1) from the three smallest-q rows
/// (which must satisfy q <= 1.3). The result is a candidate for the L^1
/// certifier, not a certified optimum.
FEFunction extrapolate_to_l1(const std::vector<SweepRow>& table);

// Smoothed optimality-system assembly (exposed for the derivative checks):
// residual F_i = \int rho(u - u_h) phi_i and Jacobian dF_i/dc_j with
// rho(r) = r (r^2 + eps^2)^{(q-2)/2}; eps = 0 gives the unsmoothed system.
std::vector<double> assemble_residual(const P1Space& space, const FEFunction& f,
                                      const TargetFunction& u, double q, double eps);
DenseMatrix assemble_jacobian(const P1Space& space, const FEFunction& f,
                              const TargetFunction& u, double q, double eps);

}  // namespace lqg
