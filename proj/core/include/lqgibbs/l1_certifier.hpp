#pragma once

#include <optional>
#include <vector>

#include "lqgibbs/fespace.hpp"
#include "lqgibbs/signsplit.hpp"

namespace lqg {

enum class CertVerdict { CERTIFIED, NOT_OPTIMAL, UNDECIDED };

/// Dual witness psi: sgn(u - u_h) on the sign regions, |psi0| <= 1 on the
/// zero elements. psi0 is affine per zero element (nodal_values), except for
/// 1D witnesses that need a sign switch inside an element; those carry
/// sub-pieces in the element-local coordinate instead.
struct PsiWitness {
    struct ZeroPiece {
        int element;
        std::vector<double> nodal_values;            // affine over the element
        std::vector<double> breaks;                  // 1D refinement, incl. 0 and 1
        std::vector<std::array<double, 2>> piece_values;  // end values per sub-piece
    };
    std::vector<ElementPartition> partitions;  // one per element
    std::vector<ZeroPiece> zero_pieces;

    double sup_norm() const;
};

struct CertificateResult {
    CertVerdict verdict;
    std::optional<PsiWitness> witness;   // present iff CERTIFIED
    std::optional<int> violated_node;    // global node index for rejections
    /// CERTIFIED: 1 - t (distance of the witness to the |psi| <= 1 boundary).
    /// NOT_OPTIMAL: negative by the violation amount. UNDECIDED: 1 - t of the
    /// infeasible-within-class LP optimum.
    double margin = 0.0;
};

/// Decide L^1 optimality of the candidate via the annihilation conditions:
/// fixed contributions c_i from the sign regions plus an in-house LP for the
/// free psi0 on zero elements (minimize the sup norm of the psi0 dofs).
/// NOT_OPTIMAL is only declared when rigorous: measure-zero agreement set
/// with nonzero residual, or a capacity bound |c_i| > \int_{zero} phi_i.
/// Witnesses are re-verified by direct integration before CERTIFIED is
/// returned. Requires an affine-per-element target.
CertificateResult certify_l1(const SpacePtr& space, const FEFunction& f,
                             const TargetFunction& u);

/// Certify the closed-form jump-family candidate for sgn(x) on the
/// symmetric four-element mesh (-1,-h,0,h,1).
CertificateResult certify_family_jump(double h, double beta);

struct AreaHeuristicEntry {
    int node;
    double touching_area;   // adjacent triangles with a vertex on the outflow
    double remaining_area;  // all other adjacent triangles
    bool flag;              // touching <= remaining: overshoot expected to vanish
};

/// Per-node area comparison for nodes one edge away from the outflow
/// boundary; flagged nodes are predicted to lose their overshoot as q -> 1.
std::vector<AreaHeuristicEntry> area_heuristic_2d(const TriMesh& mesh);

}  // namespace lqg
