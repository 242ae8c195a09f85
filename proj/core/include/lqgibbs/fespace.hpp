#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lqgibbs/mesh.hpp"

namespace lqg {

enum class Problem { BOUNDARY_1D, JUMP_1D, BOUNDARY_2D };

/// Right-hand side of the best-approximation problem. CONSTANT_ONE and SGN_X
/// are affine (in fact constant) on every element and admit exact sign
/// splitting; SINE_PERTURBED / BOUNDARY_LAYER / smooth CUSTOM use the
/// one-dimensional smooth-target path.
class TargetFunction {
public:
    enum class Kind { constant_one, sgn_x, sine_perturbed, boundary_layer, custom };

    static TargetFunction constant_one();
    static TargetFunction sgn_x();
    static TargetFunction sine_perturbed(double amplitude, double frequency);
    static TargetFunction boundary_layer(double epsilon);
    static TargetFunction custom(std::function<double(double)> f, bool smooth);

    Kind kind() const { return kind_; }
    double amplitude() const { return a_; }
    double frequency() const { return b_; }
    double epsilon() const { return a_; }

    double operator()(double x) const;
    double operator()(Point2 p) const;

    /// Targets that restrict to an affine function on every mesh element.
    bool affine_per_element() const {
        return kind_ == Kind::constant_one || kind_ == Kind::sgn_x;
    }
    bool smooth() const { return smooth_; }

    /// Crude bound on |u|_inf used in zero-region tolerances.
    double sup_norm_hint() const;

    std::string name() const;

private:
    TargetFunction(Kind k, double a, double b, bool smooth) : kind_(k), a_(a), b_(b), smooth_(smooth) {}

    Kind kind_;
    double a_ = 0.0;
    double b_ = 0.0;
    bool smooth_ = true;
    std::function<double(double)> fn_;
};

/// Continuous piecewise-linear space over a 1D or 2D mesh with Dirichlet
/// constraints eliminated by bookkeeping: coefficients are stored for all
/// nodes, residuals and Jacobians only ever test against free-node hats.
class P1Space {
public:
    P1Space(AnyMesh mesh, std::map<int, double> constrained);

    int dim() const { return std::holds_alternative<Mesh1D>(mesh_) ? 1 : 2; }
    const AnyMesh& mesh() const { return mesh_; }
    const Mesh1D& mesh1d() const { return std::get<Mesh1D>(mesh_); }
    const TriMesh& mesh2d() const { return std::get<TriMesh>(mesh_); }

    int n_nodes() const;
    int n_elements() const;
    int nodes_per_element() const { return dim() == 1 ? 2 : 3; }

    /// Global node indices of element e (2 in 1D, 3 in 2D, mesh order).
    std::vector<int> element_nodes(int e) const;
    /// Vertex coordinates of element e; 1D elements use the x component.
    std::vector<Point2> element_vertices(int e) const;
    double element_measure(int e) const;

    const std::map<int, double>& constrained() const { return constrained_; }
    const std::vector<int>& free_nodes() const { return free_nodes_; }
    int n_free() const { return static_cast<int>(free_nodes_.size()); }
    bool is_constrained(int node) const { return constrained_.count(node) > 0; }
    /// Position of node in the free list, -1 if constrained.
    int free_index(int node) const { return free_index_[static_cast<std::size_t>(node)]; }

    Point2 node_position(int node) const;

private:
    AnyMesh mesh_;
    std::map<int, double> constrained_;
    std::vector<int> free_nodes_;
    std::vector<int> free_index_;
};

using SpacePtr = std::shared_ptr<const P1Space>;

SpacePtr build_space(AnyMesh mesh, Problem problem);

/// Coefficient vector over all nodes of a P1Space; constrained entries always
/// equal their prescribed values.
class FEFunction {
public:
    FEFunction(SpacePtr space, std::vector<double> coeffs);

    /// Expand free-node values into a full coefficient vector.
    static FEFunction from_free(SpacePtr space, const std::vector<double>& free_values);

    const P1Space& space() const { return *space_; }
    SpacePtr space_ptr() const { return space_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double coeff(int node) const { return coeffs_[static_cast<std::size_t>(node)]; }

    std::vector<double> free_values() const;
    void set_free(const std::vector<double>& free_values);

private:
    SpacePtr space_;
    std::vector<double> coeffs_;
};

double eval(const FEFunction& f, double x);
double eval(const FEFunction& f, Point2 p);

struct OvershootReport {
    double max_over = 0.0;   // max over nodes of (f - u)
    double max_under = 0.0;  // max over nodes of (u - f)
    int worst_node = -1;     // node attaining max(|f - u|)
};

OvershootReport nodal_overshoot(const FEFunction& f, const TargetFunction& u);

}  // namespace lqg
