#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "lqgibbs/errors.hpp"

namespace lqg {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

/// Partition of an interval (a,b) into N subintervals, stored as the
/// strictly increasing breakpoints x_0 < x_1 < ... < x_N.
class Mesh1D {
public:
    explicit Mesh1D(std::vector<double> breakpoints);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    int n_nodes() const { return static_cast<int>(breakpoints_.size()); }
    int n_elements() const { return n_nodes() - 1; }
    double node(int i) const { return breakpoints_[static_cast<std::size_t>(i)]; }
    double length(int e) const { return breakpoints_[e + 1] - breakpoints_[e]; }
    double xmin() const { return breakpoints_.front(); }
    double xmax() const { return breakpoints_.back(); }

    std::vector<double> element_lengths() const;

    friend bool operator==(const Mesh1D&, const Mesh1D&) = default;

private:
    std::vector<double> breakpoints_;
};

enum class BoundaryMarker { interior, inflow, outflow, lateral };

/// Conforming triangulation of a planar domain. Triangles are CCW and stored
/// with the lowest vertex index first so that mesh equality is well defined.
class TriMesh {
public:
    TriMesh(std::vector<Point2> vertices,
            std::vector<std::array<int, 3>> triangles,
            std::vector<BoundaryMarker> markers);

    const std::vector<Point2>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<BoundaryMarker>& markers() const { return markers_; }

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_triangles() const { return static_cast<int>(triangles_.size()); }

    Point2 vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
    const std::array<int, 3>& tri(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
    double area(int t) const;
    Point2 centroid(int t) const;

    friend bool operator==(const TriMesh&, const TriMesh&) = default;

private:
    std::vector<Point2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<BoundaryMarker> markers_;
};

/// Affine map x -> A x + b taking a physical triangle onto the reference
/// triangle (0,0),(1,0),(0,1), vertex k to reference vertex k. jacobian_abs
/// is |physical area| / area(reference) = 2 * area, i.e. the volume factor
/// for pulling integrals back from the reference element.
struct AffineMap {
    std::array<double, 4> a;  // row-major 2x2
    Point2 b;
    double jacobian_abs;

    Point2 apply(Point2 p) const {
        return {a[0] * p.x + a[1] * p.y + b.x, a[2] * p.x + a[3] * p.y + b.y};
    }
};

enum class SquarePattern { MESH1, MESH2, MESH3, MESH4 };

double triangle_area(Point2 a, Point2 b, Point2 c);

Mesh1D interval_mesh(std::vector<double> breakpoints);

/// Uniform partition of (a,b) into n elements.
Mesh1D uniform_mesh(double a, double b, int n);

/// The four unit-square meshes of the two-dimensional study, element and
/// node numbering matching the published element labels tau_0..tau_7.
/// Refinement (criss-cross, MESH1 only) subdivides the background grid,
/// quadrupling the cell count: refine k gives a 2^k x 2^k grid with every
/// cell cut by both diagonals (4^(k+1) triangles).
TriMesh structured_square_mesh(SquarePattern pattern, int refine = 0);

/// Hand-made unstructured meshes for the outflow-area experiments:
/// "meshA" violates the adjacent-area condition at all 7 interior nodes next
/// to the outflow boundary, "meshB" and "meshC" satisfy it ("meshC" with the
/// thinnest outflow strip).
TriMesh builtin_unstructured_mesh(const std::string& name);

using AnyMesh = std::variant<Mesh1D, TriMesh>;

// ASCII mesh format:
//   lqmesh 1 <dim>
//   <nv> <ne>
//   nv coordinate lines (1 or 2 reals, %.17g)
//   ne element lines (2 or 3 one-based vertex indices)
//   nv marker lines (I=inflow, O=outflow, L=lateral, .=interior)
AnyMesh load_mesh(const std::string& path);
AnyMesh load_mesh(std::istream& in);
void save_mesh(const AnyMesh& mesh, const std::string& path);
void save_mesh(const AnyMesh& mesh, std::ostream& out);

AffineMap affine_to_reference(const TriMesh& mesh, int t);

/// Conformity check: positive areas, every edge shared by at most two
/// triangles with opposite orientations, interior edges by exactly two.
/// Throws InvalidMesh on violation.
void validate_mesh(const TriMesh& mesh);

}  // namespace lqg
