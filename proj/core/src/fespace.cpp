#include "lqgibbs/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace lqg {

TargetFunction TargetFunction::constant_one() { return {Kind::constant_one, 0, 0, true}; }
TargetFunction TargetFunction::sgn_x() { return {Kind::sgn_x, 0, 0, false}; }

TargetFunction TargetFunction::sine_perturbed(double amplitude, double frequency) {
    return {Kind::sine_perturbed, amplitude, frequency, true};
}

TargetFunction TargetFunction::boundary_layer(double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("boundary layer epsilon must be positive");
    return {Kind::boundary_layer, epsilon, 0, true};
}

TargetFunction TargetFunction::custom(std::function<double(double)> f, bool smooth) {
    TargetFunction t{Kind::custom, 0, 0, smooth};
    t.fn_ = std::move(f);
    return t;
}

double TargetFunction::operator()(double x) const {
    switch (kind_) {
        case Kind::constant_one: return 1.0;
        case Kind::sgn_x: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        case Kind::sine_perturbed: return 1.0 + a_ * std::sin(2.0 * M_PI * b_ * x);
        case Kind::boundary_layer:
            // (1 - e^{-(1-x)/eps}) / (1 - e^{-1/eps}) via expm1 for small eps
            return std::expm1(-(1.0 - x) / a_) / std::expm1(-1.0 / a_);
        case Kind::custom: return fn_(x);
    }
    return 0.0;
}

double TargetFunction::operator()(Point2 p) const {
    if (kind_ != Kind::constant_one)
        throw Unsupported("only the constant target is defined on 2D domains");
    (void)p;
    return 1.0;
}

double TargetFunction::sup_norm_hint() const {
    switch (kind_) {
        case Kind::constant_one:
        case Kind::sgn_x:
        case Kind::boundary_layer: return 1.0;
        case Kind::sine_perturbed: return 1.0 + std::abs(a_);
        case Kind::custom: return 1.0;
    }
    return 1.0;
}

std::string TargetFunction::name() const {
    switch (kind_) {
        case Kind::constant_one: return "const1";
        case Kind::sgn_x: return "sgnx";
        case Kind::sine_perturbed: return "sine";
        case Kind::boundary_layer: return "layer";
        case Kind::custom: return "custom";
    }
    return "?";
}

P1Space::P1Space(AnyMesh mesh, std::map<int, double> constrained)
    : mesh_(std::move(mesh)), constrained_(std::move(constrained)) {
    const int n = n_nodes();
    free_index_.assign(static_cast<std::size_t>(n), -1);
    for (const auto& [node, value] : constrained_) {
        (void)value;
        if (node < 0 || node >= n) throw InvalidProblem("constrained node out of range");
    }
    for (int i = 0; i < n; ++i) {
        if (!constrained_.count(i)) {
            free_index_[static_cast<std::size_t>(i)] = static_cast<int>(free_nodes_.size());
            free_nodes_.push_back(i);
        }
    }
}

int P1Space::n_nodes() const {
    return dim() == 1 ? mesh1d().n_nodes() : mesh2d().n_vertices();
}

int P1Space::n_elements() const {
    return dim() == 1 ? mesh1d().n_elements() : mesh2d().n_triangles();
}

std::vector<int> P1Space::element_nodes(int e) const {
    if (dim() == 1) return {e, e + 1};
    const auto& t = mesh2d().tri(e);
    return {t[0], t[1], t[2]};
}

std::vector<Point2> P1Space::element_vertices(int e) const {
    if (dim() == 1) {
        const auto& m = mesh1d();
        return {{m.node(e), 0.0}, {m.node(e + 1), 0.0}};
    }
    const auto& m = mesh2d();
    const auto& t = m.tri(e);
    return {m.vertex(t[0]), m.vertex(t[1]), m.vertex(t[2])};
}

double P1Space::element_measure(int e) const {
    return dim() == 1 ? mesh1d().length(e) : mesh2d().area(e);
}

Point2 P1Space::node_position(int node) const {
    if (dim() == 1) return {mesh1d().node(node), 0.0};
    return mesh2d().vertex(node);
}

SpacePtr build_space(AnyMesh mesh, Problem problem) {
    std::map<int, double> bc;
    if (problem == Problem::BOUNDARY_1D || problem == Problem::JUMP_1D) {
        const auto* m = std::get_if<Mesh1D>(&mesh);
        if (!m) throw InvalidProblem("1D problem requires a 1D mesh");
        const int last = m->n_nodes() - 1;
        if (problem == Problem::BOUNDARY_1D) {
            bc[0] = 1.0;
            bc[last] = 0.0;
        } else {
            // jump problem lives on (-1,1) and needs a node at the jump
            if (std::abs(m->xmin() + 1.0) > 1e-12 || std::abs(m->xmax() - 1.0) > 1e-12)
                throw InvalidProblem("jump problem requires the domain (-1,1)");
            bool has_zero_node = false;
            for (int i = 0; i < m->n_nodes(); ++i)
                if (std::abs(m->node(i)) <= 1e-14) has_zero_node = true;
            if (!has_zero_node) throw InvalidProblem("jump problem requires a node at x = 0");
            bc[0] = -1.0;
            bc[last] = 1.0;
        }
    } else {
        const auto* m = std::get_if<TriMesh>(&mesh);
        if (!m) throw InvalidProblem("2D problem requires a triangular mesh");
        int n_inflow = 0, n_outflow = 0;
        for (int i = 0; i < m->n_vertices(); ++i) {
            switch (m->markers()[static_cast<std::size_t>(i)]) {
                case BoundaryMarker::inflow: bc[i] = 1.0; ++n_inflow; break;
                case BoundaryMarker::outflow: bc[i] = 0.0; ++n_outflow; break;
                default: break;
            }
        }
        if (n_inflow == 0 || n_outflow == 0)
            throw InvalidProblem("2D problem requires inflow and outflow nodes");
    }
    return std::make_shared<P1Space>(std::move(mesh), std::move(bc));
}

FEFunction::FEFunction(SpacePtr space, std::vector<double> coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(coeffs_.size()) != space_->n_nodes())
        throw DomainError("coefficient count does not match node count");
    for (const auto& [node, value] : space_->constrained())
        coeffs_[static_cast<std::size_t>(node)] = value;
}

FEFunction FEFunction::from_free(SpacePtr space, const std::vector<double>& free_values) {
    if (static_cast<int>(free_values.size()) != space->n_free())
        throw DomainError("free value count does not match free node count");
    std::vector<double> all(static_cast<std::size_t>(space->n_nodes()), 0.0);
    for (int k = 0; k < space->n_free(); ++k)
        all[static_cast<std::size_t>(space->free_nodes()[static_cast<std::size_t>(k)])] =
            free_values[static_cast<std::size_t>(k)];
    return FEFunction(std::move(space), std::move(all));
}

std::vector<double> FEFunction::free_values() const {
    std::vector<double> v(static_cast<std::size_t>(space_->n_free()));
    for (int k = 0; k < space_->n_free(); ++k)
        v[static_cast<std::size_t>(k)] = coeffs_[static_cast<std::size_t>(space_->free_nodes()[static_cast<std::size_t>(k)])];
    return v;
}

void FEFunction::set_free(const std::vector<double>& free_values) {
    if (static_cast<int>(free_values.size()) != space_->n_free())
        throw DomainError("free value count does not match free node count");
    for (int k = 0; k < space_->n_free(); ++k)
        coeffs_[static_cast<std::size_t>(space_->free_nodes()[static_cast<std::size_t>(k)])] =
            free_values[static_cast<std::size_t>(k)];
}

double eval(const FEFunction& f, double x) {
    const auto& space = f.space();
    if (space.dim() != 1) throw DomainError("scalar eval on a 2D space");
    const auto& m = space.mesh1d();
    if (x < m.xmin() - 1e-12 || x > m.xmax() + 1e-12) throw OutOfDomain("point outside domain");
    x = std::clamp(x, m.xmin(), m.xmax());
    const auto& bp = m.breakpoints();
    auto it = std::upper_bound(bp.begin(), bp.end(), x);
    int e = static_cast<int>(it - bp.begin()) - 1;
    e = std::clamp(e, 0, m.n_elements() - 1);
    const double t = (x - m.node(e)) / m.length(e);
    return (1.0 - t) * f.coeff(e) + t * f.coeff(e + 1);
}

double eval(const FEFunction& f, Point2 p) {
    const auto& space = f.space();
    if (space.dim() == 1) return eval(f, p.x);
    const auto& m = space.mesh2d();
    constexpr double tol = 1e-12;
    for (int t = 0; t < m.n_triangles(); ++t) {
        const auto& tr = m.tri(t);
        const Point2 a = m.vertex(tr[0]), b = m.vertex(tr[1]), c = m.vertex(tr[2]);
        const double twice_area = cross(b - a, c - a);
        const double l1 = cross(p - a, c - a) / twice_area;
        const double l2 = cross(b - a, p - a) / twice_area;
        const double l0 = 1.0 - l1 - l2;
        if (l0 >= -tol && l1 >= -tol && l2 >= -tol)
            return l0 * f.coeff(tr[0]) + l1 * f.coeff(tr[1]) + l2 * f.coeff(tr[2]);
    }
    throw OutOfDomain("point outside mesh");
}

OvershootReport nodal_overshoot(const FEFunction& f, const TargetFunction& u) {
    const auto& space = f.space();
    OvershootReport rep;
    double worst = -1.0;
    // constrained nodes carry the prescribed boundary mismatch; only the
    // free nodes can oscillate
    for (int i : space.free_nodes()) {
        const Point2 p = space.node_position(i);
        const double uv = space.dim() == 1 ? u(p.x) : u(p);
        const double d = f.coeff(i) - uv;
        rep.max_over = std::max(rep.max_over, d);
        rep.max_under = std::max(rep.max_under, -d);
        if (std::abs(d) > worst) {
            worst = std::abs(d);
            rep.worst_node = i;
        }
    }
    return rep;
}

}  // namespace lqg
