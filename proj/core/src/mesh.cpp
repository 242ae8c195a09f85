#include "lqgibbs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace lqg {

double triangle_area(Point2 a, Point2 b, Point2 c) {
    return 0.5 * cross(b - a, c - a);
}

Mesh1D::Mesh1D(std::vector<double> breakpoints) : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.size() < 2) throw InvalidMesh("mesh needs at least 2 breakpoints");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1]))
            throw InvalidMesh("breakpoints must be strictly increasing");
    }
}

std::vector<double> Mesh1D::element_lengths() const {
    std::vector<double> h(static_cast<std::size_t>(n_elements()));
    for (int e = 0; e < n_elements(); ++e) h[static_cast<std::size_t>(e)] = length(e);
    return h;
}

Mesh1D interval_mesh(std::vector<double> breakpoints) { return Mesh1D(std::move(breakpoints)); }

Mesh1D uniform_mesh(double a, double b, int n) {
    if (n < 1 || !(b > a)) throw InvalidMesh("uniform_mesh: need n >= 1 and b > a");
    std::vector<double> x(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) x[static_cast<std::size_t>(i)] = a + (b - a) * i / n;
    x.front() = a;
    x.back() = b;
    return Mesh1D(std::move(x));
}

namespace {

std::array<int, 3> canonical_rotation(std::array<int, 3> t) {
    // lowest vertex index first, cyclic order (hence orientation) preserved
    if (t[1] < t[0] && t[1] < t[2]) return {t[1], t[2], t[0]};
    if (t[2] < t[0] && t[2] < t[1]) return {t[2], t[0], t[1]};
    return t;
}

}  // namespace

TriMesh::TriMesh(std::vector<Point2> vertices,
                 std::vector<std::array<int, 3>> triangles,
                 std::vector<BoundaryMarker> markers)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), markers_(std::move(markers)) {
    if (markers_.size() != vertices_.size())
        throw InvalidMesh("marker count does not match vertex count");
    const int nv = n_vertices();
    for (auto& t : triangles_) {
        for (int k : t)
            if (k < 0 || k >= nv) throw InvalidMesh("triangle vertex index out of range");
        if (!(triangle_area(vertices_[static_cast<std::size_t>(t[0])],
                            vertices_[static_cast<std::size_t>(t[1])],
                            vertices_[static_cast<std::size_t>(t[2])]) > 0.0))
            throw InvalidMesh("triangle is not counter-clockwise / degenerate");
        t = canonical_rotation(t);
    }
}

double TriMesh::area(int t) const {
    const auto& tr = tri(t);
    return triangle_area(vertex(tr[0]), vertex(tr[1]), vertex(tr[2]));
}

Point2 TriMesh::centroid(int t) const {
    const auto& tr = tri(t);
    Point2 c = vertex(tr[0]) + vertex(tr[1]) + vertex(tr[2]);
    return {c.x / 3.0, c.y / 3.0};
}

namespace {

BoundaryMarker unit_square_marker(Point2 p) {
    if (p.x == 0.0) return BoundaryMarker::inflow;
    if (p.x == 1.0) return BoundaryMarker::outflow;
    if (p.y == 0.0 || p.y == 1.0) return BoundaryMarker::lateral;
    return BoundaryMarker::interior;
}

std::vector<BoundaryMarker> unit_square_markers(const std::vector<Point2>& v) {
    std::vector<BoundaryMarker> m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m[i] = unit_square_marker(v[i]);
    return m;
}

// MESH2/3/4 share the 3x3 node grid, row-major:
//   0 (0,0)   1 (.5,0)   2 (1,0)
//   3 (0,.5)  4 (.5,.5)  5 (1,.5)
//   6 (0,1)   7 (.5,1)   8 (1,1)
// Element numbering below reproduces the published tau_0..tau_7 labels.
std::vector<Point2> grid3x3() {
    std::vector<Point2> v;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) v.push_back({0.5 * i, 0.5 * j});
    return v;
}

TriMesh crisscross(int n) {
    // (n+1)^2 grid points row-major, then n^2 cell centers row-major.
    std::vector<Point2> v;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) v.push_back({double(i) / n, double(j) / n});
    const int centers0 = static_cast<int>(v.size());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) v.push_back({(i + 0.5) / n, (j + 0.5) / n});

    auto g = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<std::array<int, 3>> tris;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int c = centers0 + j * n + i;
            tris.push_back({g(i, j), g(i + 1, j), c});          // bottom
            tris.push_back({g(i + 1, j), g(i + 1, j + 1), c});  // right
            tris.push_back({g(i + 1, j + 1), g(i, j + 1), c});  // top
            tris.push_back({g(i, j + 1), g(i, j), c});          // left
        }
    }
    auto markers = unit_square_markers(v);
    return TriMesh(std::move(v), std::move(tris), std::move(markers));
}

}  // namespace

TriMesh structured_square_mesh(SquarePattern pattern, int refine) {
    if (refine < 0) throw DomainError("refine must be >= 0");
    if (pattern == SquarePattern::MESH1) return crisscross(1 << refine);
    if (refine > 0) throw Unsupported("refinement is only defined for MESH1");

    std::vector<Point2> v = grid3x3();
    std::vector<std::array<int, 3>> tris;
    switch (pattern) {
        case SquarePattern::MESH2:
            tris = {{0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4},
                    {3, 4, 7}, {3, 7, 6}, {4, 5, 8}, {4, 8, 7}};
            break;
        case SquarePattern::MESH3:
            tris = {{0, 1, 4}, {0, 4, 3}, {2, 5, 4}, {1, 2, 4},
                    {4, 7, 6}, {3, 4, 6}, {4, 5, 8}, {4, 8, 7}};
            break;
        case SquarePattern::MESH4:
            tris = {{1, 4, 3}, {0, 1, 3}, {1, 2, 5}, {1, 5, 4},
                    {3, 4, 7}, {3, 7, 6}, {5, 8, 7}, {4, 5, 7}};
            break;
        default:
            break;
    }
    auto markers = unit_square_markers(v);
    return TriMesh(std::move(v), std::move(tris), std::move(markers));
}

namespace {

// Three-strip triangulation with x-lines {0, m, s, 1} and 9 y-lines; the 7
// interior nodes on x = s are the ones connected to the outflow boundary by
// an edge. jitter perturbs the interior y-coordinates of the x = m column.
TriMesh strip_mesh(double m, double s, double jitter) {
    const int rows = 8;
    const double xs[4] = {0.0, m, s, 1.0};
    std::vector<Point2> v;
    for (int j = 0; j <= rows; ++j) {
        for (int i = 0; i < 4; ++i) {
            double y = double(j) / rows;
            if (i == 1 && j > 0 && j < rows) y += jitter * ((j % 3) - 1);
            v.push_back({xs[i], y});
        }
    }
    auto id = [](int i, int j) { return j * 4 + i; };
    std::vector<std::array<int, 3>> tris;
    for (int j = 0; j < rows; ++j) {
        for (int i = 0; i < 3; ++i) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    auto markers = unit_square_markers(v);
    return TriMesh(std::move(v), std::move(tris), std::move(markers));
}

}  // namespace

TriMesh builtin_unstructured_mesh(const std::string& name) {
    if (name == "meshA") return strip_mesh(0.45, 0.60, 0.02);  // violates the area condition
    if (name == "meshB") return strip_mesh(0.40, 0.75, 0.02);
    if (name == "meshC") return strip_mesh(0.40, 0.85, 0.02);
    throw DomainError("unknown built-in mesh: " + name);
}

// ---------------------------------------------------------------------------
// ASCII format I/O
// ---------------------------------------------------------------------------

namespace {

char marker_char(BoundaryMarker m) {
    switch (m) {
        case BoundaryMarker::inflow: return 'I';
        case BoundaryMarker::outflow: return 'O';
        case BoundaryMarker::lateral: return 'L';
        default: return '.';
    }
}

BoundaryMarker marker_from_char(char c, int line) {
    switch (c) {
        case 'I': return BoundaryMarker::inflow;
        case 'O': return BoundaryMarker::outflow;
        case 'L': return BoundaryMarker::lateral;
        case '.': return BoundaryMarker::interior;
        default: throw ParseError("unknown boundary marker", line);
    }
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct LineReader {
    std::istream& in;
    int line_no = 0;

    bool next(std::istringstream& out) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            out.clear();
            out.str(line);
            return true;
        }
        return false;
    }

    std::istringstream require(const char* what) {
        std::istringstream ss;
        if (!next(ss)) throw ParseError(std::string("unexpected end of file, expected ") + what, line_no + 1);
        return ss;
    }
};

}  // namespace

void save_mesh(const AnyMesh& mesh, std::ostream& out) {
    if (const auto* m1 = std::get_if<Mesh1D>(&mesh)) {
        const int nv = m1->n_nodes();
        const int ne = m1->n_elements();
        out << "lqmesh 1 1\n" << nv << ' ' << ne << '\n';
        for (int i = 0; i < nv; ++i) out << fmt17(m1->node(i)) << '\n';
        for (int e = 0; e < ne; ++e) out << e + 1 << ' ' << e + 2 << '\n';
        for (int i = 0; i < nv; ++i)
            out << (i == 0 ? 'I' : (i == nv - 1 ? 'O' : '.')) << '\n';
        return;
    }
    const auto& m2 = std::get<TriMesh>(mesh);
    out << "lqmesh 1 2\n" << m2.n_vertices() << ' ' << m2.n_triangles() << '\n';
    for (int i = 0; i < m2.n_vertices(); ++i)
        out << fmt17(m2.vertex(i).x) << ' ' << fmt17(m2.vertex(i).y) << '\n';
    for (int t = 0; t < m2.n_triangles(); ++t) {
        const auto& tr = m2.tri(t);
        out << tr[0] + 1 << ' ' << tr[1] + 1 << ' ' << tr[2] + 1 << '\n';
    }
    for (int i = 0; i < m2.n_vertices(); ++i) out << marker_char(m2.markers()[static_cast<std::size_t>(i)]) << '\n';
}

void save_mesh(const AnyMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open for writing: " + path);
    save_mesh(mesh, out);
}

AnyMesh load_mesh(std::istream& in) {
    LineReader rd{in};

    auto header = rd.require("header");
    std::string magic;
    int version = 0, dim = 0;
    if (!(header >> magic >> version >> dim) || magic != "lqmesh" || version != 1 || (dim != 1 && dim != 2))
        throw ParseError("malformed header, expected 'lqmesh 1 <dim>'", rd.line_no);

    auto counts = rd.require("counts");
    long nv = 0, ne = 0;
    if (!(counts >> nv >> ne) || nv < 2 || ne < 1)
        throw ParseError("malformed counts line", rd.line_no);

    if (dim == 1) {
        std::vector<double> x(static_cast<std::size_t>(nv));
        for (long i = 0; i < nv; ++i) {
            auto ss = rd.require("coordinate");
            if (!(ss >> x[static_cast<std::size_t>(i)])) throw ParseError("malformed coordinate", rd.line_no);
            if (i > 0 && !(x[static_cast<std::size_t>(i)] > x[static_cast<std::size_t>(i - 1)]))
                throw ParseError("coordinates not strictly increasing", rd.line_no);
        }
        if (ne != nv - 1) throw ParseError("1D element count must be nv - 1", 2);
        for (long e = 0; e < ne; ++e) {
            auto ss = rd.require("element");
            long a = 0, b = 0;
            if (!(ss >> a >> b) || a != e + 1 || b != e + 2)
                throw ParseError("1D elements must be consecutive intervals", rd.line_no);
        }
        for (long i = 0; i < nv; ++i) {
            auto ss = rd.require("marker");
            char c = 0;
            if (!(ss >> c)) throw ParseError("malformed marker", rd.line_no);
            marker_from_char(c, rd.line_no);
        }
        return Mesh1D(std::move(x));
    }

    std::vector<Point2> v(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        auto ss = rd.require("coordinate");
        if (!(ss >> v[static_cast<std::size_t>(i)].x >> v[static_cast<std::size_t>(i)].y))
            throw ParseError("malformed coordinate", rd.line_no);
    }
    std::vector<std::array<int, 3>> tris(static_cast<std::size_t>(ne));
    for (long t = 0; t < ne; ++t) {
        auto ss = rd.require("element");
        long a = 0, b = 0, c = 0;
        if (!(ss >> a >> b >> c) || a < 1 || b < 1 || c < 1 || a > nv || b > nv || c > nv)
            throw ParseError("malformed element line", rd.line_no);
        auto tr = std::array<int, 3>{int(a - 1), int(b - 1), int(c - 1)};
        if (!(triangle_area(v[static_cast<std::size_t>(tr[0])], v[static_cast<std::size_t>(tr[1])],
                            v[static_cast<std::size_t>(tr[2])]) > 0.0))
            throw ParseError("orientation: triangle is not counter-clockwise", rd.line_no);
        tris[static_cast<std::size_t>(t)] = tr;
    }
    std::vector<BoundaryMarker> markers(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        auto ss = rd.require("marker");
        char c = 0;
        if (!(ss >> c)) throw ParseError("malformed marker", rd.line_no);
        markers[static_cast<std::size_t>(i)] = marker_from_char(c, rd.line_no);
    }
    return TriMesh(std::move(v), std::move(tris), std::move(markers));
}

AnyMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open mesh file: " + path);
    return load_mesh(in);
}

AffineMap affine_to_reference(const TriMesh& mesh, int t) {
    const auto& tr = mesh.tri(t);
    const Point2 p0 = mesh.vertex(tr[0]);
    const Point2 p1 = mesh.vertex(tr[1]);
    const Point2 p2 = mesh.vertex(tr[2]);
    const double twice_area = cross(p1 - p0, p2 - p0);
    if (!(twice_area > 0.0)) throw DegenerateElement("degenerate triangle");
    // A = P^{-1} with P = [p1-p0 | p2-p0]; then A p_k + b hits reference vertex k.
    const double inv = 1.0 / twice_area;
    AffineMap map{};
    map.a = {inv * (p2.y - p0.y), -inv * (p2.x - p0.x),
             -inv * (p1.y - p0.y), inv * (p1.x - p0.x)};
    map.b = {-(map.a[0] * p0.x + map.a[1] * p0.y), -(map.a[2] * p0.x + map.a[3] * p0.y)};
    map.jacobian_abs = twice_area;
    return map;
}

void validate_mesh(const TriMesh& mesh) {
    std::set<std::pair<int, int>> directed;
    std::map<std::pair<int, int>, int> undirected;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        if (!(mesh.area(t) > 0.0)) throw InvalidMesh("non-positive triangle area");
        const auto& tr = mesh.tri(t);
        for (int k = 0; k < 3; ++k) {
            const int a = tr[static_cast<std::size_t>(k)];
            const int b = tr[static_cast<std::size_t>((k + 1) % 3)];
            if (!directed.insert({a, b}).second)
                throw InvalidMesh("duplicated directed edge (overlapping or flipped triangles)");
            ++undirected[{std::min(a, b), std::max(a, b)}];
        }
    }
    for (const auto& [edge, count] : undirected) {
        if (count > 2) throw InvalidMesh("edge shared by more than two triangles");
        if (count == 1) {
            // boundary edge: both endpoints must carry a boundary marker
            for (int vtx : {edge.first, edge.second}) {
                if (mesh.markers()[static_cast<std::size_t>(vtx)] == BoundaryMarker::interior)
                    throw InvalidMesh("boundary edge touches an interior-marked vertex");
            }
        }
    }
    double xmin = mesh.vertex(0).x, xmax = mesh.vertex(0).x;
    for (int i = 0; i < mesh.n_vertices(); ++i) {
        xmin = std::min(xmin, mesh.vertex(i).x);
        xmax = std::max(xmax, mesh.vertex(i).x);
    }
    for (int i = 0; i < mesh.n_vertices(); ++i) {
        const auto m = mesh.markers()[static_cast<std::size_t>(i)];
        if (m == BoundaryMarker::inflow && std::abs(mesh.vertex(i).x - xmin) > 1e-12)
            throw InvalidMesh("inflow marker away from x = min");
        if (m == BoundaryMarker::outflow && std::abs(mesh.vertex(i).x - xmax) > 1e-12)
            throw InvalidMesh("outflow marker away from x = max");
    }
}

}  // namespace lqg
