#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "lqgibbs/mesh.hpp"

using namespace lqg;

namespace {

bool has_triangle(const TriMesh& m, int t, std::set<std::pair<double, double>> want) {
    std::set<std::pair<double, double>> got;
    for (int v : m.tri(t)) got.insert({m.vertex(v).x, m.vertex(v).y});
    return got == want;
}

double total_area(const TriMesh& m) {
    double s = 0.0;
    for (int t = 0; t < m.n_triangles(); ++t) s += m.area(t);
    return s;
}

}  // namespace

TEST_CASE("interval_mesh basics") {
    const Mesh1D m = interval_mesh({0, 0.25, 0.5, 0.75, 1});
    CHECK(m.n_elements() == 4);
    CHECK(m.length(1) == doctest::Approx(0.25).epsilon(1e-15));

    const Mesh1D single = interval_mesh({0, 1});
    CHECK(single.n_elements() == 1);
    CHECK(single.length(0) == 1.0);

    const Mesh1D three = interval_mesh({0, 0.1, 0.55, 1});
    const auto h = three.element_lengths();
    CHECK(h[0] == doctest::Approx(0.1));
    CHECK(h[1] == doctest::Approx(0.45));
    CHECK(h[2] == doctest::Approx(0.45));

    CHECK_THROWS_AS(interval_mesh({0, 0.5, 0.5, 1}), InvalidMesh);
    CHECK_THROWS_AS(interval_mesh({1.0}), InvalidMesh);
}

TEST_CASE("structured square meshes match the published layouts") {
    const TriMesh m1 = structured_square_mesh(SquarePattern::MESH1);
    CHECK(m1.n_triangles() == 4);
    CHECK(m1.n_vertices() == 5);
    // tau_3 is the inflow-side triangle
    CHECK(has_triangle(m1, 3, {{0, 1}, {0, 0}, {0.5, 0.5}}));
    for (int t = 0; t < 4; ++t) CHECK(m1.area(t) == doctest::Approx(0.25).epsilon(1e-15));

    const TriMesh m2 = structured_square_mesh(SquarePattern::MESH2);
    CHECK(m2.n_triangles() == 8);
    CHECK(m2.n_vertices() == 9);
    CHECK(has_triangle(m2, 0, {{0, 0}, {0.5, 0}, {0.5, 0.5}}));
    CHECK(has_triangle(m2, 3, {{0.5, 0}, {1, 0.5}, {0.5, 0.5}}));
    CHECK(has_triangle(m2, 7, {{0.5, 0.5}, {1, 1}, {0.5, 1}}));

    const TriMesh m3 = structured_square_mesh(SquarePattern::MESH3);
    CHECK(has_triangle(m3, 2, {{1, 0}, {1, 0.5}, {0.5, 0.5}}));
    CHECK(has_triangle(m3, 3, {{0.5, 0}, {1, 0}, {0.5, 0.5}}));

    const TriMesh m4 = structured_square_mesh(SquarePattern::MESH4);
    CHECK(has_triangle(m4, 1, {{0, 0}, {0.5, 0}, {0, 0.5}}));
    CHECK(has_triangle(m4, 7, {{0.5, 0.5}, {1, 0.5}, {0.5, 1}}));

    for (const auto& m : {m1, m2, m3, m4}) {
        validate_mesh(m);
        CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("criss-cross refinement quadruples the cells") {
    const TriMesh r2 = structured_square_mesh(SquarePattern::MESH1, 2);
    CHECK(r2.n_triangles() == 64);
    validate_mesh(r2);
    CHECK(total_area(r2) == doctest::Approx(1.0).epsilon(1e-14));
    // every vertex sits on the criss-cross lattice of the 4x4 grid
    for (int v = 0; v < r2.n_vertices(); ++v) {
        const Point2 p = r2.vertex(v);
        const double gx = p.x * 8.0, gy = p.y * 8.0;
        CHECK(gx == doctest::Approx(std::round(gx)).epsilon(1e-14));
        CHECK(gy == doctest::Approx(std::round(gy)).epsilon(1e-14));
    }
    for (int refine = 0; refine <= 3; ++refine) {
        const TriMesh m = structured_square_mesh(SquarePattern::MESH1, refine);
        CHECK(m.n_triangles() == 4 * (1 << (2 * refine)));
        validate_mesh(m);
    }

    CHECK_THROWS_AS(structured_square_mesh(SquarePattern::MESH2, 1), Unsupported);
    CHECK_THROWS_AS(structured_square_mesh(SquarePattern::MESH1, -1), DomainError);
}

TEST_CASE("mesh file round trip is bit exact") {
    const TriMesh m3 = structured_square_mesh(SquarePattern::MESH3);
    std::stringstream buf;
    save_mesh(m3, buf);
    const AnyMesh back = load_mesh(buf);
    CHECK(std::get<TriMesh>(back) == m3);

    const Mesh1D m1 = interval_mesh({0, 0.1, 0.55, 1});
    std::stringstream buf1;
    save_mesh(m1, buf1);
    CHECK(std::get<Mesh1D>(load_mesh(buf1)) == m1);
}

TEST_CASE("mesh loader rejects malformed input with line numbers") {
    {
        std::stringstream in("nonsense 1 2\n");
        CHECK_THROWS_AS(load_mesh(in), ParseError);
    }
    {
        std::stringstream in("lqmesh 1 2\n1 0\n0 0\n");
        CHECK_THROWS_AS(load_mesh(in), ParseError);
    }
    {
        // clockwise triangle
        std::stringstream in("lqmesh 1 2\n3 1\n0 0\n1 0\n0 1\n1 3 2\nI\nO\nL\n");
        try {
            load_mesh(in);
            CHECK(false);
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("orientation") != std::string::npos);
            CHECK(e.line == 6);
        }
    }
    {
        // truncated coordinate block
        std::stringstream in("lqmesh 1 1\n3 2\n0\n0.5\n");
        CHECK_THROWS_AS(load_mesh(in), ParseError);
    }
}

TEST_CASE("built-in unstructured meshes") {
    for (const char* name : {"meshA", "meshB", "meshC"}) {
        const TriMesh m = builtin_unstructured_mesh(name);
        validate_mesh(m);
        CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-14));

        // exactly 7 interior nodes share an edge with the outflow boundary
        std::set<int> adjacent;
        for (int t = 0; t < m.n_triangles(); ++t) {
            const auto& tr = m.tri(t);
            for (int k = 0; k < 3; ++k) {
                const int a = tr[static_cast<std::size_t>(k)];
                const int b = tr[static_cast<std::size_t>((k + 1) % 3)];
                const bool a_out = m.markers()[static_cast<std::size_t>(a)] == BoundaryMarker::outflow;
                const bool b_out = m.markers()[static_cast<std::size_t>(b)] == BoundaryMarker::outflow;
                if (a_out && m.markers()[static_cast<std::size_t>(b)] == BoundaryMarker::interior)
                    adjacent.insert(b);
                if (b_out && m.markers()[static_cast<std::size_t>(a)] == BoundaryMarker::interior)
                    adjacent.insert(a);
            }
        }
        CHECK(adjacent.size() == 7);
    }
    CHECK_THROWS_AS(builtin_unstructured_mesh("meshZ"), DomainError);
}

TEST_CASE("shipped mesh files match the built-in definitions") {
    for (const char* name : {"meshA", "meshB", "meshC"}) {
        const std::string path = std::string(LQGIBBS_DATA_DIR) + "/" + name + ".lqmesh";
        const AnyMesh loaded = load_mesh(path);
        CHECK(std::get<TriMesh>(loaded) == builtin_unstructured_mesh(name));
    }
}

TEST_CASE("affine map to the reference triangle") {
    // identity on the reference triangle itself
    const TriMesh ref({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}},
                      {BoundaryMarker::inflow, BoundaryMarker::outflow, BoundaryMarker::inflow});
    const AffineMap id = affine_to_reference(ref, 0);
    CHECK(id.jacobian_abs == doctest::Approx(1.0).epsilon(1e-15));
    const Point2 p = id.apply({0.3, 0.4});
    CHECK(p.x == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(p.y == doctest::Approx(0.4).epsilon(1e-15));

    // MESH1 triangles: area 1/4 by the shoelace formula, jacobian 1/2
    const TriMesh m1 = structured_square_mesh(SquarePattern::MESH1);
    for (int t = 0; t < 4; ++t) {
        const auto& tr = m1.tri(t);
        const Point2 a = m1.vertex(tr[0]), b = m1.vertex(tr[1]), c = m1.vertex(tr[2]);
        const double shoelace =
            0.5 * std::abs(a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        CHECK(shoelace == doctest::Approx(0.25).epsilon(1e-15));
        const AffineMap map = affine_to_reference(m1, t);
        CHECK(map.jacobian_abs == doctest::Approx(2.0 * shoelace).epsilon(1e-14));
        // vertices land on the reference corners in order
        const Point2 r0 = map.apply(a), r1 = map.apply(b), r2 = map.apply(c);
        CHECK(std::abs(r0.x) + std::abs(r0.y) < 1e-14);
        CHECK(std::abs(r1.x - 1.0) + std::abs(r1.y) < 1e-14);
        CHECK(std::abs(r2.x) + std::abs(r2.y - 1.0) < 1e-14);
    }

    // translation invariance
    const TriMesh shifted({{5, 7}, {6, 7}, {5, 8}}, {{0, 1, 2}},
                          {BoundaryMarker::inflow, BoundaryMarker::outflow, BoundaryMarker::inflow});
    const AffineMap tr = affine_to_reference(shifted, 0);
    CHECK(tr.a[0] == doctest::Approx(1.0));
    CHECK(tr.a[1] == doctest::Approx(0.0));
    CHECK(tr.jacobian_abs == doctest::Approx(1.0));
}

TEST_CASE("degenerate triangles are rejected") {
    CHECK_THROWS_AS(
        TriMesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}},
                {BoundaryMarker::inflow, BoundaryMarker::interior, BoundaryMarker::outflow}),
        InvalidMesh);
}

TEST_CASE("refinements conserve area") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 12; ++trial) {
        const int refine = static_cast<int>(rng() % 4);
        const TriMesh m = structured_square_mesh(SquarePattern::MESH1, refine);
        CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-14));
    }
}
