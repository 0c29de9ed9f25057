#include "vem2d/errors.hpp"
#include "vem2d/generators.hpp"
#include "vem2d/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace vem;

namespace {

Real total_area(const PolyMesh& mesh)
{
    Real area = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c)
        area += element_geometry(mesh, c).area;
    return area;
}

PolyMesh five_cell_fixture()
{
    // hand-built Voronoi-like partition of the unit square: a center quad
    // surrounded by four boundary cells
    const std::string text = R"(polymesh 2d
# outer corners
v 0 0
v 1 0
v 1 1
v 0 1
# inner quad
v 0.3 0.25
v 0.75 0.3
v 0.7 0.8
v 0.2 0.7
c 4 5 6 7
c 0 1 5 4
c 1 2 6 5
c 2 3 7 6
c 3 0 4 7
b 0 1 bottom
b 1 2 right
b 2 3 top
b 3 0 left
)";
    return load_mesh(text);
}

} // namespace

TEST(GenerateStructured, SquareN1IsUnitSquare)
{
    const PolyMesh mesh = generate_structured(StructuredKind::square, 1);
    EXPECT_EQ(mesh.num_cells(), 1);
    EXPECT_EQ(mesh.num_vertices(), 4);
    EXPECT_NEAR(total_area(mesh), 1.0, 1e-15);
}

TEST(GenerateStructured, SquareN4Counts)
{
    const PolyMesh mesh = generate_structured(StructuredKind::square, 4);
    EXPECT_EQ(mesh.num_vertices(), 25);
    EXPECT_EQ(mesh.num_cells(), 16);
}

TEST(GenerateStructured, TrapezoidMatchesHandTiling)
{
    const int N = 4;
    const PolyMesh mesh = generate_structured(StructuredKind::trapezoid, N);
    EXPECT_EQ(mesh.num_vertices(), 25);
    EXPECT_EQ(mesh.num_cells(), 16);
    EXPECT_NEAR(total_area(mesh), 1.0, 1e-12);

    // independent construction: prototype (0,0),(1/2,0),(1/2,2/3),(0,1/3)
    // scaled by 2/N and stacked with alternating column phase
    const auto y_of = [&](int k, int j) {
        if (j % 2 == 0)
            return static_cast<Real>(j) / N;
        const Real shortstep = 2.0 / (3.0 * N);
        const Real tallstep = 4.0 / (3.0 * N);
        return static_cast<Real>(j - 1) / N + (k % 2 == 0 ? shortstep : tallstep);
    };
    for (int k = 0; k < N; ++k) {
        for (int j = 0; j < N; ++j) {
            const auto& loop = mesh.cells[k * N + j];
            ASSERT_EQ(loop.size(), 4u);
            const Vec2 expected[4] = {{static_cast<Real>(k) / N, y_of(k, j)},
                                      {static_cast<Real>(k + 1) / N, y_of(k + 1, j)},
                                      {static_cast<Real>(k + 1) / N, y_of(k + 1, j + 1)},
                                      {static_cast<Real>(k) / N, y_of(k, j + 1)}};
            for (int m = 0; m < 4; ++m)
                EXPECT_LT((mesh.vertices[loop[m]] - expected[m]).norm(), 1e-14);
        }
    }
}

TEST(GenerateStructured, InvalidParameters)
{
    EXPECT_THROW(generate_structured(StructuredKind::square, 0), InvalidParameterError);
    EXPECT_THROW(generate_structured(StructuredKind::trapezoid, 3), InvalidParameterError);
}

TEST(GenerateStructured, AllFamiliesSatisfyInvariants)
{
    for (const auto kind :
         {StructuredKind::square, StructuredKind::trapezoid, StructuredKind::hex_structured}) {
        for (const int N : {2, 4, 8}) {
            const PolyMesh mesh = generate_structured(kind, N);
            EXPECT_NO_THROW(check_mesh_invariants(mesh));
            EXPECT_NEAR(total_area(mesh), 1.0, 1e-12);
            for (int c = 0; c < mesh.num_cells(); ++c) {
                const ElementGeometry g = element_geometry(mesh, c);
                Vec2 closure = Vec2::Zero();
                for (const auto& e : g.edges)
                    closure += e.length * e.normal;
                EXPECT_LT(closure.norm(), 1e-12);
            }
        }
    }
}

TEST(GenerateStructured, HexHasPolygonalBoundaryCells)
{
    const PolyMesh mesh = generate_structured(StructuredKind::hex_structured, 8);
    std::set<size_t> sizes;
    for (const auto& cell : mesh.cells)
        sizes.insert(cell.size());
    EXPECT_TRUE(sizes.count(6) > 0);
    EXPECT_GT(sizes.size(), 1u); // clipped boundary cells
}

TEST(LoadMesh, RoundTripIdentity)
{
    for (const auto kind :
         {StructuredKind::square, StructuredKind::trapezoid, StructuredKind::hex_structured}) {
        const PolyMesh mesh = generate_structured(kind, 2);
        const PolyMesh back = load_mesh(serialize(mesh));
        ASSERT_EQ(back.num_vertices(), mesh.num_vertices());
        ASSERT_EQ(back.num_cells(), mesh.num_cells());
        for (int v = 0; v < mesh.num_vertices(); ++v)
            EXPECT_EQ(back.vertices[v], mesh.vertices[v]); // exact after 17-digit print
        EXPECT_EQ(back.cells, mesh.cells);
        ASSERT_EQ(back.boundary_edges.size(), mesh.boundary_edges.size());
        for (size_t b = 0; b < mesh.boundary_edges.size(); ++b) {
            EXPECT_EQ(back.boundary_edges[b].a, mesh.boundary_edges[b].a);
            EXPECT_EQ(back.boundary_edges[b].b, mesh.boundary_edges[b].b);
            EXPECT_EQ(back.boundary_edges[b].label, mesh.boundary_edges[b].label);
        }
    }
}

TEST(LoadMesh, DanglingVertexIndexNamesCell)
{
    const std::string text = "polymesh 2d\nv 0 0\nv 1 0\nv 0 1\nc 0 1 7\nb 0 1 g\nb 1 7 g\nb 7 0 g\n";
    try {
        load_mesh(text);
        FAIL() << "expected parse error";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("cell 0"), std::string::npos);
    }
}

TEST(LoadMesh, FiveCellFixtureTilesBoundary)
{
    const PolyMesh mesh = five_cell_fixture();
    EXPECT_EQ(mesh.num_cells(), 5);
    EXPECT_NO_THROW(check_mesh_invariants(mesh));
    EXPECT_NEAR(total_area(mesh), 1.0, 1e-12);
}

TEST(LoadMesh, OpenBoundaryRejected)
{
    const std::string text = "polymesh 2d\nv 0 0\nv 1 0\nv 0 1\nc 0 1 2\nb 0 1 g\nb 1 2 g\n";
    EXPECT_THROW(load_mesh(text), ParseError); // edge (2,0) has no label
}

TEST(LoadMesh, MissingHeaderRejected)
{
    EXPECT_THROW(load_mesh("v 0 0\n"), ParseError);
}

TEST(ElementGeometryTest, UnitSquare)
{
    const PolyMesh mesh = generate_structured(StructuredKind::square, 1);
    const ElementGeometry g = element_geometry(mesh, 0);
    EXPECT_NEAR(g.area, 1.0, 1e-15);
    EXPECT_NEAR(g.diameter, std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(g.centroid.x(), 0.5, 1e-15);
    const Vec2 expected_normals[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
    for (int e = 0; e < 4; ++e) {
        EXPECT_LT((g.edges[e].normal - expected_normals[e]).norm(), 1e-15);
        EXPECT_NEAR(g.edges[e].length, 1.0, 1e-15);
    }
}

TEST(ElementGeometryTest, RightTriangle)
{
    PolyMesh mesh;
    mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
    mesh.cells = {{0, 1, 2}};
    const ElementGeometry g = element_geometry(mesh, 0);
    EXPECT_NEAR(g.area, 0.5, 1e-15);
    EXPECT_NEAR(g.diameter, std::sqrt(2.0), 1e-15);
}

TEST(ElementGeometryTest, RegularHexagonClosedForm)
{
    PolyMesh mesh;
    mesh.cells.push_back({});
    for (int k = 0; k < 6; ++k) {
        const Real theta = std::numbers::pi / 3.0 * k;
        mesh.vertices.emplace_back(std::cos(theta), std::sin(theta));
        mesh.cells[0].push_back(k);
    }
    const ElementGeometry g = element_geometry(mesh, 0);
    EXPECT_NEAR(g.area, 1.5 * std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(g.diameter, 2.0, 1e-15);
}

TEST(ElementGeometryTest, DegenerateCellRejected)
{
    PolyMesh mesh;
    mesh.vertices = {{0, 0}, {1, 0}, {2, 0}};
    mesh.cells = {{0, 1, 2}};
    EXPECT_THROW(element_geometry(mesh, 0), DegenerateElementError);
    EXPECT_THROW(element_geometry(mesh, 5), InvalidParameterError);
}

TEST(Validate, SquareGridQuality)
{
    const PolyMesh mesh = generate_structured(StructuredKind::square, 4);
    const MeshQualityReport report = validate(mesh);
    EXPECT_TRUE(report.all_star_shaped());
    for (const auto& q : report.elements)
        EXPECT_NEAR(q.min_edge_ratio, 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(Validate, LCellWithCentroidOutsideKernel)
{
    // long-limbed L: kernel is [0,1]^2 but the vertex centroid sits at
    // (5/3, 5/3), outside the region entirely
    PolyMesh mesh;
    mesh.vertices = {{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 4}, {0, 4}};
    mesh.cells = {{0, 1, 2, 3, 4, 5}};
    const MeshQualityReport report = validate(mesh);
    ASSERT_EQ(report.elements.size(), 1u);
    EXPECT_FALSE(report.elements[0].star_shaped);
}

TEST(Validate, HexGridAllStarShaped)
{
    const PolyMesh mesh = generate_structured(StructuredKind::hex_structured, 8);
    EXPECT_TRUE(validate(mesh).all_star_shaped());
}

TEST(Voronoi, DeterministicConformingPartition)
{
    const PolyMesh mesh = voronoi_lloyd(40, 0);
    EXPECT_EQ(mesh.num_cells(), 40);
    EXPECT_NO_THROW(check_mesh_invariants(mesh));
    EXPECT_NEAR(total_area(mesh), 1.0, 1e-12);
    EXPECT_TRUE(validate(mesh).all_star_shaped());

    const PolyMesh again = voronoi_lloyd(40, 0);
    EXPECT_EQ(serialize(mesh), serialize(again));
    const PolyMesh other = voronoi_lloyd(40, 1);
    EXPECT_NE(serialize(mesh), serialize(other));
}

TEST(Voronoi, SeveralSizesSatisfyInvariants)
{
    for (const int n : {10, 100}) {
        const PolyMesh mesh = voronoi_lloyd(n, 0);
        EXPECT_NO_THROW(check_mesh_invariants(mesh));
        EXPECT_NEAR(total_area(mesh), 1.0, 1e-12);
    }
}

TEST(StripMesh, GeometryAndLabels)
{
    const StripGeometry geom;
    const PolyMesh mesh = quarter_strip_mesh(0, geom);
    EXPECT_NO_THROW(check_mesh_invariants(mesh));
    EXPECT_TRUE(validate(mesh).all_star_shaped());

    std::set<std::string> labels;
    for (const auto& be : mesh.boundary_edges)
        labels.insert(be.label);
    EXPECT_EQ(labels, (std::set<std::string>{"sym_x", "sym_y", "hole", "top", "right"}));

    bool has_a = false, has_b = false;
    for (const auto& v : mesh.vertices) {
        has_a = has_a || (v - Vec2(0.0, geom.R)).norm() < 1e-12;
        has_b = has_b || (v - Vec2(geom.R, 0.0)).norm() < 1e-12;
    }
    EXPECT_TRUE(has_a);
    EXPECT_TRUE(has_b);

    // domain area: B*H minus the quarter disk, up to arc polygonalization
    const Real exact = geom.B * geom.H - 0.25 * std::numbers::pi * geom.R * geom.R;
    EXPECT_NEAR(total_area(mesh), exact, 2.0);
}

TEST(Triangulate, PreservesAreaAndConformity)
{
    for (const auto kind : {StructuredKind::square, StructuredKind::hex_structured}) {
        const PolyMesh mesh = generate_structured(kind, 4);
        const PolyMesh tri = triangulate(mesh);
        EXPECT_NO_THROW(check_mesh_invariants(tri));
        EXPECT_NEAR(total_area(tri), 1.0, 1e-12);
        for (const auto& cell : tri.cells)
            EXPECT_EQ(cell.size(), 3u);
    }
}
