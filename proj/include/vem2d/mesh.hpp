#pragma once

#include "vem2d/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace vem {

// Boundary edge: vertex pair (in cell traversal order) plus a label naming
// the Dirichlet set it belongs to ("left", "sym_x", "gamma", ...).
struct BoundaryEdge {
    int a = -1;
    int b = -1;
    std::string label;
};

// Conforming polygonal mesh of a 2D domain. Cells are CCW vertex loops;
// immutable after construction (all operations take it by const reference).
struct PolyMesh {
    std::vector<Vec2> vertices;
    std::vector<std::vector<int>> cells;
    std::vector<BoundaryEdge> boundary_edges;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }
};

struct ElementEdge {
    Real length = 0.0;
    Vec2 normal = Vec2::Zero(); // outward unit normal
    int a = -1;                 // local endpoint indices into the cell loop
    int b = -1;
};

struct ElementGeometry {
    Real area = 0.0;
    Real diameter = 0.0;
    Vec2 centroid = Vec2::Zero(); // arithmetic mean of the cell vertices
    std::vector<Vec2> vertex_coords;
    std::vector<ElementEdge> edges;

    int num_vertices() const { return static_cast<int>(vertex_coords.size()); }
};

struct ElementQuality {
    Real min_edge_ratio = 0.0;     // min_e h_e / h_E
    Real kernel_radius_ratio = 0.0; // signed distance of centroid to nearest edge line, over h_E
    bool star_shaped = false;       // w.r.t. the vertex centroid
};

struct MeshQualityReport {
    std::vector<ElementQuality> elements;

    bool all_star_shaped() const
    {
        for (const auto& q : elements)
            if (!q.star_shaped)
                return false;
        return true;
    }
};

ElementGeometry element_geometry(const PolyMesh& mesh, int cell);

// Reporting only: never rejects a mesh.
MeshQualityReport validate(const PolyMesh& mesh);

// Checks the structural invariants (simple CCW cells with positive area,
// interior edges shared by exactly two cells with opposite traversal,
// boundary_edges exactly tiling the topological boundary). Throws on
// violation; used by load_mesh and by the generators' tests.
void check_mesh_invariants(const PolyMesh& mesh);

// Line-based exchange format: "polymesh 2d" header, then `v x y`,
// `c i1 ... ik`, `b i j label` records; `#` starts a comment.
PolyMesh load_mesh(const std::string& text);
std::string serialize(const PolyMesh& mesh);

// Unique undirected edges (a < b) of the mesh.
std::vector<std::pair<int, int>> collect_edges(const PolyMesh& mesh);

} // namespace vem
