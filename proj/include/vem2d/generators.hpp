#pragma once

#include "vem2d/mesh.hpp"

#include <cstdint>

namespace vem {

enum class StructuredKind { square, trapezoid, hex_structured };

// Structured meshes of the unit square (0,1)^2. Boundary edges are labeled
// "left", "right", "bottom", "top".
//   square:    N x N quadrilateral grid, (N+1)^2 vertices.
//   trapezoid: N x N pattern of congruent trapezoids similar to the one with
//              vertices (0,0), (1/2,0), (1/2,2/3), (0,1/3); N must be even.
//   hex:       structured hexagonal tiling clipped to the square; boundary
//              cells may be pentagons/quadrilaterals/triangles.
PolyMesh generate_structured(StructuredKind kind, int N);

// Centroidal Voronoi mesh of the unit square: `cells` random sites (fixed
// seed), `sweeps` Lloyd relaxation passes, cells clipped to the domain.
// Deterministic for a given (cells, seed).
PolyMesh voronoi_lloyd(int cells, std::uint64_t seed, int sweeps = 10);

// Splits every cell into triangles: quads by their better diagonal, larger
// cells by a fan around an inserted centroid vertex. Triangles pass through.
PolyMesh triangulate(const PolyMesh& mesh);

// Quarter of the perforated strip (width B, half-height H, hole radius R,
// hole centered at the origin) meshed by transfinite interpolation between
// the polygonalized quarter arc and the outer top+right boundary path.
// Level 0 uses 32 segments on the arc; each level doubles the resolution.
// Boundary labels: "sym_x" (x=0), "sym_y" (y=0), "top" (y=H), "right" (x=B),
// "hole" (the arc).
struct StripGeometry {
    Real B = 100.0;
    Real H = 180.0;
    Real R = 50.0;
};

PolyMesh quarter_strip_mesh(int level, const StripGeometry& geom = {});

} // namespace vem
