#include "vem2d/mesh.hpp"

#include "vem2d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace vem {

namespace {

Real polygon_signed_area(const std::vector<Vec2>& p)
{
    Real twice = 0.0;
    const int n = static_cast<int>(p.size());
    for (int i = 0; i < n; ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % n];
        twice += cross2(a, b);
    }
    return 0.5 * twice;
}

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d)
{
    const Real d1 = cross2(b - a, c - a);
    const Real d2 = cross2(b - a, d - a);
    const Real d3 = cross2(d - c, a - c);
    const Real d4 = cross2(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

bool cell_is_simple(const std::vector<Vec2>& p)
{
    const int n = static_cast<int>(p.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j)
                continue; // adjacent edges share an endpoint
            if (segments_properly_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

} // namespace

ElementGeometry element_geometry(const PolyMesh& mesh, int cell)
{
    if (cell < 0 || cell >= mesh.num_cells())
        throw InvalidParameterError("element_geometry: cell index out of range");
    const auto& loop = mesh.cells[cell];
    const int n = static_cast<int>(loop.size());

    ElementGeometry g;
    g.vertex_coords.reserve(n);
    for (int v : loop)
        g.vertex_coords.push_back(mesh.vertices[v]);

    g.area = polygon_signed_area(g.vertex_coords);
    if (!(g.area > 0.0))
        throw DegenerateElementError("element_geometry: cell " + std::to_string(cell) +
                                     " has non-positive area");

    Vec2 c = Vec2::Zero();
    for (const Vec2& p : g.vertex_coords)
        c += p;
    g.centroid = c / static_cast<Real>(n);

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            g.diameter = std::max(g.diameter, (g.vertex_coords[i] - g.vertex_coords[j]).norm());

    g.edges.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 t = g.vertex_coords[(i + 1) % n] - g.vertex_coords[i];
        ElementEdge& e = g.edges[i];
        e.length = t.norm();
        if (e.length <= 0.0)
            throw DegenerateElementError("element_geometry: zero-length edge in cell " +
                                         std::to_string(cell));
        e.normal = rot90cw(t) / e.length;
        e.a = i;
        e.b = (i + 1) % n;
    }
    return g;
}

MeshQualityReport validate(const PolyMesh& mesh)
{
    MeshQualityReport report;
    report.elements.resize(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const ElementGeometry g = element_geometry(mesh, c);
        ElementQuality& q = report.elements[c];
        q.min_edge_ratio = std::numeric_limits<Real>::max();
        Real min_dist = std::numeric_limits<Real>::max();
        for (const auto& e : g.edges) {
            q.min_edge_ratio = std::min(q.min_edge_ratio, e.length / g.diameter);
            // signed distance of the centroid to the edge line, positive inward
            const Vec2& a = g.vertex_coords[e.a];
            const Vec2& b = g.vertex_coords[e.b];
            const Real dist = cross2(b - a, g.centroid - a) / e.length;
            min_dist = std::min(min_dist, dist);
        }
        q.kernel_radius_ratio = min_dist / g.diameter;
        q.star_shaped = min_dist > 1e-9 * g.diameter;
    }
    return report;
}

void check_mesh_invariants(const PolyMesh& mesh)
{
    const int nv = mesh.num_vertices();
    if (mesh.num_cells() == 0)
        throw InvalidParameterError("mesh has no cells");

    // directed edge -> multiplicity
    std::map<std::pair<int, int>, int> directed;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& loop = mesh.cells[c];
        const int n = static_cast<int>(loop.size());
        if (n < 3)
            throw InvalidParameterError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        std::vector<Vec2> pts;
        pts.reserve(n);
        for (int v : loop) {
            if (v < 0 || v >= nv)
                throw InvalidParameterError("cell " + std::to_string(c) +
                                            " references vertex index " + std::to_string(v) +
                                            " beyond vertex count " + std::to_string(nv));
            pts.push_back(mesh.vertices[v]);
        }
        if (!(polygon_signed_area(pts) > 0.0))
            throw InvalidParameterError("cell " + std::to_string(c) +
                                        " is not counterclockwise with positive area");
        if (!cell_is_simple(pts))
            throw InvalidParameterError("cell " + std::to_string(c) + " is self-intersecting");
        for (int i = 0; i < n; ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % n];
            if (a == b)
                throw InvalidParameterError("cell " + std::to_string(c) + " repeats vertex " +
                                            std::to_string(a));
            if (++directed[{a, b}] > 1)
                throw InvalidParameterError("directed edge used twice; mesh is non-conforming");
        }
    }

    // Interior edges appear in both directions, boundary edges in one.
    std::map<std::pair<int, int>, int> boundary_use;
    for (const auto& [e, cnt] : directed) {
        (void)cnt;
        if (directed.count({e.second, e.first}) == 0)
            boundary_use[e] = 0;
    }
    for (const auto& be : mesh.boundary_edges) {
        auto it = boundary_use.find({be.a, be.b});
        if (it == boundary_use.end())
            it = boundary_use.find({be.b, be.a});
        if (it == boundary_use.end())
            throw InvalidParameterError("boundary edge (" + std::to_string(be.a) + "," +
                                        std::to_string(be.b) + ") is not on the topological boundary");
        if (++it->second > 1)
            throw InvalidParameterError("boundary edge listed twice");
    }
    for (const auto& [e, cnt] : boundary_use) {
        if (cnt == 0)
            throw InvalidParameterError("open boundary: edge (" + std::to_string(e.first) + "," +
                                        std::to_string(e.second) + ") has no boundary label");
    }
}

PolyMesh load_mesh(const std::string& text)
{
    PolyMesh mesh;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos)
            raw = raw.substr(0, hash);
        std::istringstream line(raw);
        std::string tag;
        if (!(line >> tag))
            continue;
        if (!header_seen) {
            std::string dim;
            if (tag != "polymesh" || !(line >> dim) || dim != "2d")
                throw ParseError(lineno, "expected header 'polymesh 2d'");
            header_seen = true;
            continue;
        }
        if (tag == "v") {
            Real x, y;
            if (!(line >> x >> y))
                throw ParseError(lineno, "malformed vertex line");
            mesh.vertices.emplace_back(x, y);
        } else if (tag == "c") {
            std::vector<int> loop;
            int idx;
            while (line >> idx)
                loop.push_back(idx);
            if (loop.size() < 3)
                throw ParseError(lineno, "cell needs at least 3 vertex indices");
            mesh.cells.push_back(std::move(loop));
        } else if (tag == "b") {
            BoundaryEdge be;
            if (!(line >> be.a >> be.b >> be.label))
                throw ParseError(lineno, "malformed boundary edge line");
            mesh.boundary_edges.push_back(std::move(be));
        } else {
            throw ParseError(lineno, "unknown record '" + tag + "'");
        }
    }
    if (!header_seen)
        throw ParseError(lineno, "missing 'polymesh 2d' header");

    try {
        check_mesh_invariants(mesh);
    } catch (const Error& e) {
        throw ParseError(lineno, std::string("mesh invariant violated: ") + e.what());
    }
    return mesh;
}

std::string serialize(const PolyMesh& mesh)
{
    std::ostringstream out;
    out.precision(17);
    out << "polymesh 2d\n";
    for (const Vec2& v : mesh.vertices)
        out << "v " << v.x() << " " << v.y() << "\n";
    for (const auto& loop : mesh.cells) {
        out << "c";
        for (int i : loop)
            out << " " << i;
        out << "\n";
    }
    for (const auto& be : mesh.boundary_edges)
        out << "b " << be.a << " " << be.b << " " << be.label << "\n";
    return out.str();
}

std::vector<std::pair<int, int>> collect_edges(const PolyMesh& mesh)
{
    std::vector<std::pair<int, int>> edges;
    for (const auto& loop : mesh.cells) {
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i) {
            int a = loop[i];
            int b = loop[(i + 1) % n];
            if (a > b)
                std::swap(a, b);
            edges.emplace_back(a, b);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

} // namespace vem
