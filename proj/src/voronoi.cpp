#include "vem2d/generators.hpp"

#include "vem2d/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

namespace vem {

namespace {

// Carrier line of a cell edge: one of the four domain sides or a site-pair
// bisector. Canonical keys make the same geometric line (and any vertex built
// from two lines) evaluate to bitwise-identical coordinates in both cells
// sharing it, which keeps the extracted mesh conforming without tolerances.
struct Carrier {
    int kind; // 0 = domain side, 1 = bisector
    int a;    // side id (0 bottom, 1 right, 2 top, 3 left) or smaller site id
    int b;    // -1 or larger site id

    friend bool operator<(const Carrier& x, const Carrier& y)
    {
        return std::tie(x.kind, x.a, x.b) < std::tie(y.kind, y.a, y.b);
    }
    friend bool operator==(const Carrier& x, const Carrier& y)
    {
        return x.kind == y.kind && x.a == y.a && x.b == y.b;
    }
};

// Canonical identity of a Voronoi vertex, independent of which cell sees it:
// a domain corner, a bisector-side crossing, or a three-site circumcenter.
// kind 0: (side_a, side_b, -1); kind 1: (side, i, j); kind 2: sorted (i, j, k).
struct VertexKey {
    int kind;
    std::array<int, 3> ids;

    friend bool operator<(const VertexKey& x, const VertexKey& y)
    {
        return std::tie(x.kind, x.ids) < std::tie(y.kind, y.ids);
    }
};

VertexKey make_key(Carrier u, Carrier v)
{
    if (v < u)
        std::swap(u, v);
    if (u.kind == 0 && v.kind == 0)
        return {0, {u.a, v.a, -1}};
    if (u.kind == 0)
        return {1, {u.a, v.a, v.b}};
    std::array<int, 4> ids = {u.a, u.b, v.a, v.b};
    std::sort(ids.begin(), ids.end());
    std::array<int, 3> tri{};
    int m = 0;
    for (int k = 0; k < 4; ++k)
        if (m == 0 || ids[k] != tri[m - 1])
            tri[m++] = ids[k];
    return {2, tri};
}

struct TaggedPoly {
    std::vector<Vec2> pts;
    std::vector<Carrier> edge; // edge[k] carries segment pts[k] -> pts[k+1]
};

TaggedPoly unit_square_poly()
{
    TaggedPoly p;
    p.pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    p.edge = {{0, 0, -1}, {0, 1, -1}, {0, 2, -1}, {0, 3, -1}};
    return p;
}

// Keep the half-plane (x - mid) . (pj - pi) <= 0, i.e. the side of site i.
void clip_bisector(TaggedPoly& poly, const Vec2& pi, const Vec2& pj, Carrier line)
{
    const Vec2 n = pj - pi;
    const Vec2 mid = 0.5 * (pi + pj);
    const int np = static_cast<int>(poly.pts.size());
    if (np == 0)
        return;
    std::vector<Real> s(np);
    for (int k = 0; k < np; ++k)
        s[k] = n.dot(poly.pts[k] - mid);

    TaggedPoly out;
    for (int k = 0; k < np; ++k) {
        const int k1 = (k + 1) % np;
        if (s[k] <= 0) {
            out.pts.push_back(poly.pts[k]);
            out.edge.push_back(poly.edge[k]);
        }
        if ((s[k] < 0 && s[k1] > 0) || (s[k] > 0 && s[k1] < 0)) {
            const Real tt = s[k] / (s[k] - s[k1]);
            out.pts.push_back(poly.pts[k] + tt * (poly.pts[k1] - poly.pts[k]));
            // entering the cut: continue along the old carrier; leaving: along the cut
            out.edge.push_back(s[k] < 0 ? line : poly.edge[k]);
        }
    }
    poly = std::move(out);
}

Real poly_area(const std::vector<Vec2>& p)
{
    Real twice = 0.0;
    for (size_t k = 0; k < p.size(); ++k)
        twice += cross2(p[k], p[(k + 1) % p.size()]);
    return 0.5 * twice;
}

Vec2 poly_area_centroid(const std::vector<Vec2>& p)
{
    Real twice = 0.0;
    Vec2 c = Vec2::Zero();
    for (size_t k = 0; k < p.size(); ++k) {
        const Vec2& a = p[k];
        const Vec2& b = p[(k + 1) % p.size()];
        const Real w = cross2(a, b);
        twice += w;
        c += w * (a + b);
    }
    return c / (3.0 * twice);
}

// Clipped Voronoi cell of site i. Sites are visited in increasing distance;
// a bisector at distance d/2 beyond the current cell radius cannot cut.
TaggedPoly voronoi_cell(const std::vector<Vec2>& sites, int i, const std::vector<int>& order)
{
    TaggedPoly poly = unit_square_poly();
    for (int j : order) {
        if (j == i)
            continue;
        Real radius2 = 0.0;
        for (const Vec2& p : poly.pts)
            radius2 = std::max(radius2, (p - sites[i]).squaredNorm());
        if (0.25 * (sites[j] - sites[i]).squaredNorm() > radius2)
            break;
        const Carrier line{1, std::min(i, j), std::max(i, j)};
        clip_bisector(poly, sites[i], sites[j], line);
        if (poly.pts.size() < 3)
            break;
    }
    return poly;
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c)
{
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    const Real d = 2.0 * cross2(ab, ac);
    const Real ab2 = ab.squaredNorm();
    const Real ac2 = ac.squaredNorm();
    return a + Vec2(ac.y() * ab2 - ab.y() * ac2, ab.x() * ac2 - ac.x() * ab2) / d;
}

// Side lines: 0: y=0, 1: x=1, 2: y=1, 3: x=0.
Vec2 side_bisector_point(int side, const Vec2& pi, const Vec2& pj)
{
    const Vec2 n = pj - pi;
    const Vec2 mid = 0.5 * (pi + pj);
    const Real rhs = n.dot(mid);
    switch (side) {
    case 0:
        return {rhs / n.x(), 0.0};
    case 1:
        return {1.0, (rhs - n.x()) / n.y()};
    case 2:
        return {(rhs - n.y()) / n.x(), 1.0};
    default:
        return {0.0, rhs / n.y()};
    }
}

Vec2 canonical_position(const VertexKey& key, const std::vector<Vec2>& sites)
{
    if (key.kind == 0) {
        // adjacent sides meet at a corner; side ids are sorted ascending
        if (key.ids[0] == 0 && key.ids[1] == 1)
            return {1, 0};
        if (key.ids[0] == 1 && key.ids[1] == 2)
            return {1, 1};
        if (key.ids[0] == 2 && key.ids[1] == 3)
            return {0, 1};
        return {0, 0};
    }
    if (key.kind == 1)
        return side_bisector_point(key.ids[0], sites[key.ids[1]], sites[key.ids[2]]);
    return circumcenter(sites[key.ids[0]], sites[key.ids[1]], sites[key.ids[2]]);
}

PolyMesh extract_mesh(const std::vector<Vec2>& sites, const std::vector<std::vector<int>>& orders)
{
    const int n = static_cast<int>(sites.size());
    PolyMesh mesh;
    std::map<VertexKey, int> vertex_ids;

    for (int i = 0; i < n; ++i) {
        TaggedPoly poly = voronoi_cell(sites, i, orders[i]);
        const int np = static_cast<int>(poly.pts.size());
        if (np < 3)
            throw InvalidStateError("voronoi cell degenerated");

        std::vector<int> loop;
        std::vector<Carrier> loop_edges;
        for (int k = 0; k < np; ++k) {
            const Carrier incoming = poly.edge[(k + np - 1) % np];
            const Carrier outgoing = poly.edge[k];
            if (incoming == outgoing)
                continue; // collinear duplicate from a clip through a vertex
            const VertexKey key = make_key(incoming, outgoing);
            const Vec2 pos = canonical_position(key, sites);
            if ((pos - poly.pts[k]).norm() > 1e-7)
                throw InvalidStateError("near-degenerate voronoi vertex");
            auto [it, inserted] = vertex_ids.try_emplace(key, mesh.num_vertices());
            if (inserted)
                mesh.vertices.push_back(pos);
            if (!loop.empty() && it->second == loop.back()) {
                // zero-length segment collapsed by welding; the surviving
                // vertex continues along the duplicate's outgoing carrier
                loop_edges.back() = outgoing;
                continue;
            }
            loop.push_back(it->second);
            loop_edges.push_back(outgoing);
        }
        while (loop.size() > 1 && loop.front() == loop.back()) {
            loop.pop_back();
            loop_edges.pop_back();
        }
        if (loop.size() < 3)
            throw InvalidStateError("voronoi cell degenerated after welding");
        mesh.cells.push_back(loop);
        static const char* side_names[4] = {"bottom", "right", "top", "left"};
        for (size_t k = 0; k < loop.size(); ++k)
            if (loop_edges[k].kind == 0)
                mesh.boundary_edges.push_back(
                    {loop[k], loop[(k + 1) % loop.size()], side_names[loop_edges[k].a]});
    }
    return mesh;
}

} // namespace

PolyMesh voronoi_lloyd(int cells, std::uint64_t seed, int sweeps)
{
    if (cells < 1)
        throw InvalidParameterError("voronoi generator needs at least one cell");

    for (int attempt = 0; attempt < 8; ++attempt) {
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * attempt));
        const auto uniform = [&rng] { return static_cast<Real>(rng() >> 11) * 0x1.0p-53; };

        std::vector<Vec2> sites(cells);
        for (auto& s : sites)
            s = Vec2(uniform(), uniform());

        std::vector<std::vector<int>> orders(cells);
        const auto sort_orders = [&] {
            for (int i = 0; i < cells; ++i) {
                auto& ord = orders[i];
                ord.resize(cells);
                std::iota(ord.begin(), ord.end(), 0);
                std::sort(ord.begin(), ord.end(), [&](int a, int b) {
                    const Real da = (sites[a] - sites[i]).squaredNorm();
                    const Real db = (sites[b] - sites[i]).squaredNorm();
                    return da != db ? da < db : a < b;
                });
            }
        };

        for (int sweep = 0; sweep < sweeps; ++sweep) {
            sort_orders();
            std::vector<Vec2> next(cells);
            for (int i = 0; i < cells; ++i) {
                const TaggedPoly poly = voronoi_cell(sites, i, orders[i]);
                next[i] = poly.pts.size() >= 3 && poly_area(poly.pts) > 0
                              ? poly_area_centroid(poly.pts)
                              : sites[i];
            }
            sites = std::move(next);
        }

        try {
            sort_orders();
            PolyMesh mesh = extract_mesh(sites, orders);
            check_mesh_invariants(mesh);
            return mesh;
        } catch (const Error&) {
            // rare near-degenerate configuration: retry deterministically
            continue;
        }
    }
    throw InvalidStateError("voronoi generation failed repeatedly; try another seed");
}

} // namespace vem
