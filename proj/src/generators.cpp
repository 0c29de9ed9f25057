#include "vem2d/generators.hpp"

#include "vem2d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace vem {

namespace {

void add_square_side_labels(PolyMesh& mesh, Real x0, Real x1, Real y0, Real y1)
{
    // Directed edges used exactly once are the topological boundary.
    std::map<std::pair<int, int>, int> directed;
    for (const auto& loop : mesh.cells) {
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i)
            directed[{loop[i], loop[(i + 1) % n]}]++;
    }
    for (const auto& [e, cnt] : directed) {
        (void)cnt;
        if (directed.count({e.second, e.first}))
            continue;
        const Vec2& a = mesh.vertices[e.first];
        const Vec2& b = mesh.vertices[e.second];
        std::string label;
        if (a.x() == x0 && b.x() == x0)
            label = "left";
        else if (a.x() == x1 && b.x() == x1)
            label = "right";
        else if (a.y() == y0 && b.y() == y0)
            label = "bottom";
        else if (a.y() == y1 && b.y() == y1)
            label = "top";
        else
            throw InvalidParameterError("boundary edge not on a domain side");
        mesh.boundary_edges.push_back({e.first, e.second, label});
    }
}

PolyMesh make_square_grid(int N)
{
    PolyMesh mesh;
    const auto id = [N](int i, int j) { return j * (N + 1) + i; };
    for (int j = 0; j <= N; ++j)
        for (int i = 0; i <= N; ++i)
            mesh.vertices.emplace_back(static_cast<Real>(i) / N, static_cast<Real>(j) / N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i)
            mesh.cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    add_square_side_labels(mesh, 0.0, 1.0, 0.0, 1.0);
    return mesh;
}

// Tiling by trapezoids similar to the prototype (0,0),(1/2,0),(1/2,2/3),(0,1/3),
// scaled by 2/N. Vertical grid lines carry alternating short/tall spacings with
// a parity phase per column, which forces N to be even.
PolyMesh make_trapezoid_grid(int N)
{
    if (N % 2 != 0)
        throw InvalidParameterError("trapezoid family requires an even subdivision count");
    const Real short_step = 2.0 / (3.0 * N);
    const Real tall_step = 4.0 / (3.0 * N);
    PolyMesh mesh;
    const auto id = [N](int k, int j) { return k * (N + 1) + j; };
    for (int k = 0; k <= N; ++k) {
        const Real x = static_cast<Real>(k) / N;
        for (int j = 0; j <= N; ++j) {
            Real y;
            if (j % 2 == 0)
                y = static_cast<Real>(j) / N;
            else
                y = static_cast<Real>(j - 1) / N + (k % 2 == 0 ? short_step : tall_step);
            mesh.vertices.emplace_back(x, y);
        }
    }
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            mesh.cells.push_back({id(k, j), id(k + 1, j), id(k + 1, j + 1), id(k, j + 1)});
    add_square_side_labels(mesh, 0.0, 1.0, 0.0, 1.0);
    return mesh;
}

// Clip a polygon against an axis-aligned half-plane keep_sign*(coord - c) <= 0.
// Lattice hexagon edges have slope 0 or +-1, so every intersection lands on a
// half-integer coordinate and is exact in floating point.
std::vector<Vec2> clip_axis(const std::vector<Vec2>& poly, int axis, Real c, int keep_sign)
{
    std::vector<Vec2> out;
    const int n = static_cast<int>(poly.size());
    const auto side = [&](const Vec2& p) { return keep_sign * (p[axis] - c); };
    for (int i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const Real sa = side(a);
        const Real sb = side(b);
        if (sa <= 0)
            out.push_back(a);
        if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) {
            const Real t = (c - a[axis]) / (b[axis] - a[axis]);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

PolyMesh make_hex_grid(int N)
{
    const int W = 3 * N;
    const int M = std::max(1, (3 * N + 2) / 4);
    const int H = 2 * M;

    PolyMesh mesh;
    std::map<std::pair<Real, Real>, int> vertex_ids;
    const auto vertex_id = [&](const Vec2& p) {
        auto [it, inserted] = vertex_ids.try_emplace({p.x(), p.y()}, mesh.num_vertices());
        if (inserted)
            mesh.vertices.push_back(p);
        return it->second;
    };

    for (int i = 0; i <= N; ++i) {
        for (int j = -1; j <= M; ++j) {
            const Real cx = 3.0 * i;
            const Real cy = 2.0 * j + (i % 2);
            std::vector<Vec2> poly = {{cx + 2, cy},     {cx + 1, cy + 1}, {cx - 1, cy + 1},
                                      {cx - 2, cy},     {cx - 1, cy - 1}, {cx + 1, cy - 1}};
            poly = clip_axis(poly, 0, 0.0, -1);
            poly = clip_axis(poly, 0, static_cast<Real>(W), +1);
            poly = clip_axis(poly, 1, 0.0, -1);
            poly = clip_axis(poly, 1, static_cast<Real>(H), +1);
            // drop exact duplicates introduced by clips through vertices
            std::vector<Vec2> dedup;
            for (const Vec2& p : poly)
                if (dedup.empty() || p != dedup.back())
                    dedup.push_back(p);
            while (dedup.size() > 1 && dedup.front() == dedup.back())
                dedup.pop_back();
            if (dedup.size() < 3)
                continue;
            Real twice_area = 0.0;
            for (size_t k = 0; k < dedup.size(); ++k)
                twice_area += cross2(dedup[k], dedup[(k + 1) % dedup.size()]);
            if (twice_area <= 0.0)
                continue;
            std::vector<int> loop;
            for (const Vec2& p : dedup)
                loop.push_back(vertex_id(p));
            mesh.cells.push_back(std::move(loop));
        }
    }
    for (Vec2& v : mesh.vertices) {
        v.x() /= W;
        v.y() /= H;
    }
    add_square_side_labels(mesh, 0.0, 1.0, 0.0, 1.0);
    return mesh;
}

} // namespace

PolyMesh generate_structured(StructuredKind kind, int N)
{
    if (N < 1)
        throw InvalidParameterError("subdivision count must be positive");
    switch (kind) {
    case StructuredKind::square:
        return make_square_grid(N);
    case StructuredKind::trapezoid:
        return make_trapezoid_grid(N);
    case StructuredKind::hex_structured:
        return make_hex_grid(N);
    }
    throw InvalidParameterError("unknown structured mesh kind");
}

PolyMesh triangulate(const PolyMesh& mesh)
{
    PolyMesh out;
    out.vertices = mesh.vertices;
    out.boundary_edges = mesh.boundary_edges;

    const auto tri_area = [&](const Vec2& a, const Vec2& b, const Vec2& c) {
        return 0.5 * cross2(b - a, c - a);
    };

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& loop = mesh.cells[c];
        const int n = static_cast<int>(loop.size());
        const auto pt = [&](int k) { return mesh.vertices[loop[k]]; };
        if (n == 3) {
            out.cells.push_back(loop);
            continue;
        }
        if (n == 4) {
            const bool d02 = tri_area(pt(0), pt(1), pt(2)) > 0 && tri_area(pt(0), pt(2), pt(3)) > 0;
            const bool d13 = tri_area(pt(1), pt(2), pt(3)) > 0 && tri_area(pt(1), pt(3), pt(0)) > 0;
            bool use02 = d02;
            if (d02 && d13)
                use02 = (pt(2) - pt(0)).squaredNorm() <= (pt(3) - pt(1)).squaredNorm();
            if (d02 || d13) {
                if (use02) {
                    out.cells.push_back({loop[0], loop[1], loop[2]});
                    out.cells.push_back({loop[0], loop[2], loop[3]});
                } else {
                    out.cells.push_back({loop[1], loop[2], loop[3]});
                    out.cells.push_back({loop[1], loop[3], loop[0]});
                }
                continue;
            }
        }
        // general cell: fan around an inserted vertex at the vertex centroid
        Vec2 centroid = Vec2::Zero();
        for (int k = 0; k < n; ++k)
            centroid += pt(k);
        centroid /= n;
        for (int k = 0; k < n; ++k)
            if (tri_area(centroid, pt(k), pt((k + 1) % n)) <= 0)
                throw UnsupportedElementError("triangulate: cell " + std::to_string(c) +
                                              " is not star-shaped w.r.t. its vertex centroid");
        const int cid = out.num_vertices();
        out.vertices.push_back(centroid);
        for (int k = 0; k < n; ++k)
            out.cells.push_back({cid, loop[k], loop[(k + 1) % n]});
    }
    return out;
}

PolyMesh quarter_strip_mesh(int level, const StripGeometry& geom)
{
    if (level < 0)
        throw InvalidParameterError("strip mesh level must be non-negative");
    const int n_arc = 32 << level;
    const int n_top = static_cast<int>(std::lround(32.0 * geom.B / (geom.B + geom.H))) << level;
    const int n_right = n_arc - n_top;
    const int n_t = 10 << level;

    // geometric grading toward the hole, outer/inner layer thickness ratio 4
    const Real ratio = std::pow(4.0, 1.0 / (n_t - 1));
    std::vector<Real> t(n_t + 1);
    t[0] = 0.0;
    Real step = (ratio - 1.0) / (std::pow(ratio, n_t) - 1.0);
    for (int k = 0; k < n_t; ++k) {
        t[k + 1] = t[k] + step;
        step *= ratio;
    }
    t[n_t] = 1.0;

    const auto inner = [&](int i) -> Vec2 {
        if (i == 0)
            return {0.0, geom.R};
        if (i == n_arc)
            return {geom.R, 0.0};
        const Real theta = 0.5 * std::numbers::pi * (1.0 - static_cast<Real>(i) / n_arc);
        return {geom.R * std::cos(theta), geom.R * std::sin(theta)};
    };
    const auto outer = [&](int i) -> Vec2 {
        if (i <= n_top)
            return {geom.B * static_cast<Real>(i) / n_top, geom.H};
        return {geom.B, geom.H * (1.0 - static_cast<Real>(i - n_top) / n_right)};
    };

    PolyMesh mesh;
    const auto id = [&](int i, int k) { return k * (n_arc + 1) + i; };
    for (int k = 0; k <= n_t; ++k)
        for (int i = 0; i <= n_arc; ++i)
            mesh.vertices.push_back((1.0 - t[k]) * inner(i) + t[k] * outer(i));
    for (int k = 0; k < n_t; ++k)
        for (int i = 0; i < n_arc; ++i)
            mesh.cells.push_back({id(i, k), id(i + 1, k), id(i + 1, k + 1), id(i, k + 1)});

    for (int k = 0; k < n_t; ++k) {
        mesh.boundary_edges.push_back({id(0, k + 1), id(0, k), "sym_x"});
        mesh.boundary_edges.push_back({id(n_arc, k), id(n_arc, k + 1), "sym_y"});
    }
    for (int i = 0; i < n_arc; ++i) {
        mesh.boundary_edges.push_back({id(i, 0), id(i + 1, 0), "hole"});
        mesh.boundary_edges.push_back(
            {id(i + 1, n_t), id(i, n_t), i < n_top ? std::string("top") : std::string("right")});
    }
    return mesh;
}

} // namespace vem
