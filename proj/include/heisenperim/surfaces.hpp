#pragma once

// Surface representations and builders: graphs of functions, implicit level
// sets with marching-cubes extraction, triangle meshes, and the slab surfaces
// (piecewise quadratic tops/bottoms plus vertical walls) produced by the
// polygonal bubble-set construction.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "heisenperim/geom.hpp"
#include "heisenperim/heisenberg.hpp"
#include "heisenperim/mc_tables.hpp"
#include "heisenperim/mesh.hpp"
#include "heisenperim/planar.hpp"
#include "heisenperim/quadrature.hpp"

namespace heis {

// ---------------------------------------------------------------------------
//
// Graph surfaces
// ---------------------------------------------------------------------------

using Field2 = std::function<double(double, double)>;

struct GraphSurface {
    Field2 f;
    Field2 fx, fy;
    Field2 fxx, fxy, fyy;  // may be empty when no Hessian is available
    Polygon2 domain;       // convex, counterclockwise

    bool has_hessian() const { return static_cast<bool>(fxx) && static_cast<bool>(fyy); }
};

inline GraphSurface make_constant_graph(double c, Polygon2 domain) {
    GraphSurface s;
    s.f = [c](double, double) { return c; };
    s.fx = [](double, double) { return 0.0; };
    s.fy = [](double, double) { return 0.0; };
    s.fxx = s.fxy = s.fyy = [](double, double) { return 0.0; };
    s.domain = std::move(domain);
    return s;
}

inline GraphSurface make_plane_graph(double k1, double k2, double c, Polygon2 domain) {
    GraphSurface s;
    s.f = [=](double x, double y) { return k1 * x + k2 * y + c; };
    s.fx = [=](double, double) { return k1; };
    s.fy = [=](double, double) { return k2; };
    s.fxx = s.fxy = s.fyy = [](double, double) { return 0.0; };
    s.domain = std::move(domain);
    return s;
}

inline Polygon2 rect_domain(double x0, double x1, double y0, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

// Central-difference consistency check between f and its stated gradient at
// sampled interior points. Returns the worst relative error.
inline double graph_gradient_residual(const GraphSurface& s, int samples = 64,
                                      double step = 1e-5) {
    double x0 = s.domain[0].x, x1 = x0, y0 = s.domain[0].y, y1 = y0;
    for (const auto& v : s.domain) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    const double h = step * std::max({x1 - x0, y1 - y0, 1.0});
    double worst = 0.0;
    unsigned state = 0x9e3779b9u;
    auto next01 = [&state]() {
        state = state * 1664525u + 1013904223u;
        return static_cast<double>(state >> 8) / static_cast<double>(1u << 24);
    };
    for (int k = 0; k < samples; ++k) {
        const double x = x0 + (x1 - x0) * next01();
        const double y = y0 + (y1 - y0) * next01();
        if (!point_in_convex(s.domain, {x, y}, -h * 4.0)) continue;
        const double gx = (s.f(x + h, y) - s.f(x - h, y)) / (2.0 * h);
        const double gy = (s.f(x, y + h) - s.f(x, y - h)) / (2.0 * h);
        const double scale = std::max({1.0, std::abs(gx), std::abs(gy)});
        worst = std::max({worst, std::abs(gx - s.fx(x, y)) / scale,
                          std::abs(gy - s.fy(x, y)) / scale});
    }
    return worst;
}

// Heisenberg dilation of a graph: z = f(x, y) maps to z = s^2 f(x/s, y/s).
inline GraphSurface dilate_graph(const GraphSurface& g, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("dilate_graph: scale must be positive");
    GraphSurface out;
    const Field2 f = g.f, fx = g.fx, fy = g.fy;
    out.f = [f, s](double x, double y) { return s * s * f(x / s, y / s); };
    out.fx = [fx, s](double x, double y) { return s * fx(x / s, y / s); };
    out.fy = [fy, s](double x, double y) { return s * fy(x / s, y / s); };
    if (g.has_hessian()) {
        const Field2 fxx = g.fxx, fxy = g.fxy, fyy = g.fyy;
        out.fxx = [fxx, s](double x, double y) { return fxx(x / s, y / s); };
        out.fxy = [fxy, s](double x, double y) { return fxy(x / s, y / s); };
        out.fyy = [fyy, s](double x, double y) { return fyy(x / s, y / s); };
    }
    out.domain = g.domain;
    for (auto& v : out.domain) v = v * s;
    return out;
}

// ---------------------------------------------------------------------------
// Quadratic patches, walls, slab surfaces
// ---------------------------------------------------------------------------

// f(x, y) = c[0] + c[1] x + c[2] y + c[3] x^2 + c[4] x y + c[5] y^2 over a
// convex quadrilateral domain.
struct QuadraticPatch {
    std::array<double, 6> c{};
    Polygon2 dom;  // 4 vertices, counterclockwise

    double eval(double x, double y) const {
        return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y;
    }
    Vec2 grad(double x, double y) const {
        return {c[1] + 2.0 * c[3] * x + c[4] * y, c[2] + c[4] * x + 2.0 * c[5] * y};
    }
    QuadraticPatch negated() const {
        QuadraticPatch p = *this;
        for (auto& v : p.c) v = -v;
        return p;
    }

    GraphSurface as_graph() const {
        GraphSurface s;
        const std::array<double, 6> cc = c;
        s.f = [cc](double x, double y) {
            return cc[0] + cc[1] * x + cc[2] * y + cc[3] * x * x + cc[4] * x * y + cc[5] * y * y;
        };
        s.fx = [cc](double x, double y) { return cc[1] + 2.0 * cc[3] * x + cc[4] * y; };
        s.fy = [cc](double x, double y) { return cc[2] + cc[4] * x + 2.0 * cc[5] * y; };
        s.fxx = [cc](double, double) { return 2.0 * cc[3]; };
        s.fxy = [cc](double, double) { return cc[4]; };
        s.fyy = [cc](double, double) { return 2.0 * cc[5]; };
        s.domain = dom;
        return s;
    }

    // Exact integral of the patch height over its domain.
    double integral() const {
        auto f = [this](double x, double y) { return eval(x, y); };
        double total = 0.0;
        for (std::size_t k = 1; k + 1 < dom.size(); ++k)
            total += integrate_quadratic_over_triangle(f, dom[0], dom[k], dom[k + 1]);
        return total;
    }
};

// Vertical wall over the base segment a -> b. The face is the polygon
// `profile` in (u, z) coordinates, u in [0, 1] running along the base.
struct Wall {
    Vec2 a, b;
    Polygon2 profile;  // counterclockwise in the (u, z) plane

    double euclid_area() const { return polygon_signed_area(profile) * norm(b - a); }
    Vec2 direction() const { return b - a; }

    // Height interval of the face at parameter u (profile must be convex).
    std::pair<double, double> heights_at(double u) const {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        const std::size_t n = profile.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 p = profile[i];
            const Vec2 q = profile[(i + 1) % n];
            if ((p.x - u) * (q.x - u) > 0.0) continue;
            const double t = std::abs(q.x - p.x) < 1e-300 ? 0.0 : (u - p.x) / (q.x - p.x);
            const double z = p.y + (q.y - p.y) * std::clamp(t, 0.0, 1.0);
            lo = std::min(lo, z);
            hi = std::max(hi, z);
        }
        if (lo > hi) return {0.0, 0.0};
        return {lo, hi};
    }
};

// z-symmetric slab: |z| <= f_top(x, y) over the support, with vertical walls
// over the support boundary.
struct SlabSurface {
    ConvexBody support;              // planar footprint (2I for bubbles)
    std::vector<QuadraticPatch> top;
    std::vector<Wall> walls;

    std::vector<QuadraticPatch> bottom() const {
        std::vector<QuadraticPatch> b;
        b.reserve(top.size());
        for (const auto& p : top) b.push_back(p.negated());
        return b;
    }

    double volume() const {
        double v = 0.0;
        for (const auto& p : top) v += p.integral();
        return 2.0 * v;
    }

    // Top height at a planar point (max over patches whose domain contains it).
    std::optional<double> height_at(const Vec2& q, double tol = 1e-9) const {
        std::optional<double> best;
        for (const auto& p : top) {
            if (!point_in_convex(p.dom, q, tol)) continue;
            const double z = p.eval(q.x, q.y);
            if (!best || z > *best) best = z;
        }
        return best;
    }
};

inline SlabSurface dilate_slab(const SlabSurface& s, double sc) {
    if (!(sc > 0.0)) throw std::invalid_argument("dilate_slab: scale must be positive");
    SlabSurface out{s.support.scaled(sc), {}, {}};
    for (const auto& p : s.top) {
        QuadraticPatch q = p;
        q.c = {sc * sc * p.c[0], sc * p.c[1], sc * p.c[2], p.c[3], p.c[4], p.c[5]};
        for (auto& v : q.dom) v = v * sc;
        out.top.push_back(q);
    }
    for (const auto& w : s.walls) {
        Wall nw;
        nw.a = w.a * sc;
        nw.b = w.b * sc;
        nw.profile = w.profile;
        for (auto& p : nw.profile) p.y *= sc * sc;
        out.walls.push_back(nw);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bubble set builders
// ---------------------------------------------------------------------------

// The lift of the unit-area square family: |z| <= (1 - |x y|)/2 on [-1, 1]^2,
// four quadratic patches and four walls, already centered about z = 0.
inline SlabSurface build_square_bubble() {
    SlabSurface s{ConvexBody::unit_square(), {}, {}};
    auto patch = [](double sign, Polygon2 dom) {
        QuadraticPatch p;
        p.c = {0.5, 0.0, 0.0, 0.0, sign * 0.5, 0.0};
        p.dom = std::move(dom);
        return p;
    };
    s.top.push_back(patch(-1.0, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}));    // x,y >= 0
    s.top.push_back(patch(+1.0, {{-1, 0}, {0, 0}, {0, 1}, {-1, 1}})); // x <= 0 <= y
    s.top.push_back(patch(-1.0, {{-1, -1}, {0, -1}, {0, 0}, {-1, 0}}));
    s.top.push_back(patch(+1.0, {{0, -1}, {1, -1}, {1, 0}, {0, 0}}));
    const Polygon2 kite = {{0.0, 0.0}, {0.5, -0.5}, {1.0, 0.0}, {0.5, 0.5}};
    const Polygon2 corners = {{1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
    for (int i = 0; i < 4; ++i) {
        Wall w;
        w.a = corners[static_cast<std::size_t>(i)];
        w.b = corners[static_cast<std::size_t>((i + 1) % 4)];
        w.profile = kite;
        s.walls.push_back(w);
    }
    return s;
}

namespace detail {

// Fit f(x,y) quadratic through the first 6 nodes and verify on the extras.
// The caller must supply 6 nodes that no conic passes through; collinear
// triples on both of two parallel lines would make the system singular.
inline std::array<double, 6> fit_quadratic(const std::vector<Vec2>& pts,
                                           const std::vector<double>& vals) {
    auto row = [](const Vec2& p) {
        return std::array<double, 6>{1.0, p.x, p.y, p.x * p.x, p.x * p.y, p.y * p.y};
    };
    double A[6][7];
    for (int r = 0; r < 6; ++r) {
        const auto rr = row(pts[static_cast<std::size_t>(r)]);
        for (int c = 0; c < 6; ++c) A[r][c] = rr[static_cast<std::size_t>(c)];
        A[r][6] = vals[static_cast<std::size_t>(r)];
    }
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int r = col + 1; r < 6; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-12)
            throw std::runtime_error("fit_quadratic: singular interpolation system");
        for (int c = 0; c < 7; ++c) std::swap(A[piv][c], A[col][c]);
        for (int r = 0; r < 6; ++r) {
            if (r == col) continue;
            const double m = A[r][col] / A[col][col];
            for (int c = col; c < 7; ++c) A[r][c] -= m * A[col][c];
        }
    }
    std::array<double, 6> out{};
    for (int r = 0; r < 6; ++r) out[static_cast<std::size_t>(r)] = A[r][6] / A[r][r];
    for (std::size_t k = 6; k < pts.size(); ++k) {
        const auto rr = row(pts[k]);
        double v = 0.0;
        for (int c = 0; c < 6; ++c) v += out[static_cast<std::size_t>(c)] * rr[static_cast<std::size_t>(c)];
        if (std::abs(v - vals[k]) > 1e-9 * std::max(1.0, std::abs(vals[k])))
            throw std::runtime_error("fit_quadratic: surface is not quadratic on this patch");
    }
    return out;
}

}  // namespace detail

// Chord-family construction of the bubble set of a polygonal metric: chords
// of the unit-area isoperimetrix from edge i to edge j sweep quadratic
// patches ((2n)(n-1) of them after symmetry reduction) plus 2n vertical walls
// over the boundary of twice the isoperimetrix. Output is centered: the
// actual bubble runs from z = 0 to z = 1, the slab stores |z| <= f - 1/2.
inline SlabSurface build_polygonal_bubble(const ConvexBody& Q) {
    if (!Q.is_polygon())
        throw std::invalid_argument("build_polygonal_bubble: polygonal body required");
    const ConvexBody iso = isoperimetrix(Q, 1.0);
    const Polygon2& V = iso.vertices();
    const std::size_t m = V.size();  // 2n
    const std::size_t n = m / 2;

    // Swept area from the recentered start point s to the endpoint e, going
    // counterclockwise from edge i to edge j.
    auto sweep = [&](std::size_t i, std::size_t j, double a, double b) {
        const Vec2 s = lerp(V[i], V[(i + 1) % m], a);
        const Vec2 e = lerp(V[j], V[(j + 1) % m], b);
        double twice = 0.0;
        Vec2 prev{0.0, 0.0};
        const std::size_t corners = ((j + m - i - 1) % m) + 1;
        for (std::size_t k = 1; k <= corners; ++k) {
            const Vec2 c = V[(i + k) % m] - s;
            twice += cross(prev, c);
            prev = c;
        }
        twice += cross(prev, e - s);
        return 0.5 * twice;
    };
    auto endpoint = [&](std::size_t i, std::size_t j, double a, double b) {
        return lerp(V[j], V[(j + 1) % m], b) - lerp(V[i], V[(i + 1) % m], a);
    };

    SlabSurface slab{iso.scaled(2.0), {}, {}};

    // Interpolation nodes: parallelogram corners plus two adjacent edge
    // midpoints (no conic passes through these six), then three checks.
    const double nodes[9][2] = {{0, 0},     {1, 0},   {1, 1},     {0, 1},  {0.5, 0},
                                {0, 0.5},   {0.5, 1}, {1, 0.5},   {0.5, 0.5}};
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t d = n + 1; d < m; ++d) {
            const std::size_t j = (i + d) % m;
            std::vector<Vec2> pts;
            std::vector<double> vals;
            for (const auto& ab : nodes) {
                pts.push_back(endpoint(i, j, ab[0], ab[1]));
                vals.push_back(sweep(i, j, ab[0], ab[1]) - 0.5);
            }
            QuadraticPatch p;
            p.c = detail::fit_quadratic(pts, vals);
            p.dom = {endpoint(i, j, 0, 0), endpoint(i, j, 1, 0), endpoint(i, j, 1, 1),
                     endpoint(i, j, 0, 1)};
            if (polygon_signed_area(p.dom) < 0.0)
                std::reverse(p.dom.begin(), p.dom.end());
            slab.top.push_back(p);
        }
        // Parallel edge pair: the chord family sweeps a vertical wall.
        const std::size_t j = (i + n) % m;
        std::array<Vec2, 4> pos;
        std::array<double, 4> zz;
        int k = 0;
        for (double a : {0.0, 1.0})
            for (double b : {0.0, 1.0}) {
                pos[static_cast<std::size_t>(k)] = endpoint(i, j, a, b);
                zz[static_cast<std::size_t>(k)] = sweep(i, j, a, b) - 0.5;
                ++k;
            }
        // Base endpoints: extremes along the (degenerate) position segment.
        Vec2 A = pos[0], B = pos[0];
        const Vec2 dir = V[(j + 1) % m] - V[j];
        for (const auto& p : pos) {
            if (dot(p - A, dir) < 0.0) A = p;
            if (dot(p - B, dir) > 0.0) B = p;
        }
        // Orient the base counterclockwise around the support, so the face
        // normal (rotate of the base direction) points outward.
        const Vec2 mid = (A + B) * 0.5;
        const Vec2 outward{(B - A).y, -(B - A).x};
        if (norm_eval(slab.support, mid + outward * 1e-6) <
            norm_eval(slab.support, mid - outward * 1e-6))
            std::swap(A, B);
        const double len = norm(B - A);
        Wall w;
        w.a = A;
        w.b = B;
        Polygon2 prof;
        for (int q = 0; q < 4; ++q)
            prof.push_back({dot(pos[static_cast<std::size_t>(q)] - A, B - A) / (len * len),
                            zz[static_cast<std::size_t>(q)]});
        // Order the four profile points counterclockwise about their mean.
        Vec2 mean{0.0, 0.0};
        for (const auto& p : prof) mean += p * 0.25;
        std::sort(prof.begin(), prof.end(), [&](const Vec2& p, const Vec2& q) {
            return std::atan2(p.y - mean.y, p.x - mean.x) < std::atan2(q.y - mean.y, q.x - mean.x);
        });
        w.profile = prof;
        slab.walls.push_back(w);
    }
    return slab;
}

// Mesh form of the Q-bubble set, stitched from the generating geodesic
// family and resampled at constant-z rings. Centered about z = 0.
inline TriMesh build_q_bubble_mesh(const ConvexBody& Q, int resolution = 256,
                                   int disk_segments = 4096) {
    if (resolution < 8) throw std::invalid_argument("build_q_bubble_mesh: resolution too coarse");
    const int Ns = resolution;
    const int Kz = resolution;
    const auto family = bubble_family(Q, Ns, disk_segments);

    TriMesh mesh;
    mesh.verts.push_back({0.0, 0.0, -0.5});  // z = 0 pole (after centering)
    mesh.verts.push_back({0.0, 0.0, 0.5});
    std::vector<std::vector<int>> ring(static_cast<std::size_t>(Kz) - 1,
                                       std::vector<int>(static_cast<std::size_t>(Ns)));
    for (int i = 0; i < Ns; ++i) {
        const auto& path = family[static_cast<std::size_t>(i)];
        std::size_t seg = 0;
        for (int k = 1; k < Kz; ++k) {
            // Cosine spacing clusters rings at the flat polar caps.
            const double zlev = 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(k) / Kz));
            while (seg + 2 < path.heights.size() && path.heights[seg + 1] < zlev) ++seg;
            const double z0 = path.heights[seg], z1 = path.heights[seg + 1];
            const double t = z1 > z0 ? (zlev - z0) / (z1 - z0) : 0.0;
            const Vec2 p = lerp(path.planar.samples[seg], path.planar.samples[seg + 1],
                                std::clamp(t, 0.0, 1.0));
            ring[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(i)] =
                static_cast<int>(mesh.verts.size());
            mesh.verts.push_back({p.x, p.y, zlev - 0.5});
        }
    }
    auto tri = [&](int a, int b, int c) {
        if (a != b && b != c && a != c) mesh.tris.push_back({a, b, c});
    };
    for (int i = 0; i < Ns; ++i) {
        const int i1 = (i + 1) % Ns;
        tri(0, ring[0][static_cast<std::size_t>(i1)], ring[0][static_cast<std::size_t>(i)]);
        tri(1, ring[static_cast<std::size_t>(Kz) - 2][static_cast<std::size_t>(i)],
            ring[static_cast<std::size_t>(Kz) - 2][static_cast<std::size_t>(i1)]);
        for (int k = 0; k + 1 < Kz - 1; ++k) {
            const int a = ring[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            const int b = ring[static_cast<std::size_t>(k)][static_cast<std::size_t>(i1)];
            const int c = ring[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(i1)];
            const int d = ring[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(i)];
            tri(a, b, c);
            tri(a, c, d);
        }
    }
    if (mesh_volume_signed(mesh) < 0.0) mesh_flip_orientation(mesh);
    if (!mesh_is_watertight(mesh))
        throw std::runtime_error("build_q_bubble_mesh: resolution too coarse to stitch");
    return mesh;
}

// ---------------------------------------------------------------------------
// Volume
// ---------------------------------------------------------------------------

inline double volume(const SlabSurface& s) { return s.volume(); }
inline double volume(const TriMesh& m) { return mesh_volume(m); }

// Volume between a nonnegative graph and the plane z = 0.
inline double volume(const GraphSurface& g, double rtol = 1e-6) {
    return integrate_polygon(g.domain, [&](double x, double y) { return g.f(x, y); }, rtol).value;
}

// ---------------------------------------------------------------------------
// Characteristic points
// ---------------------------------------------------------------------------

// Points where the horizontal projection of the unit normal (the matrix
// [[1,0,-y/2],[0,1,x/2]] applied to n) nearly vanishes.
inline Vec2 horizontal_projection(double x, double y, const Vec3& n) {
    return {n.x - 0.5 * y * n.z, n.y + 0.5 * x * n.z};
}

inline std::vector<Vec2> characteristic_points(const GraphSurface& g, int grid = 64,
                                               double tol = 1e-6) {
    std::vector<Vec2> out;
    double x0 = g.domain[0].x, x1 = x0, y0 = g.domain[0].y, y1 = y0;
    for (const auto& v : g.domain) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    for (int j = 0; j <= grid; ++j)
        for (int i = 0; i <= grid; ++i) {
            const double x = x0 + (x1 - x0) * i / grid;
            const double y = y0 + (y1 - y0) * j / grid;
            if (!point_in_convex(g.domain, {x, y})) continue;
            const Vec3 n{-g.fx(x, y), -g.fy(x, y), 1.0};
            const double nn = norm(n);
            if (norm(horizontal_projection(x, y, n)) / nn < tol) out.push_back({x, y});
        }
    return out;
}

inline std::vector<Vec3> characteristic_points(const TriMesh& m, double tol = 1e-6) {
    std::vector<Vec3> out;
    for (std::size_t t = 0; t < m.tris.size(); ++t) {
        const Vec3 na = m.tri_normal_area(t);
        const double a = norm(na);
        if (a <= 0.0) continue;
        const Vec3 c = m.tri_centroid(t);
        if (norm(horizontal_projection(c.x, c.y, na / a)) < tol) out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Implicit surfaces and marching cubes
// ---------------------------------------------------------------------------

struct ImplicitSurface {
    std::function<double(const Vec3&)> F;
    std::function<Vec3(const Vec3&)> gradF;  // optional; finite differences otherwise
    Vec3 lo, hi;

    Vec3 gradient(const Vec3& p) const {
        if (gradF) return gradF(p);
        const double h = 1e-6 * std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
        return {(F({p.x + h, p.y, p.z}) - F({p.x - h, p.y, p.z})) / (2 * h),
                (F({p.x, p.y + h, p.z}) - F({p.x, p.y - h, p.z})) / (2 * h),
                (F({p.x, p.y, p.z + h}) - F({p.x, p.y, p.z - h})) / (2 * h)};
    }
};

struct MarchingCubesStats {
    std::size_t vertices = 0;
    std::size_t singular_gradient_samples = 0;  // |grad F| below tolerance on the level set
};

// Extract the zero level set of F on a regular grid with per-cell linear
// interpolation. `cells` counts cells along the longest box edge; inside
// means F < 0. Corner layout: 0 at (x,y,z), 1 at (x+1,y,z), 2 at
// (x+1,y+1,z), 3 at (x,y+1,z), 4..7 one cell above in z. When `stats` is
// given, extracted vertices with nearly vanishing gradient are counted (the
// level set must be regular away from a measure-zero set).
inline TriMesh marching_cubes(const ImplicitSurface& surf, int cells = 64,
                              MarchingCubesStats* stats = nullptr) {
    if (cells < 2) throw std::invalid_argument("marching_cubes: need at least 2 cells");
    const Vec3 ext = surf.hi - surf.lo;
    const double longest = std::max({ext.x, ext.y, ext.z});
    const int nx = std::max(2, static_cast<int>(std::round(cells * ext.x / longest)));
    const int ny = std::max(2, static_cast<int>(std::round(cells * ext.y / longest)));
    const int nz = std::max(2, static_cast<int>(std::round(cells * ext.z / longest)));
    const double dx = ext.x / nx, dy = ext.y / ny, dz = ext.z / nz;

    // Sample the field once per grid node.
    std::vector<double> field(static_cast<std::size_t>((nx + 1)) * (ny + 1) * (nz + 1));
    auto fid = [&](int i, int j, int k) {
        return (static_cast<std::size_t>(k) * (ny + 1) + j) * (nx + 1) + i;
    };
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                field[fid(i, j, k)] = surf.F(
                    {surf.lo.x + dx * i, surf.lo.y + dy * j, surf.lo.z + dz * k});

    TriMesh mesh;
    // Shared vertices keyed by (grid node, axis) of the crossing edge.
    std::map<std::array<int, 4>, int> edge_vertex;
    auto vertex_on_edge = [&](int i, int j, int k, int axis) {
        const std::array<int, 4> key{i, j, k, axis};
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        const double va = field[fid(i, j, k)];
        const int i2 = i + (axis == 0), j2 = j + (axis == 1), k2 = k + (axis == 2);
        const double vb = field[fid(i2, j2, k2)];
        const double t = std::clamp(va / (va - vb), 0.0, 1.0);
        const Vec3 a{surf.lo.x + dx * i, surf.lo.y + dy * j, surf.lo.z + dz * k};
        const Vec3 b{surf.lo.x + dx * i2, surf.lo.y + dy * j2, surf.lo.z + dz * k2};
        const int id = static_cast<int>(mesh.verts.size());
        mesh.verts.push_back(a + (b - a) * t);
        edge_vertex[key] = id;
        return id;
    };
    // Cube corner offsets and the (node, axis) form of the 12 cube edges.
    static constexpr int corner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                         {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int cube = 0;
                for (int c = 0; c < 8; ++c)
                    if (field[fid(i + corner[c][0], j + corner[c][1], k + corner[c][2])] < 0.0)
                        cube |= 1 << c;
                if (detail::kMcEdgeTable[cube] == 0) continue;
                int ev[12];
                for (int e = 0; e < 12; ++e) {
                    if (!(detail::kMcEdgeTable[cube] & (1 << e))) continue;
                    const int a = detail::kMcEdgeVerts[e][0];
                    const int b = detail::kMcEdgeVerts[e][1];
                    int axis = 0;
                    for (int ax = 0; ax < 3; ++ax)
                        if (corner[a][ax] != corner[b][ax]) axis = ax;
                    const int ci = i + std::min(corner[a][0], corner[b][0]);
                    const int cj = j + std::min(corner[a][1], corner[b][1]);
                    const int ck = k + std::min(corner[a][2], corner[b][2]);
                    ev[e] = vertex_on_edge(ci, cj, ck, axis);
                }
                for (int t = 0; detail::kMcTriTable[cube][t] != -1; t += 3) {
                    const int a = ev[detail::kMcTriTable[cube][t]];
                    const int b = ev[detail::kMcTriTable[cube][t + 1]];
                    const int c = ev[detail::kMcTriTable[cube][t + 2]];
                    if (a != b && b != c && a != c) mesh.tris.push_back({a, b, c});
                }
            }
    if (mesh_volume_signed(mesh) < 0.0) mesh_flip_orientation(mesh);
    if (stats) {
        stats->vertices = mesh.verts.size();
        const double gtol = 1e-9 * std::max({1.0, ext.x, ext.y, ext.z});
        for (const auto& v : mesh.verts)
            if (norm(surf.gradient(v)) < gtol) ++stats->singular_gradient_samples;
    }
    return mesh;
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

// Triangulated form of a graph surface over its (clipped) domain. The result
// is an open sheet, suitable for export and for mesh-route cross checks.
inline TriMesh graph_to_mesh(const GraphSurface& g, int grid = 64) {
    double x0 = g.domain[0].x, x1 = x0, y0 = g.domain[0].y, y1 = y0;
    for (const auto& v : g.domain) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    TriMesh mesh;
    std::vector<std::vector<int>> id(static_cast<std::size_t>(grid) + 1,
                                     std::vector<int>(static_cast<std::size_t>(grid) + 1, -1));
    for (int j = 0; j <= grid; ++j)
        for (int i = 0; i <= grid; ++i) {
            const double x = x0 + (x1 - x0) * i / grid;
            const double y = y0 + (y1 - y0) * j / grid;
            if (!point_in_convex(g.domain, {x, y}, 1e-12)) continue;
            id[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                static_cast<int>(mesh.verts.size());
            mesh.verts.push_back({x, y, g.f(x, y)});
        }
    auto at = [&](int i, int j) { return id[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
    for (int j = 0; j < grid; ++j)
        for (int i = 0; i < grid; ++i) {
            const int a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
            if (a >= 0 && b >= 0 && c >= 0) mesh.tris.push_back({a, b, c});
            if (a >= 0 && c >= 0 && d >= 0) mesh.tris.push_back({a, c, d});
        }
    return mesh;
}

// Triangulated form of a slab surface (for OBJ export and cross checks).
inline TriMesh slab_to_mesh(const SlabSurface& s, int per_patch = 16) {
    TriMesh mesh;
    auto add_vert = [&](const Vec3& p) {
        mesh.verts.push_back(p);
        return static_cast<int>(mesh.verts.size()) - 1;
    };
    for (int side = 0; side < 2; ++side) {
        for (const auto& patch : s.top) {
            const double sign = side == 0 ? 1.0 : -1.0;
            std::vector<std::vector<int>> grid(static_cast<std::size_t>(per_patch) + 1,
                                               std::vector<int>(static_cast<std::size_t>(per_patch) + 1));
            for (int i = 0; i <= per_patch; ++i)
                for (int j = 0; j <= per_patch; ++j) {
                    const double a = static_cast<double>(i) / per_patch;
                    const double b = static_cast<double>(j) / per_patch;
                    const Vec2 p = lerp(lerp(patch.dom[0], patch.dom[1], a),
                                        lerp(patch.dom[3], patch.dom[2], a), b);
                    grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        add_vert({p.x, p.y, sign * patch.eval(p.x, p.y)});
                }
            for (int i = 0; i < per_patch; ++i)
                for (int j = 0; j < per_patch; ++j) {
                    const int a = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                    const int b = grid[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(j)];
                    const int c = grid[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(j) + 1];
                    const int d = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) + 1];
                    if (side == 0) {
                        mesh.tris.push_back({a, b, c});
                        mesh.tris.push_back({a, c, d});
                    } else {
                        mesh.tris.push_back({a, c, b});
                        mesh.tris.push_back({a, d, c});
                    }
                }
        }
    }
    for (const auto& w : s.walls) {
        // Triangulate the wall face in (u, z) strips whose vertical cuts line
        // up with the patch grid above, so welding closes the mesh.
        const int strips = 2 * per_patch;
        for (int k = 0; k < strips; ++k) {
            const double u0 = static_cast<double>(k) / strips;
            const double u1 = static_cast<double>(k + 1) / strips;
            Polygon2 piece = w.profile;
            piece = clip_halfplane(piece, {1.0, 0.0}, u1);
            piece = clip_halfplane(piece, {-1.0, 0.0}, -u0);
            if (piece.size() < 3 || polygon_signed_area(piece) <= 1e-14) continue;
            std::vector<int> ids;
            for (const auto& p : piece) {
                const Vec2 base = lerp(w.a, w.b, p.x);
                ids.push_back(add_vert({base.x, base.y, p.y}));
            }
            for (std::size_t t = 1; t + 1 < ids.size(); ++t)
                mesh.tris.push_back({ids[0], ids[t], ids[t + 1]});
        }
    }
    return mesh;
}

}  // namespace heis
