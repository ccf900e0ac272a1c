#pragma once

// Perimeter measures on surfaces in the Heisenberg group: Minkowski content
// and anti-Minkowski content of graphs, walls, slabs, and triangle meshes,
// the epsilon-neighborhood brute-force oracle, Radon-Nikodym density against
// the sub-Riemannian measure, isoperimetric reports, and the comparison
// bounds between metrics.
//
// The computational core is the surface integral of
//   || [1 0 -y/2; 0 1 x/2] n ||_{Q*}
// over Lebesgue surface measure. Anti-Minkowski content is Minkowski content
// for the polar-dual body: by bipolarity its integrand norm is the gauge of
// Q itself, so no second code path exists.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heisenperim/geom.hpp"
#include "heisenperim/mesh.hpp"
#include "heisenperim/parallel.hpp"
#include "heisenperim/planar.hpp"
#include "heisenperim/quadrature.hpp"
#include "heisenperim/surfaces.hpp"

namespace heis {

enum class MeasureVariant { minkowski, anti_minkowski };

class PerimeterMeasure {
  public:
    PerimeterMeasure(ConvexBody body, MeasureVariant variant)
        : body_(std::move(body)),
          variant_(variant),
          integrand_body_(variant == MeasureVariant::minkowski ? body_ : polar_dual(body_)) {}

    static PerimeterMeasure minkowski(ConvexBody body) {
        return {std::move(body), MeasureVariant::minkowski};
    }
    static PerimeterMeasure anti_minkowski(ConvexBody body) {
        return {std::move(body), MeasureVariant::anti_minkowski};
    }

    const ConvexBody& body() const { return body_; }
    MeasureVariant variant() const { return variant_; }
    // Body whose dual norm weights the projected normal.
    const ConvexBody& integrand_body() const { return integrand_body_; }

    PerimeterMeasure with_body(ConvexBody b) const { return {std::move(b), variant_}; }

  private:
    ConvexBody body_;
    MeasureVariant variant_;
    ConvexBody integrand_body_;
};

// Norm applied to the horizontally projected normal direction.
inline double integrand_norm(const PerimeterMeasure& m, const Vec2& v) {
    return dual_norm_eval(m.integrand_body(), v);
}

// ---------------------------------------------------------------------------
// Content of the basic surface classes
// ---------------------------------------------------------------------------

// Graph of f over its domain: integral of ||(-y/2 - fx, x/2 - fy)||.
inline double graph_content(const PerimeterMeasure& m, const GraphSurface& s,
                            double rtol = 1e-4, QuadratureResult* stats = nullptr) {
    const auto integrand = [&](double x, double y) {
        const double v = integrand_norm(m, {-0.5 * y - s.fx(x, y), 0.5 * x - s.fy(x, y)});
        if (!std::isfinite(v)) throw std::runtime_error("graph_content: non-finite integrand");
        return v;
    };
    const QuadratureResult r = integrate_polygon(s.domain, integrand, rtol);
    if (stats) *stats = r;
    return r.value;
}

// Same quadrature driver, with the integrand restricted to the explicit
// vertex maximum of a polygonal body. Bitwise identical nodes to
// graph_content, so results agree to rounding.
inline double polygonal_fast_content(const PerimeterMeasure& m, const GraphSurface& s,
                                     double rtol = 1e-4) {
    if (!m.integrand_body().is_polygon())
        throw std::invalid_argument("polygonal_fast_content: polygonal body required");
    const Polygon2& verts = m.integrand_body().vertices();
    const auto integrand = [&](double x, double y) {
        const Vec2 w{-0.5 * y - s.fx(x, y), 0.5 * x - s.fy(x, y)};
        double best = 0.0;
        for (const auto& v : verts) best = std::max(best, dot(v, w));
        return best;
    };
    return integrate_polygon(s.domain, integrand, rtol).value;
}

// Vertical wall: the projected normal of a vertical face is the rotate of
// the base direction, so content scales Euclidean face area by the dual norm
// of that rotate per unit Euclidean length. (For 90-degree-symmetric bodies
// this equals the dual norm of the direction itself.)
inline double wall_content(const PerimeterMeasure& m, const Wall& w) {
    const Vec2 d = w.direction();
    return integrand_norm(m, perp(d)) / norm(d) * w.euclid_area();
}

struct MeshContentStats {
    std::size_t degenerate_skipped = 0;
    double refinement_delta = 0.0;
};

// Triangle mesh content: per-triangle centroid rule with 1:4 subdivision
// until two refinement levels agree.
inline double mesh_content(const PerimeterMeasure& m, const TriMesh& mesh, double rtol = 1e-4,
                           MeshContentStats* stats = nullptr) {
    struct Tri {
        Vec3 a, b, c;
    };
    std::size_t degenerate = 0;

    const auto value_of = [&](const Tri& t, const Vec3& unit_n) {
        const double area = norm(cross(t.b - t.a, t.c - t.a)) * 0.5;
        const Vec3 g = (t.a + t.b + t.c) / 3.0;
        return area * integrand_norm(m, horizontal_projection(g.x, g.y, unit_n));
    };

    // Recursive refinement with a fixed traversal order.
    std::function<double(const Tri&, const Vec3&, double, double, int, double&)> refine =
        [&](const Tri& t, const Vec3& n, double coarse, double tol_abs, int depth,
            double& delta) -> double {
        const Vec3 ab = (t.a + t.b) * 0.5, bc = (t.b + t.c) * 0.5, ca = (t.c + t.a) * 0.5;
        const Tri kids[4] = {{t.a, ab, ca}, {ab, t.b, bc}, {ca, bc, t.c}, {ab, bc, ca}};
        double fine = 0.0;
        for (const auto& k : kids) fine += value_of(k, n);
        const double diff = std::abs(fine - coarse);
        if (diff <= tol_abs || depth >= 8) {
            delta += diff;
            return fine;
        }
        double out = 0.0;
        for (const auto& k : kids) out += refine(k, n, value_of(k, n), tol_abs / 4.0, depth + 1, delta);
        return out;
    };

    // First pass for the tolerance scale.
    std::vector<Tri> tris;
    std::vector<Vec3> normals;
    double scale = 0.0;
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const Vec3 na = mesh.tri_normal_area(t);
        const double a2 = norm(na);
        if (a2 <= 1e-300) {
            ++degenerate;
            continue;
        }
        Tri tri{mesh.verts[static_cast<std::size_t>(mesh.tris[t][0])],
                mesh.verts[static_cast<std::size_t>(mesh.tris[t][1])],
                mesh.verts[static_cast<std::size_t>(mesh.tris[t][2])]};
        tris.push_back(tri);
        normals.push_back(na / a2);
        scale += value_of(tri, normals.back());
    }
    scale = std::max(std::abs(scale), 1e-30);

    std::vector<double> parts(tris.size(), 0.0);
    std::vector<double> deltas(tris.size(), 0.0);
    parallel_for(tris.size(), [&](std::size_t i) {
        const double coarse = value_of(tris[i], normals[i]);
        const double tol_abs = rtol * scale * std::max(std::abs(coarse) / scale, 1e-6);
        parts[i] = refine(tris[i], normals[i], coarse, tol_abs, 0, deltas[i]);
    });
    if (stats) {
        stats->degenerate_skipped = degenerate;
        stats->refinement_delta = pairwise_sum(deltas);
    }
    return pairwise_sum(std::move(parts));
}

// Slab surface: top and bottom patch graphs plus walls.
inline double slab_content(const PerimeterMeasure& m, const SlabSurface& s, double rtol = 1e-4) {
    std::vector<double> parts;
    for (const auto& p : s.top) parts.push_back(graph_content(m, p.as_graph(), rtol));
    for (const auto& p : s.bottom()) parts.push_back(graph_content(m, p.as_graph(), rtol));
    for (const auto& w : s.walls) parts.push_back(wall_content(m, w));
    return pairwise_sum(std::move(parts));
}

// Uniform dispatch used by the report and bound helpers.
inline double content(const PerimeterMeasure& m, const GraphSurface& s, double rtol = 1e-4) {
    return graph_content(m, s, rtol);
}
inline double content(const PerimeterMeasure& m, const SlabSurface& s, double rtol = 1e-4) {
    return slab_content(m, s, rtol);
}
inline double content(const PerimeterMeasure& m, const TriMesh& s, double rtol = 1e-4) {
    return mesh_content(m, s, rtol);
}

// ---------------------------------------------------------------------------
// Brute-force neighborhood oracle
// ---------------------------------------------------------------------------

struct OracleResult {
    double estimate = 0.0;                 // Richardson-extrapolated content
    std::vector<double> per_eps;           // raw difference quotients
    std::vector<double> eps;
};

// Estimate the Minkowski content of a graph from the definition: the top
// boundary of the eps-neighborhood of the subgraph region is
//   Z_eps(x,y) = max_{(a,b) in Q} f(x - eps a, y - eps b) + (eps/2)(x b - y a),
// up to an O(eps^2) term bounded by the height of the unit ball, which
// Richardson extrapolation over a decreasing eps schedule removes.
inline OracleResult neighborhood_oracle(const ConvexBody& Q, const GraphSurface& s,
                                        std::vector<double> eps_list = {}, int grid = 160,
                                        int boundary_samples = 96) {
    double x0 = s.domain[0].x, x1 = x0, y0 = s.domain[0].y, y1 = y0;
    for (const auto& v : s.domain) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    const double dscale = std::max(x1 - x0, y1 - y0);
    if (eps_list.empty()) eps_list = {0.1 * dscale, 0.05 * dscale, 0.025 * dscale};
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i] > eps_list[i + 1]) || !(eps_list[i + 1] > 0.0))
            throw std::invalid_argument("neighborhood_oracle: eps schedule must decrease");

    // Dense boundary sample of Q (the maximizer of a linear form sits there;
    // polygon vertices are included exactly).
    std::vector<Vec2> ball;
    if (Q.is_polygon()) {
        const Polygon2& v = Q.vertices();
        const std::size_t e = v.size();
        const int per_edge = std::max(2, boundary_samples / static_cast<int>(e));
        for (std::size_t i = 0; i < e; ++i)
            for (int k = 0; k < per_edge; ++k)
                ball.push_back(lerp(v[i], v[(i + 1) % e], static_cast<double>(k) / per_edge));
    } else {
        for (int k = 0; k < boundary_samples; ++k) {
            const double t = 2.0 * M_PI * k / boundary_samples;
            ball.push_back({Q.radius() * std::cos(t), Q.radius() * std::sin(t)});
        }
    }

    OracleResult res;
    res.eps = eps_list;
    for (const double eps : eps_list) {
        const auto zdiff = [&](double x, double y) {
            const double fxy = s.f(x, y);
            double best = 0.0;
            bool found = false;
            for (const auto& ab : ball) {
                const Vec2 at{x - eps * ab.x, y - eps * ab.y};
                if (!point_in_convex(s.domain, at)) continue;
                const double cand =
                    s.f(at.x, at.y) - fxy + 0.5 * eps * (x * ab.y - y * ab.x);
                if (!found || cand > best) {
                    best = cand;
                    found = true;
                }
            }
            return found ? std::max(best, 0.0) / eps : 0.0;
        };
        res.per_eps.push_back(integrate_fixed_grid(s.domain, zdiff, grid));
    }

    // Richardson: the difference quotient is content + c1*eps + O(eps^2).
    std::vector<double> level = res.per_eps;
    std::vector<double> es = eps_list;
    while (level.size() > 1) {
        std::vector<double> next;
        std::vector<double> en;
        for (std::size_t i = 0; i + 1 < level.size(); ++i) {
            const double e0 = es[i], e1 = es[i + 1];
            next.push_back((e0 * level[i + 1] - e1 * level[i]) / (e0 - e1));
            en.push_back(e1);
        }
        level = std::move(next);
        es = std::move(en);
    }
    res.estimate = level[0];
    return res;
}

// ---------------------------------------------------------------------------
// Radon-Nikodym density, reports, ratios
// ---------------------------------------------------------------------------

// Density of the Q-content against the sub-Riemannian (disk) content at a
// surface point with the given normal.
inline double rn_density(const ConvexBody& Q, const Vec3& point, const Vec3& normal) {
    const double nn = norm(normal);
    if (nn <= 0.0) throw std::invalid_argument("rn_density: zero normal");
    const Vec2 w = horizontal_projection(point.x, point.y, normal / nn);
    const double wn = norm(w);
    if (wn < 1e-12)
        throw std::domain_error("rn_density: characteristic point (projected normal vanishes)");
    return dual_norm_eval(Q, w) / wn;
}

inline double iso_ratio(double volume, double perimeter) {
    if (!(perimeter > 0.0)) throw std::invalid_argument("iso_ratio: zero perimeter rejected");
    if (!(volume > 0.0)) throw std::invalid_argument("iso_ratio: volume must be positive");
    return std::pow(volume, 0.75) / perimeter;
}

struct IsoReport {
    std::string surface;
    std::string body;
    double volume = 0.0;
    double perimeter_mink = 0.0;
    double perimeter_anti = 0.0;
    double ratio_mink = 0.0;
    double ratio_anti = 0.0;
    double rtol = 0.0;
    int resolution = 0;
    double convergence = 0.0;  // coarse self-estimate of the content error

    std::string csv_row() const {
        char buf[512];
        std::snprintf(buf, sizeof(buf), "%s,%s,%.9g,%.9g,%.9g,%.9g,%.9g", surface.c_str(),
                      body.c_str(), volume, perimeter_mink, perimeter_anti, ratio_mink,
                      ratio_anti);
        return buf;
    }
};

template <class Surface>
IsoReport iso_report(const ConvexBody& Q, const Surface& s, double rtol = 1e-4,
                     std::string surface_name = "surface", std::string body_name = "body") {
    IsoReport r;
    r.surface = std::move(surface_name);
    r.body = std::move(body_name);
    r.rtol = rtol;
    r.volume = volume(s);
    r.perimeter_mink = content(PerimeterMeasure::minkowski(Q), s, rtol);
    r.perimeter_anti = content(PerimeterMeasure::anti_minkowski(Q), s, rtol);
    const double coarse_mink = content(PerimeterMeasure::minkowski(Q), s, rtol * 16.0);
    r.convergence = std::abs(coarse_mink - r.perimeter_mink) /
                    std::max(1e-30, std::abs(r.perimeter_mink));
    r.ratio_mink = iso_ratio(r.volume, r.perimeter_mink);
    r.ratio_anti = iso_ratio(r.volume, r.perimeter_anti);
    return r;
}

// ---------------------------------------------------------------------------
// Scaling, containment, sandwich and approximation bounds
// ---------------------------------------------------------------------------

// (content for the scaled body rQ, r times content for Q); the two agree.
template <class Surface>
std::pair<double, double> scaling_check(const ConvexBody& Q, double r, const Surface& s,
                                        double rtol = 1e-4) {
    if (!(r > 0.0)) throw std::invalid_argument("scaling_check: r must be positive");
    const double scaled = content(PerimeterMeasure::minkowski(Q.scaled(r)), s, rtol);
    const double direct = r * content(PerimeterMeasure::minkowski(Q), s, rtol);
    return {scaled, direct};
}

// Contents for nested bodies Q1 inside Q2; the first never exceeds the second.
template <class Surface>
std::pair<double, double> containment_bounds(const ConvexBody& Q1, const ConvexBody& Q2,
                                             const Surface& s, double rtol = 1e-4) {
    if (!body_contains(Q2, Q1))
        throw std::invalid_argument("containment_bounds: Q1 must be contained in Q2");
    return {content(PerimeterMeasure::minkowski(Q1), s, rtol),
            content(PerimeterMeasure::minkowski(Q2), s, rtol)};
}

struct SandwichReport {
    double r = 0.0, R = 0.0;     // inscribed / circumscribed circle radii of Q
    double iso_disk = 0.0;       // sub-Riemannian ratio of the surface
    double iso_lo = 0.0, iso = 0.0, iso_hi = 0.0;     // Minkowski chain
    double aiso_lo = 0.0, aiso = 0.0, aiso_hi = 0.0;  // anti-Minkowski chain

    // The chain inequalities are not strict (bodies whose projected normals
    // align with the extremal directions saturate them), so containment is
    // checked with a relative slack covering quadrature noise.
    bool contains(double rel_slack = 1e-6) const {
        const double s = rel_slack * std::max(std::abs(iso), std::abs(aiso));
        return iso_lo - s <= iso && iso <= iso_hi + s && aiso_lo - s <= aiso &&
               aiso <= aiso_hi + s;
    }
};

// Iso_D(S)/R <= Iso_Q(S) <= Iso_D(S)/r and r Iso_D(S) <= AIso_Q(S) <= R Iso_D(S)
// for the inscribed/circumscribed radii r, R of Q.
template <class Surface>
SandwichReport sandwich_bounds(const ConvexBody& Q, const Surface& s, double rtol = 1e-4) {
    SandwichReport rep;
    const auto [rin, rout] = in_circum_radii(Q);
    rep.r = rin;
    rep.R = rout;
    const double vol = volume(s);
    const double disk_content = content(PerimeterMeasure::minkowski(ConvexBody::unit_disk()), s, rtol);
    rep.iso_disk = iso_ratio(vol, disk_content);
    rep.iso = iso_ratio(vol, content(PerimeterMeasure::minkowski(Q), s, rtol));
    rep.aiso = iso_ratio(vol, content(PerimeterMeasure::anti_minkowski(Q), s, rtol));
    rep.iso_lo = rep.iso_disk / rep.R;
    rep.iso_hi = rep.iso_disk / rep.r;
    rep.aiso_lo = rep.r * rep.iso_disk;
    rep.aiso_hi = rep.R * rep.iso_disk;
    return rep;
}

struct StrongApproxBracket {
    int n = 0;
    double Rn = 0.0;
    double lo = 0.0, hi = 0.0;   // bracket around the sub-Riemannian ratio
    double iso_disk = 0.0;       // directly computed sub-Riemannian ratio

    double width() const { return hi - lo; }
    bool contains(double rel_slack = 1e-6) const {
        const double s = rel_slack * std::abs(iso_disk);
        return lo - s <= iso_disk && iso_disk <= hi + s;
    }
};

// Bracket the sub-Riemannian isoperimetric ratio between ratios computed in
// the regular 2^n-gon metric: Q_n inscribed in the unit circle, R_n Q_n
// circumscribing it with R_n = 1/cos(pi/2^n).
template <class Surface>
StrongApproxBracket strong_approx(int n, const Surface& s, double rtol = 1e-4) {
    if (n < 2) throw std::invalid_argument("strong_approx: n must be at least 2");
    StrongApproxBracket b;
    b.n = n;
    const int sides = 1 << n;
    b.Rn = 1.0 / std::cos(M_PI / sides);
    const ConvexBody Qn = ConvexBody::regular_ngon(sides);
    const double vol = volume(s);
    const double iso_q = iso_ratio(vol, content(PerimeterMeasure::minkowski(Qn), s, rtol));
    const double aiso_q = iso_ratio(vol, content(PerimeterMeasure::anti_minkowski(Qn), s, rtol));
    b.iso_disk = iso_ratio(vol, content(PerimeterMeasure::minkowski(ConvexBody::unit_disk()), s, rtol));
    b.lo = std::min(iso_q / b.Rn, aiso_q);
    b.hi = std::max(iso_q, b.Rn * aiso_q);
    return b;
}

}  // namespace heis
