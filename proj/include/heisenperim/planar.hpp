#pragma once

// Centrally symmetric convex bodies in the plane and the norm machinery they
// generate: gauge norms, dual (anti-)norms, polar duals, Minkowski length,
// Minkowski content of segments, and Busemann isoperimetrices.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "heisenperim/geom.hpp"

namespace heis {

enum class BodyKind { polygon, disk };

// A closed, centrally symmetric, strictly convex plane figure: either a
// polygon (counterclockwise vertex list, -v present for every vertex v) or a
// disk about the origin. Immutable after construction.
class ConvexBody {
  public:
    static constexpr double kValidationTol = 1e-9;

    static ConvexBody polygon(Polygon2 verts) { return ConvexBody(std::move(verts)); }
    static ConvexBody disk(double radius) { return ConvexBody(radius); }

    static ConvexBody unit_diamond() {
        return polygon({{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}});
    }
    static ConvexBody unit_square() {
        return polygon({{1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}});
    }
    static ConvexBody unit_disk() { return disk(1.0); }

    // Regular k-gon inscribed in the circle of radius r; k must be even so the
    // body is centrally symmetric.
    static ConvexBody regular_ngon(int k, double r = 1.0) {
        if (k < 4 || (k % 2) != 0)
            throw std::invalid_argument("regular_ngon: vertex count must be even and >= 4");
        Polygon2 v;
        v.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const double t = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(k);
            v.push_back({r * std::cos(t), r * std::sin(t)});
        }
        // Snap exact antipodes so validation is tolerance-free.
        const int half = k / 2;
        for (int i = 0; i < half; ++i) v[static_cast<std::size_t>(i + half)] = -v[static_cast<std::size_t>(i)];
        return polygon(std::move(v));
    }

    BodyKind kind() const { return kind_; }
    bool is_polygon() const { return kind_ == BodyKind::polygon; }
    bool is_disk() const { return kind_ == BodyKind::disk; }
    double radius() const { return radius_; }
    const Polygon2& vertices() const { return verts_; }
    double area() const { return area_; }

    ConvexBody scaled(double s) const {
        if (s <= 0.0) throw std::invalid_argument("ConvexBody::scaled: factor must be positive");
        if (is_disk()) return disk(radius_ * s);
        Polygon2 v = verts_;
        for (auto& p : v) p = p * s;
        return polygon(std::move(v));
    }

    // 90 degree counterclockwise rotation of the body.
    ConvexBody rotated90() const {
        if (is_disk()) return *this;
        Polygon2 v = verts_;
        for (auto& p : v) p = perp(p);
        return polygon(std::move(v));
    }

  private:
    explicit ConvexBody(double radius) : kind_(BodyKind::disk), radius_(radius) {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw std::invalid_argument("ConvexBody: disk radius must be positive");
        area_ = M_PI * radius * radius;
    }

    explicit ConvexBody(Polygon2 verts) : kind_(BodyKind::polygon), verts_(std::move(verts)) {
        validate_polygon();
        area_ = polygon_signed_area(verts_);
    }

    void validate_polygon() const {
        const std::size_t n = verts_.size();
        if (n < 4 || (n % 2) != 0)
            throw std::invalid_argument("ConvexBody: polygon needs an even vertex count >= 4");
        double scale = 0.0;
        for (const auto& v : verts_) {
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw std::invalid_argument("ConvexBody: non-finite vertex");
            scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
        }
        if (scale <= 0.0) throw std::invalid_argument("ConvexBody: degenerate polygon");
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) {
            const Vec2 d = verts_[i] + verts_[i + half];
            if (std::abs(d.x) > kValidationTol * scale || std::abs(d.y) > kValidationTol * scale)
                throw std::invalid_argument("ConvexBody: vertices are not centrally symmetric");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 e0 = verts_[(i + 1) % n] - verts_[i];
            const Vec2 e1 = verts_[(i + 2) % n] - verts_[(i + 1) % n];
            if (cross(e0, e1) <= kValidationTol * scale * scale)
                throw std::invalid_argument(
                    "ConvexBody: polygon is not strictly convex counterclockwise");
        }
        // Strict convexity plus central symmetry puts the origin strictly
        // inside; verify anyway so corrupt input cannot slip through.
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = verts_[i];
            const Vec2 b = verts_[(i + 1) % n];
            if (cross(b - a, -a) <= kValidationTol * scale * scale)
                throw std::invalid_argument("ConvexBody: origin is not strictly interior");
        }
        if (polygon_signed_area(verts_) <= 0.0)
            throw std::invalid_argument("ConvexBody: non-positive area");
    }

    BodyKind kind_;
    double radius_ = 0.0;
    Polygon2 verts_;
    double area_ = 0.0;
};

// Gauge norm ||v||_Q = inf { a > 0 : v in a Q }.
inline double norm_eval(const ConvexBody& Q, const Vec2& v) {
    if (Q.is_disk()) return norm(v) / Q.radius();
    const Polygon2& w = Q.vertices();
    const std::size_t n = w.size();
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = w[i];
        const Vec2 b = w[(i + 1) % n];
        const double d = cross(a, b);  // positive: origin interior, CCW
        best = std::max(best, cross(v, b - a) / d);
    }
    return best;
}

// Dual (anti-)norm ||y||_{Q*} = max_{x in Q} <x, y>.
inline double dual_norm_eval(const ConvexBody& Q, const Vec2& y) {
    if (Q.is_disk()) return Q.radius() * norm(y);
    double best = 0.0;
    for (const auto& v : Q.vertices()) best = std::max(best, dot(v, y));
    return best;
}

// Polar dual Q* = { y : <x,y> <= 1 for all x in Q }. Vertex/edge duality for
// polygons, radius inversion for disks.
inline ConvexBody polar_dual(const ConvexBody& Q) {
    if (Q.is_disk()) return ConvexBody::disk(1.0 / Q.radius());
    const Polygon2& v = Q.vertices();
    const std::size_t n = v.size();
    Polygon2 dual(n);
    double scale = 0.0;
    for (const auto& p : v) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = v[i];
        const Vec2 b = v[(i + 1) % n];
        const double det = cross(a, b);
        if (det <= ConvexBody::kValidationTol * scale * scale)
            throw std::invalid_argument("polar_dual: near-collinear vertex pair");
        dual[i] = Vec2{(b.y - a.y) / det, (a.x - b.x) / det};
    }
    return ConvexBody::polygon(std::move(dual));
}

// polar_dual applied twice; equals Q up to vertex rotation and tolerance.
inline ConvexBody bipolar_check(const ConvexBody& Q) { return polar_dual(polar_dual(Q)); }

// Busemann isoperimetrix: the 90 degree rotate of the polar dual, scaled so
// the enclosed area equals target_area.
inline ConvexBody isoperimetrix(const ConvexBody& Q, double target_area) {
    if (!(target_area > 0.0))
        throw std::invalid_argument("isoperimetrix: target area must be positive");
    const ConvexBody rotated = polar_dual(Q).rotated90();
    return rotated.scaled(std::sqrt(target_area / rotated.area()));
}

struct PlanarSegment {
    Vec2 a;
    Vec2 b;
    PlanarSegment(Vec2 a_, Vec2 b_) : a(a_), b(b_) {
        if (norm(b - a) <= 0.0) throw std::invalid_argument("PlanarSegment: endpoints coincide");
    }
};

struct PlanarCurve {
    std::vector<Vec2> samples;
    bool closed = false;

    PlanarCurve() = default;
    PlanarCurve(std::vector<Vec2> pts, bool closed_) : samples(std::move(pts)), closed(closed_) {
        if (samples.size() < 2) throw std::invalid_argument("PlanarCurve: needs at least 2 samples");
    }
};

// Minkowski length: sum of gauge norms of the polyline increments.
inline double minkowski_length(const ConvexBody& Q, const PlanarCurve& c) {
    std::vector<double> terms;
    terms.reserve(c.samples.size());
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i)
        terms.push_back(norm_eval(Q, c.samples[i + 1] - c.samples[i]));
    if (c.closed) terms.push_back(norm_eval(Q, c.samples.front() - c.samples.back()));
    return pairwise_sum(std::move(terms));
}

// Planar Minkowski content of a segment equals the dual norm of its vector.
inline double segment_content(const ConvexBody& Q, const PlanarSegment& L) {
    return dual_norm_eval(Q, L.b - L.a);
}

// Width-of-projection route to the same quantity:
// (|Proj_{L^perp}(Q)| / 2) * |L|.
inline double segment_content_by_projection(const ConvexBody& Q, const PlanarSegment& L) {
    const Vec2 u = perp(L.b - L.a) / norm(L.b - L.a);
    double halfwidth = 0.0;
    if (Q.is_disk()) {
        halfwidth = Q.radius();
    } else {
        for (const auto& v : Q.vertices()) halfwidth = std::max(halfwidth, dot(v, u));
    }
    return halfwidth * norm(L.b - L.a);
}

// Signed enclosed area of a closed curve (positive counterclockwise).
inline double enclosed_area(const PlanarCurve& c) {
    if (!c.closed) throw std::invalid_argument("enclosed_area: curve must be closed");
    return polygon_signed_area(c.samples);
}

// Inradius and circumradius of the body about the origin.
inline std::pair<double, double> in_circum_radii(const ConvexBody& Q) {
    if (Q.is_disk()) return {Q.radius(), Q.radius()};
    const Polygon2& v = Q.vertices();
    const std::size_t n = v.size();
    double rin = std::numeric_limits<double>::infinity();
    double rout = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = v[i];
        const Vec2 b = v[(i + 1) % n];
        rin = std::min(rin, cross(a, b) / norm(b - a));
        rout = std::max(rout, norm(a));
    }
    return {rin, rout};
}

// Does Q1 fit inside Q2 (up to tolerance)?
inline bool body_contains(const ConvexBody& outer, const ConvexBody& inner, double tol = 1e-9) {
    if (inner.is_polygon()) {
        for (const auto& v : inner.vertices())
            if (norm_eval(outer, v) > 1.0 + tol) return false;
        return true;
    }
    // Disk inside outer: the inradius of outer must cover the disk.
    return in_circum_radii(outer).first + tol >= inner.radius();
}

// Boundary polyline of the body, counterclockwise, not closed (last != first).
// Disks are polygonized with `disk_segments` vertices and rescaled so the
// polyline encloses exactly the body's area; polygons return their vertices.
inline Polygon2 boundary_polyline(const ConvexBody& B, int disk_segments = 4096) {
    if (B.is_polygon()) return B.vertices();
    if (disk_segments < 8) throw std::invalid_argument("boundary_polyline: too few segments");
    Polygon2 v(static_cast<std::size_t>(disk_segments));
    for (int i = 0; i < disk_segments; ++i) {
        const double t = 2.0 * M_PI * static_cast<double>(i) / disk_segments;
        v[static_cast<std::size_t>(i)] = {B.radius() * std::cos(t), B.radius() * std::sin(t)};
    }
    const double a = polygon_signed_area(v);
    const double s = std::sqrt(B.area() / a);
    for (auto& p : v) p = p * s;
    return v;
}

}  // namespace heis
