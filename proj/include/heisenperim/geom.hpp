#pragma once

// Small planar/spatial geometry kernel shared by the whole library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace heis {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2& operator-=(const Vec2& o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& a) { return dot(a, a); }
inline double norm(const Vec2& a) { return std::sqrt(norm2(a)); }
// 90 degree counterclockwise rotation.
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }
inline Vec2 lerp(const Vec2& a, const Vec2& b, double t) { return a + (b - a) * t; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

using Polygon2 = std::vector<Vec2>;

inline double polygon_signed_area(const Polygon2& p) {
    double a = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(p[i], p[(i + 1) % n]);
    return 0.5 * a;
}

inline Vec2 polygon_centroid(const Polygon2& p) {
    const std::size_t n = p.size();
    double a = 0.0;
    Vec2 c{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double w = cross(p[i], p[(i + 1) % n]);
        a += w;
        c += (p[i] + p[(i + 1) % n]) * w;
    }
    if (std::abs(a) < 1e-300) {
        // Degenerate polygon, fall back to vertex average.
        Vec2 m{0.0, 0.0};
        for (const auto& v : p) m += v;
        return n ? m / static_cast<double>(n) : m;
    }
    return c / (3.0 * a);
}

// Clip a convex polygon against the halfplane dot(nrm, x) <= c.
inline Polygon2 clip_halfplane(const Polygon2& poly, const Vec2& nrm, double c) {
    Polygon2 out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const double da = dot(nrm, a) - c;
        const double db = dot(nrm, b) - c;
        if (da <= 0.0) out.push_back(a);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
            const double t = da / (da - db);
            out.push_back(lerp(a, b, t));
        }
    }
    return out;
}

// Intersection of a convex polygon with an axis-aligned rectangle.
inline Polygon2 clip_to_rect(const Polygon2& poly, double x0, double x1, double y0, double y1) {
    Polygon2 r = poly;
    r = clip_halfplane(r, {1.0, 0.0}, x1);
    r = clip_halfplane(r, {-1.0, 0.0}, -x0);
    r = clip_halfplane(r, {0.0, 1.0}, y1);
    r = clip_halfplane(r, {0.0, -1.0}, -y0);
    return r;
}

inline bool point_in_convex(const Polygon2& poly, const Vec2& q, double tol = 1e-12) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (cross(poly[(i + 1) % n] - poly[i], q - poly[i]) < -tol) return false;
    }
    return true;
}

// Deterministic pairwise reduction; the result does not depend on how the
// terms were produced, only on their order in the vector.
inline double pairwise_sum(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::size_t n = v.size();
    while (n > 1) {
        const std::size_t h = (n + 1) / 2;
        for (std::size_t i = 0; i + h < n; ++i) v[i] += v[i + h];
        n = h;
    }
    return v[0];
}

// Solve the 2x2 system [a b; c d] * x = rhs. Returns false if near-singular.
inline bool solve2x2(double a, double b, double c, double d, const Vec2& rhs, Vec2& x,
                     double tol = 1e-14) {
    const double det = a * d - b * c;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d), 1e-30});
    if (std::abs(det) <= tol * scale * scale) return false;
    x.x = (rhs.x * d - b * rhs.y) / det;
    x.y = (a * rhs.y - rhs.x * c) / det;
    return true;
}

}  // namespace heis
