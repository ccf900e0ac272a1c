#pragma once

// Shared test utilities: a deterministic RNG and generators for random
// centrally symmetric convex polygons.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "heisenperim/planar.hpp"

namespace heis::test {

// xorshift64* — deterministic across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dull;
    }
    double uniform() { return static_cast<double>(next() >> 11) / 9007199254740992.0; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

  private:
    std::uint64_t state_;
};

inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) {
                              return norm(a - b) < 1e-12;
                          }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-12) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-12) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

// Random centrally symmetric strictly convex polygon. Retries until the
// ConvexBody invariants hold.
inline ConvexBody random_symmetric_body(Rng& rng, int max_half_points = 6) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        const int half = rng.uniform_int(2, max_half_points);
        std::vector<Vec2> pts;
        for (int i = 0; i < half; ++i) {
            const double ang = rng.uniform(0.0, 2.0 * M_PI);
            const double rad = rng.uniform(0.4, 1.6);
            const Vec2 p{rad * std::cos(ang), rad * std::sin(ang)};
            pts.push_back(p);
            pts.push_back(-p);
        }
        std::vector<Vec2> hull = convex_hull(pts);
        if (hull.size() < 4 || hull.size() % 2 != 0) continue;
        // Snap exact central symmetry: hull of a symmetric set is symmetric,
        // so vertex i + n/2 should be the antipode of vertex i.
        const std::size_t m = hull.size();
        bool ok = true;
        for (std::size_t i = 0; i < m / 2; ++i) {
            if (norm(hull[i] + hull[i + m / 2]) > 1e-9) {
                ok = false;
                break;
            }
            hull[i + m / 2] = -hull[i];
        }
        if (!ok) continue;
        try {
            return ConvexBody::polygon(hull);
        } catch (const std::invalid_argument&) {
            continue;
        }
    }
    return ConvexBody::unit_diamond();
}

// Scale a polygon body to enclose exactly the given area.
inline ConvexBody normalized_area(const ConvexBody& b, double area) {
    return b.scaled(std::sqrt(area / b.area()));
}

inline PlanarCurve boundary_curve(const ConvexBody& b, int disk_segments = 1024) {
    return PlanarCurve(boundary_polyline(b, disk_segments), true);
}

}  // namespace heis::test
