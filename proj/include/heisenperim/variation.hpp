#pragma once

// First variation of perimeter under normal bumps, and extraction of the
// switching loci where the maximizing vertex of a polygonal dual-norm
// integrand changes. The mean curvature of a smooth graph in a polygonal
// metric concentrates on those loci, so planes (and the flats of polygonal
// bubbles) have vanishing first variation.

#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "heisenperim/geom.hpp"
#include "heisenperim/perimeter.hpp"
#include "heisenperim/quadrature.hpp"
#include "heisenperim/surfaces.hpp"

namespace heis {

// Compactly supported perturbation field on the graph domain.
struct Bump {
    Field2 phi;
    Field2 phix, phiy;
    Polygon2 domain;  // must match the surface domain

    // Sampled boundary-vanishing check; returns the worst |phi| on the rim.
    double boundary_residual(int samples_per_edge = 32) const {
        double worst = 0.0;
        const std::size_t n = domain.size();
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k <= samples_per_edge; ++k) {
                const Vec2 p = lerp(domain[i], domain[(i + 1) % n],
                                    static_cast<double>(k) / samples_per_edge);
                worst = std::max(worst, std::abs(phi(p.x, p.y)));
            }
        return worst;
    }
};

// Smooth radial bump supported on the disk of the given radius about c.
inline Bump make_bump(const Vec2& c, double radius, double amplitude, Polygon2 domain) {
    Bump b;
    const double r2 = radius * radius;
    b.phi = [=](double x, double y) {
        const double d2 = (x - c.x) * (x - c.x) + (y - c.y) * (y - c.y);
        if (d2 >= r2) return 0.0;
        const double t = 1.0 - d2 / r2;
        return amplitude * t * t * t;
    };
    b.phix = [=](double x, double y) {
        const double d2 = (x - c.x) * (x - c.x) + (y - c.y) * (y - c.y);
        if (d2 >= r2) return 0.0;
        const double t = 1.0 - d2 / r2;
        return amplitude * 3.0 * t * t * (-2.0 * (x - c.x) / r2);
    };
    b.phiy = [=](double x, double y) {
        const double d2 = (x - c.x) * (x - c.x) + (y - c.y) * (y - c.y);
        if (d2 >= r2) return 0.0;
        const double t = 1.0 - d2 / r2;
        return amplitude * 3.0 * t * t * (-2.0 * (y - c.y) / r2);
    };
    b.domain = std::move(domain);
    return b;
}

struct FirstVariationResult {
    double value = 0.0;
    double step = 0.0;      // accepted step size
    double change = 0.0;    // difference between the last two estimates
    bool converged = false;
};

// Central difference (content(f + h phi) - content(f - h phi)) / 2h on a
// shared fixed grid (identical nodes make the difference quotient stable),
// with h halved until two successive estimates agree to 1e-5 relative.
inline FirstVariationResult first_variation(const PerimeterMeasure& m, const GraphSurface& s,
                                            const Bump& bump, double h0 = 1e-2, int grid = 256) {
    if (bump.boundary_residual() > 1e-12)
        throw std::invalid_argument("first_variation: bump must vanish on the boundary");
    const auto content_at = [&](double h) {
        const auto integrand = [&](double x, double y) {
            return integrand_norm(m, {-0.5 * y - s.fx(x, y) - h * bump.phix(x, y),
                                      0.5 * x - s.fy(x, y) - h * bump.phiy(x, y)});
        };
        return integrate_fixed_grid(s.domain, integrand, grid);
    };

    FirstVariationResult res;
    double prev = 0.0;
    bool have_prev = false;
    double h = h0;
    for (int iter = 0; iter < 12; ++iter) {
        const double fv = (content_at(h) - content_at(-h)) / (2.0 * h);
        if (have_prev) {
            res.change = std::abs(fv - prev);
            if (res.change <= 1e-5 * std::max(1.0, std::abs(fv))) {
                res.value = fv;
                res.step = h;
                res.converged = true;
                return res;
            }
        }
        prev = fv;
        have_prev = true;
        res.value = fv;
        res.step = h;
        h *= 0.5;
        if (h < 1e-9) break;
    }
    res.converged = false;
    return res;
}

// ---------------------------------------------------------------------------
// Switching loci
// ---------------------------------------------------------------------------

struct SwitchingLocus {
    Vec2 va, vb;        // adjacent vertices of Q whose maximizer status swaps
    Vec2 direction;     // edge direction d = vb - va (the locus generator)
    std::vector<std::vector<Vec2>> polylines;

    // Residual of the defining equation <d, w(x, y)> = 0 at a point.
    double residual(const GraphSurface& s, const Vec2& p) const {
        const Vec2 w{-0.5 * p.y - s.fx(p.x, p.y), 0.5 * p.x - s.fy(p.x, p.y)};
        return std::abs(dot(direction, w)) / norm(direction);
    }
};

namespace detail {

// Marching squares on a scalar field over the domain's bounding box.
inline std::vector<std::vector<Vec2>> marching_squares(const Field2& g, const Polygon2& domain,
                                                       int grid) {
    double x0 = domain[0].x, x1 = x0, y0 = domain[0].y, y1 = y0;
    for (const auto& v : domain) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    const double dx = (x1 - x0) / grid, dy = (y1 - y0) / grid;
    std::vector<double> val(static_cast<std::size_t>(grid + 1) * (grid + 1));
    auto id = [&](int i, int j) { return static_cast<std::size_t>(j) * (grid + 1) + i; };
    for (int j = 0; j <= grid; ++j)
        for (int i = 0; i <= grid; ++i) val[id(i, j)] = g(x0 + dx * i, y0 + dy * j);

    // Collect crossing segments cell by cell.
    std::vector<std::pair<Vec2, Vec2>> segs;
    auto interp = [&](const Vec2& a, double va, const Vec2& b, double vb) {
        const double t = va / (va - vb);
        return lerp(a, b, std::clamp(t, 0.0, 1.0));
    };
    for (int j = 0; j < grid; ++j)
        for (int i = 0; i < grid; ++i) {
            const Vec2 p00{x0 + dx * i, y0 + dy * j};
            const Vec2 p10{x0 + dx * (i + 1), y0 + dy * j};
            const Vec2 p11{x0 + dx * (i + 1), y0 + dy * (j + 1)};
            const Vec2 p01{x0 + dx * i, y0 + dy * (j + 1)};
            const double v00 = val[id(i, j)], v10 = val[id(i + 1, j)];
            const double v11 = val[id(i + 1, j + 1)], v01 = val[id(i, j + 1)];
            int c = 0;
            if (v00 < 0) c |= 1;
            if (v10 < 0) c |= 2;
            if (v11 < 0) c |= 4;
            if (v01 < 0) c |= 8;
            if (c == 0 || c == 15) continue;
            std::vector<Vec2> pts;
            if ((c & 1) != ((c >> 1) & 1)) pts.push_back(interp(p00, v00, p10, v10));
            if (((c >> 1) & 1) != ((c >> 2) & 1)) pts.push_back(interp(p10, v10, p11, v11));
            if (((c >> 2) & 1) != ((c >> 3) & 1)) pts.push_back(interp(p11, v11, p01, v01));
            if (((c >> 3) & 1) != (c & 1)) pts.push_back(interp(p01, v01, p00, v00));
            if (pts.size() == 2) {
                segs.push_back({pts[0], pts[1]});
            } else if (pts.size() == 4) {
                // Ambiguous saddle: split by the cell-center sign.
                const double vc = 0.25 * (v00 + v10 + v11 + v01);
                if ((vc < 0) == ((c & 1) != 0)) {
                    segs.push_back({pts[0], pts[1]});
                    segs.push_back({pts[2], pts[3]});
                } else {
                    segs.push_back({pts[0], pts[3]});
                    segs.push_back({pts[1], pts[2]});
                }
            }
        }

    // Chain segments into polylines by matching endpoints on a snap grid.
    const double snap = 0.25 * std::min(dx, dy);
    auto key = [&](const Vec2& p) {
        return std::pair<long long, long long>{static_cast<long long>(std::llround(p.x / snap)),
                                               static_cast<long long>(std::llround(p.y / snap))};
    };
    std::map<std::pair<long long, long long>, std::vector<std::size_t>> ends;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        ends[key(segs[s].first)].push_back(s);
        ends[key(segs[s].second)].push_back(s);
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<std::vector<Vec2>> polys;
    for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
        if (used[s0]) continue;
        used[s0] = true;
        std::vector<Vec2> line{segs[s0].first, segs[s0].second};
        for (int dir = 0; dir < 2; ++dir) {
            for (;;) {
                const Vec2 tip = dir == 0 ? line.back() : line.front();
                const auto it = ends.find(key(tip));
                if (it == ends.end()) break;
                std::size_t found = static_cast<std::size_t>(-1);
                for (const std::size_t cand : it->second)
                    if (!used[cand]) {
                        found = cand;
                        break;
                    }
                if (found == static_cast<std::size_t>(-1)) break;
                used[found] = true;
                const Vec2 a = segs[found].first, b = segs[found].second;
                const Vec2 nxt = norm(a - tip) < norm(b - tip) ? b : a;
                if (dir == 0)
                    line.push_back(nxt);
                else
                    line.insert(line.begin(), nxt);
            }
        }
        // Keep only the part inside the domain.
        std::vector<Vec2> clipped;
        for (const auto& p : line) {
            if (point_in_convex(domain, p, 1e-12)) {
                clipped.push_back(p);
            } else if (clipped.size() >= 2) {
                polys.push_back(clipped);
                clipped.clear();
            } else {
                clipped.clear();
            }
        }
        if (clipped.size() >= 2) polys.push_back(std::move(clipped));
    }
    return polys;
}

}  // namespace detail

// Zero sets of <d, w(x,y)> for d running over the antipodal edge-direction
// pairs of Q, where w is the projected normal of the graph. Locus pieces on
// which the transverse curvature factor (the second derivative of f in the
// d direction) vanishes carry no mean curvature and are dropped.
inline std::vector<SwitchingLocus> switching_loci(const ConvexBody& Q, const GraphSurface& s,
                                                  int grid = 512, double curvature_tol = 1e-9) {
    if (!Q.is_polygon()) throw std::invalid_argument("switching_loci: polygonal body required");
    if (!s.has_hessian()) throw std::invalid_argument("switching_loci: Hessian required");
    const Polygon2& v = Q.vertices();
    const std::size_t m = v.size();
    std::vector<SwitchingLocus> out;
    for (std::size_t i = 0; i < m / 2; ++i) {  // antipodal edges give the same locus
        SwitchingLocus loc;
        loc.va = v[i];
        loc.vb = v[(i + 1) % m];
        loc.direction = loc.vb - loc.va;
        const Vec2 d = loc.direction;
        const auto g = [&, d](double x, double y) {
            const Vec2 w{-0.5 * y - s.fx(x, y), 0.5 * x - s.fy(x, y)};
            return dot(d, w);
        };
        auto polys = detail::marching_squares(g, s.domain, grid);
        for (auto& line : polys) {
            // Curvature filter at the midpoint sample.
            const Vec2 mid = line[line.size() / 2];
            const double dd = norm2(d);
            const double curv = (d.x * d.x * s.fxx(mid.x, mid.y) +
                                 2.0 * d.x * d.y * s.fxy(mid.x, mid.y) +
                                 d.y * d.y * s.fyy(mid.x, mid.y)) /
                                dd;
            if (std::abs(curv) <= curvature_tol) continue;
            loc.polylines.push_back(std::move(line));
        }
        out.push_back(std::move(loc));
    }
    return out;
}

// CSV emission of extracted loci: one row per vertex,
// "locus_index,polyline_index,x,y", with a header.
inline void write_loci_csv(const std::vector<SwitchingLocus>& loci, std::ostream& os) {
    os.precision(17);
    os << "locus,polyline,x,y\n";
    for (std::size_t l = 0; l < loci.size(); ++l)
        for (std::size_t p = 0; p < loci[l].polylines.size(); ++p)
            for (const auto& q : loci[l].polylines[p])
                os << l << "," << p << "," << q.x << "," << q.y << "\n";
}

inline void write_first_variation_json(const FirstVariationResult& r, std::ostream& os) {
    os.precision(17);
    os << "{\"value\": " << r.value << ", \"step\": " << r.step
       << ", \"change\": " << r.change << ", \"converged\": " << (r.converged ? "true" : "false")
       << "}\n";
}

// Closed forms of the content integrand when the metric body is the unit
// square or unit diamond: the dual norm collapses to a sum or a maximum of
// two absolute values. Evaluated on the same quadrature driver as
// graph_content, so agreement is to rounding.
inline double linf_simplified_content(const PerimeterMeasure& m, const GraphSurface& s,
                                      double rtol = 1e-4) {
    const ConvexBody& ib = m.integrand_body();
    if (!ib.is_polygon() || ib.vertices().size() != 4)
        throw std::invalid_argument("linf_simplified_content: unit square or diamond required");
    bool axis_aligned = true;   // diamond-shaped integrand body: 1-norm dual = max form
    bool corner_square = true;  // square integrand body: dual = |.|_1 sum form
    for (const auto& p : ib.vertices()) {
        const bool on_axis = (std::abs(p.x) < 1e-12 && std::abs(std::abs(p.y) - 1.0) < 1e-12) ||
                             (std::abs(p.y) < 1e-12 && std::abs(std::abs(p.x) - 1.0) < 1e-12);
        const bool on_corner =
            std::abs(std::abs(p.x) - 1.0) < 1e-12 && std::abs(std::abs(p.y) - 1.0) < 1e-12;
        axis_aligned = axis_aligned && on_axis;
        corner_square = corner_square && on_corner;
    }
    if (!axis_aligned && !corner_square)
        throw std::invalid_argument("linf_simplified_content: unit square or diamond required");
    const bool sum_form = corner_square;
    const auto integrand = [&](double x, double y) {
        const double w1 = std::abs(-0.5 * y - s.fx(x, y));
        const double w2 = std::abs(0.5 * x - s.fy(x, y));
        // max(a, b) = (a + b + |a - b|)/2.
        return sum_form ? w1 + w2 : 0.5 * (w1 + w2 + std::abs(w1 - w2));
    };
    return integrate_polygon(s.domain, integrand, rtol).value;
}

}  // namespace heis
