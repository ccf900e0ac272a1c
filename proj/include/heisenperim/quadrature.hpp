#pragma once

// Adaptive 2-D quadrature over convex polygonal domains. The integrands here
// carry absolute-value kinks along switching curves, which defeat high-order
// rules; adaptive cell subdivision with the midpoint rule recovers efficiency.
// A cell is accepted when two successive refinement levels agree to the
// requested relative tolerance. Traversal order is fixed and sums are reduced
// pairwise, so results are bit-stable for any worker count.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "heisenperim/geom.hpp"

namespace heis {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;   // accumulated last-level differences
    std::size_t evaluations = 0;
};

namespace detail {

struct QuadCell {
    double x0, x1, y0, y1;
};

inline double cell_estimate(const Polygon2& domain, const QuadCell& c,
                            const std::function<double(double, double)>& f, double& area_out,
                            std::size_t& evals) {
    const Polygon2 clipped = clip_to_rect(domain, c.x0, c.x1, c.y0, c.y1);
    if (clipped.size() < 3) {
        area_out = 0.0;
        return 0.0;
    }
    const double a = polygon_signed_area(clipped);
    area_out = a;
    if (a <= 0.0) return 0.0;
    const Vec2 mid = polygon_centroid(clipped);
    ++evals;
    return a * f(mid.x, mid.y);
}

inline void adapt_cell(const Polygon2& domain, const QuadCell& c, double coarse,
                       const std::function<double(double, double)>& f, double tol_per_area,
                       int depth, int max_depth, std::vector<double>& acc, double& err,
                       std::size_t& evals) {
    const double xm = 0.5 * (c.x0 + c.x1);
    const double ym = 0.5 * (c.y0 + c.y1);
    const QuadCell kids[4] = {{c.x0, xm, c.y0, ym},
                              {xm, c.x1, c.y0, ym},
                              {c.x0, xm, ym, c.y1},
                              {xm, c.x1, ym, c.y1}};
    double fine[4];
    double areas[4];
    double fine_sum = 0.0;
    double area_sum = 0.0;
    for (int k = 0; k < 4; ++k) {
        fine[k] = cell_estimate(domain, kids[k], f, areas[k], evals);
        fine_sum += fine[k];
        area_sum += areas[k];
    }
    if (area_sum <= 0.0) return;
    const double diff = std::abs(fine_sum - coarse);
    if (diff <= tol_per_area * area_sum || depth >= max_depth) {
        for (int k = 0; k < 4; ++k)
            if (areas[k] > 0.0) acc.push_back(fine[k]);
        err += diff;
        return;
    }
    for (int k = 0; k < 4; ++k) {
        if (areas[k] <= 0.0) continue;
        adapt_cell(domain, kids[k], fine[k], f, tol_per_area, depth + 1, max_depth, acc, err,
                   evals);
    }
}

}  // namespace detail

// Integrate f over a convex polygonal domain. rtol is relative to the mean
// integrand magnitude; max_depth caps subdivision.
inline QuadratureResult integrate_polygon(const Polygon2& domain,
                                          const std::function<double(double, double)>& f,
                                          double rtol = 1e-4, int initial_grid = 8,
                                          int max_depth = 12) {
    if (domain.size() < 3) throw std::invalid_argument("integrate_polygon: empty domain");
    double x0 = domain[0].x, x1 = domain[0].x, y0 = domain[0].y, y1 = domain[0].y;
    for (const auto& v : domain) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    const double total_area = polygon_signed_area(domain);
    if (total_area <= 0.0)
        throw std::invalid_argument("integrate_polygon: domain must be counterclockwise");

    QuadratureResult res;
    // Coarse pass to set the tolerance scale.
    double scale = 0.0;
    {
        const int g = initial_grid;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                const double x = x0 + (x1 - x0) * (i + 0.5) / g;
                const double y = y0 + (y1 - y0) * (j + 0.5) / g;
                if (point_in_convex(domain, {x, y})) {
                    scale += std::abs(f(x, y));
                    ++res.evaluations;
                }
            }
        scale = std::max(scale / (g * g), 1e-30);
    }
    const double tol_per_area = rtol * scale;

    std::vector<double> acc;
    double err = 0.0;
    const int g = initial_grid;
    for (int j = 0; j < g; ++j) {
        for (int i = 0; i < g; ++i) {
            const detail::QuadCell c{x0 + (x1 - x0) * i / g, x0 + (x1 - x0) * (i + 1) / g,
                                     y0 + (y1 - y0) * j / g, y0 + (y1 - y0) * (j + 1) / g};
            double area = 0.0;
            const double coarse = detail::cell_estimate(domain, c, f, area, res.evaluations);
            if (area <= 0.0) continue;
            detail::adapt_cell(domain, c, coarse, f, tol_per_area, 0, max_depth, acc, err,
                               res.evaluations);
        }
    }
    res.value = pairwise_sum(std::move(acc));
    res.error_estimate = err;
    return res;
}

// Fixed uniform midpoint grid over a convex polygon (used where two
// evaluations must share identical nodes, e.g. difference quotients).
inline double integrate_fixed_grid(const Polygon2& domain,
                                   const std::function<double(double, double)>& f, int res) {
    double x0 = domain[0].x, x1 = domain[0].x, y0 = domain[0].y, y1 = domain[0].y;
    for (const auto& v : domain) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    std::vector<double> acc;
    acc.reserve(static_cast<std::size_t>(res) * static_cast<std::size_t>(res));
    for (int j = 0; j < res; ++j) {
        for (int i = 0; i < res; ++i) {
            const detail::QuadCell c{x0 + (x1 - x0) * i / res, x0 + (x1 - x0) * (i + 1) / res,
                                     y0 + (y1 - y0) * j / res, y0 + (y1 - y0) * (j + 1) / res};
            const Polygon2 clipped = clip_to_rect(domain, c.x0, c.x1, c.y0, c.y1);
            if (clipped.size() < 3) continue;
            const double a = polygon_signed_area(clipped);
            if (a <= 0.0) continue;
            const Vec2 mid = polygon_centroid(clipped);
            acc.push_back(a * f(mid.x, mid.y));
        }
    }
    return pairwise_sum(std::move(acc));
}

// Exact integral of a bivariate quadratic over a triangle (degree-2 rule).
inline double integrate_quadratic_over_triangle(const std::function<double(double, double)>& f,
                                                const Vec2& a, const Vec2& b, const Vec2& c) {
    const double area = 0.5 * cross(b - a, c - a);
    const Vec2 m0 = (a + b) * 0.5, m1 = (b + c) * 0.5, m2 = (c + a) * 0.5;
    return area * (f(m0.x, m0.y) + f(m1.x, m1.y) + f(m2.x, m2.y)) / 3.0;
}

}  // namespace heis
