#pragma once

// The Heisenberg group in exponential coordinates: group law, dilations,
// horizontal path lifting, Carnot-Caratheodory geodesics for a convex-body
// metric, bubble-set generating families, and metric-sphere sampling.
//
// Group law convention: z-component of p*q is z1 + z2 + (x1 y2 - x2 y1)/2,
// matching the left-invariant frame X = d/dx - (y/2) d/dz,
// Y = d/dy + (x/2) d/dz. Admissible curves satisfy dz = (x dy - y dx)/2, so
// the lift of a planar curve accumulates the signed swept area.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "heisenperim/geom.hpp"
#include "heisenperim/mesh.hpp"
#include "heisenperim/parallel.hpp"
#include "heisenperim/planar.hpp"

namespace heis {

struct HPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline HPoint group_mul(const HPoint& p, const HPoint& q) {
    return {p.x + q.x, p.y + q.y, p.z + q.z + 0.5 * (p.x * q.y - q.x * p.y)};
}

inline HPoint group_inverse(const HPoint& p) { return {-p.x, -p.y, -p.z}; }

inline HPoint dilate(double s, const HPoint& p) {
    if (!(s > 0.0)) throw std::invalid_argument("dilate: scale must be positive");
    return {s * p.x, s * p.y, s * s * p.z};
}

// A planar curve together with its lifted heights (one per sample).
struct HorizontalPath {
    PlanarCurve planar;
    std::vector<double> heights;

    HPoint point(std::size_t i) const {
        return {planar.samples[i].x, planar.samples[i].y, heights[i]};
    }
    HPoint endpoint() const { return point(planar.samples.size() - 1); }
};

// Exact per-segment lift: along a straight segment from p to q the swept area
// is cross(p, q)/2.
inline HorizontalPath lift_path(const PlanarCurve& curve, double z0) {
    HorizontalPath hp;
    hp.planar = curve;
    hp.heights.resize(curve.samples.size());
    hp.heights[0] = z0;
    for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i)
        hp.heights[i + 1] = hp.heights[i] + 0.5 * cross(curve.samples[i], curve.samples[i + 1]);
    return hp;
}

// Largest per-step residual of the discrete admissibility condition.
inline double lift_residual(const HorizontalPath& hp) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < hp.planar.samples.size(); ++i) {
        const double dz = hp.heights[i + 1] - hp.heights[i];
        const double swept = 0.5 * cross(hp.planar.samples[i], hp.planar.samples[i + 1]);
        worst = std::max(worst, std::abs(dz - swept));
    }
    return worst;
}

// Left translation of a lifted path by a fixed group element.
inline HorizontalPath left_translate(const HPoint& g, const HorizontalPath& hp) {
    HorizontalPath out = hp;
    for (std::size_t i = 0; i < hp.planar.samples.size(); ++i) {
        const HPoint q = group_mul(g, hp.point(i));
        out.planar.samples[i] = {q.x, q.y};
        out.heights[i] = q.z;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Isoperimetrix loop walking
// ---------------------------------------------------------------------------

// The unit-area isoperimetrix of a metric body, stored as a counterclockwise
// polyline with Minkowski edge lengths for arclength parametrization. Disks
// are polygonized (area preserved exactly, so lifted loops close onto z = 1).
struct IsoLoop {
    ConvexBody metric_body;           // Q
    ConvexBody iso_body;              // unit-area isoperimetrix as a body
    Polygon2 loop;                    // vertices of the walked polyline
    std::vector<double> edge_len;     // Minkowski length per edge
    std::vector<double> cum;          // cum[i] = arclength up to vertex i
    double total = 0.0;               // full loop Minkowski length

    static IsoLoop make(const ConvexBody& Q, double area = 1.0, int disk_segments = 4096) {
        IsoLoop L{Q, isoperimetrix(Q, area), {}, {}, {}, 0.0};
        L.loop = boundary_polyline(L.iso_body, disk_segments);
        const std::size_t m = L.loop.size();
        L.edge_len.resize(m);
        L.cum.resize(m + 1);
        L.cum[0] = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            L.edge_len[i] = norm_eval(Q, L.loop[(i + 1) % m] - L.loop[i]);
            L.cum[i + 1] = L.cum[i] + L.edge_len[i];
        }
        L.total = L.cum[m];
        return L;
    }

    Vec2 point_at(double s) const {
        const std::size_t m = loop.size();
        s = std::fmod(s, total);
        if (s < 0.0) s += total;
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(cum.begin(), cum.end(), s) - cum.begin());
        i = (i == 0 ? 0 : i - 1);
        if (i >= m) i = m - 1;
        const double t = edge_len[i] > 0.0 ? (s - cum[i]) / edge_len[i] : 0.0;
        return lerp(loop[i], loop[(i + 1) % m], t);
    }

    // Arclength position of a point assumed to lie on the loop (closest edge).
    double arcpos_of(const Vec2& q, double* dist_out = nullptr) const {
        const std::size_t m = loop.size();
        double best = std::numeric_limits<double>::infinity();
        double pos = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const Vec2 a = loop[i];
            const Vec2 e = loop[(i + 1) % m] - a;
            const double t = std::clamp(dot(q - a, e) / norm2(e), 0.0, 1.0);
            const double d = norm(q - (a + e * t));
            if (d < best) {
                best = d;
                pos = cum[i] + t * edge_len[i];
            }
        }
        if (dist_out) *dist_out = best;
        return pos;
    }

    // Counterclockwise arc polyline from arclength s0 spanning `span`,
    // including interior corners.
    std::vector<Vec2> arc(double s0, double span) const {
        const std::size_t m = loop.size();
        std::vector<Vec2> pts;
        pts.push_back(point_at(s0));
        double left = span;
        double s = std::fmod(s0, total);
        if (s < 0.0) s += total;
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(cum.begin(), cum.end(), s) - cum.begin());
        i = (i == 0 ? 0 : i - 1);
        if (i >= m) i = m - 1;
        double remaining_on_edge = cum[i + 1] - s;
        while (left > remaining_on_edge + 1e-15) {
            left -= remaining_on_edge;
            i = (i + 1) % m;
            pts.push_back(loop[i]);
            remaining_on_edge = edge_len[i];
        }
        const double t = edge_len[i] > 0.0
                             ? (edge_len[i] - (remaining_on_edge - left)) / edge_len[i]
                             : 0.0;
        const Vec2 end = lerp(loop[i], loop[(i + 1) % m], t);
        if (norm(end - pts.back()) > 1e-15) pts.push_back(end);
        return pts;
    }
};

// ---------------------------------------------------------------------------
// Geodesics and bubble families
// ---------------------------------------------------------------------------

struct GeodesicSpec {
    ConvexBody body;    // metric generator Q
    double scale;       // dilate factor applied to the unit-area isoperimetrix
    Vec2 start;         // point on the scaled isoperimetrix boundary
    double span;        // Minkowski arclength to traverse (counterclockwise)
    int disk_segments = 4096;
};

// Lift of a subarc of the scaled isoperimetrix, translated to start at the
// origin. The Minkowski length of the result equals spec.span.
inline HorizontalPath cc_geodesic(const GeodesicSpec& spec) {
    if (!(spec.scale > 0.0)) throw std::invalid_argument("cc_geodesic: scale must be positive");
    IsoLoop L = IsoLoop::make(spec.body, 1.0, spec.disk_segments);
    for (auto& v : L.loop) v = v * spec.scale;
    for (auto& e : L.edge_len) e *= spec.scale;
    for (auto& c : L.cum) c *= spec.scale;
    L.total *= spec.scale;

    if (spec.span > L.total * (1.0 + 1e-12))
        throw std::invalid_argument("cc_geodesic: span exceeds one full loop");
    double dist = 0.0;
    const double s0 = L.arcpos_of(spec.start, &dist);
    if (dist > 1e-9 * std::max(1.0, spec.scale))
        throw std::invalid_argument("cc_geodesic: start point is not on the scaled isoperimetrix");

    std::vector<Vec2> pts = L.arc(s0, spec.span);
    for (auto& p : pts) p -= spec.start;
    return lift_path(PlanarCurve(std::move(pts), false), 0.0);
}

// Generating family of the Q-bubble set: full unit-area isoperimetrix loops
// through the origin, lifted from z = 0. Every member runs from (0,0,0) to
// (0,0,1).
inline std::vector<HorizontalPath> bubble_family(const ConvexBody& Q, int samples,
                                                 int disk_segments = 4096) {
    if (samples < 1) throw std::invalid_argument("bubble_family: needs at least one sample");
    const IsoLoop L = IsoLoop::make(Q, 1.0, disk_segments);
    const std::size_t m = L.loop.size();
    std::vector<HorizontalPath> fam;
    fam.reserve(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double s0 = L.total * static_cast<double>(k) / static_cast<double>(samples);
        const Vec2 start = L.point_at(s0);
        std::vector<Vec2> pts;
        pts.reserve(m + 2);
        pts.push_back(Vec2{0.0, 0.0});
        // Walk the full loop corner by corner.
        double s = s0;
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(L.cum.begin(), L.cum.end(), std::fmod(s, L.total)) - L.cum.begin());
        i = (i == 0 ? 0 : i - 1) % m;
        for (std::size_t step = 1; step <= m; ++step) {
            const Vec2 corner = L.loop[(i + step) % m];
            const Vec2 q = corner - start;
            if (norm(q - pts.back()) > 1e-15) pts.push_back(q);
        }
        if (norm(pts.back()) > 1e-15) pts.push_back(Vec2{0.0, 0.0});
        fam.push_back(lift_path(PlanarCurve(std::move(pts), false), 0.0));
    }
    return fam;
}

// ---------------------------------------------------------------------------
// Metric sphere sampling
// ---------------------------------------------------------------------------
//
// A point of the unit sphere above planar position p (inside Q) is the
// endpoint of the extremal unit-Minkowski-length subarc of a dilate of the
// isoperimetrix that starts at the origin and ends above p; the envelope over
// all (dilate, start) choices gives the top height, the bottom is the mirror
// image, and vertical walls close the set-valued boundary positions.

namespace detail {

struct ArcSol {
    std::size_t i = 0, j = 0;  // start / end edge indices
    double t = 0.0, u = 0.0;   // parameters on those edges
    Vec2 a, b;                 // endpoints (b - a = p)
    double len = 0.0;          // Minkowski arc length, counterclockwise a -> b
    double sweep = 0.0;        // lifted height gain along the arc from a
};

class BallTopSolver {
  public:
    BallTopSolver(const ConvexBody& Q, int disk_segments = 0)
        : Q_(Q), iso_(isoperimetrix(Q, 1.0)) {
        (void)disk_segments;
        if (Q_.is_polygon()) {
            V_ = iso_.vertices();
            m_ = V_.size();
            lam_.resize(m_);
            L0_ = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                lam_[i] = norm_eval(Q_, V_[(i + 1) % m_] - V_[i]);
                L0_ += lam_[i];
            }
        } else {
            // Unit-area circle; budget 1 in the Q norm is Q.radius() euclidean.
            r1_ = 1.0 / std::sqrt(M_PI);
            beta_ = Q_.radius();
            L0_ = 2.0 * std::sqrt(M_PI) / beta_;
        }
    }

    double apex() const { return 1.0 / (L0_ * L0_); }

    // Envelope height above planar point p with ||p||_Q <= 1.
    double top_height(const Vec2& p) const {
        const double pn = norm(p);
        if (pn < 1e-14) return apex();
        return Q_.is_polygon() ? top_polygon(p) : top_disk(p);
    }

  private:
    // --- disk metric: arcs of circles, closed-form chord geometry ---------
    double top_disk(const Vec2& p) const {
        const double c = norm(p);
        // Arc of euclidean radius R: short arc length R*theta with
        // theta = 2 asin(c / 2R); Minkowski budget 1 means euclidean beta_.
        auto short_len = [&](double R) { return R * 2.0 * std::asin(std::min(1.0, c / (2.0 * R))); };
        auto long_len = [&](double R) { return 2.0 * M_PI * R - short_len(R); };
        auto short_sweep = [&](double R) {
            const double th = 2.0 * std::asin(std::min(1.0, c / (2.0 * R)));
            return 0.5 * R * R * (th - std::sin(th));
        };
        const double Rstar = 0.5 * c;
        if (long_len(Rstar) >= beta_) {
            // Short branch: decreasing from pi*c/2 toward c.
            if (c >= beta_ * (1.0 - 1e-13)) return 0.0;  // equator
            double lo = Rstar, hi = Rstar;
            while (short_len(hi) > beta_) {
                hi *= 2.0;
                if (hi > 1e14 * Rstar) return 0.0;
            }
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (short_len(mid) > beta_ ? lo : hi) = mid;
            }
            return short_sweep(0.5 * (lo + hi));
        }
        // Long branch: increasing from pi*c/2.
        double lo = Rstar, hi = Rstar;
        while (long_len(hi) < beta_) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (long_len(mid) < beta_ ? lo : hi) = mid;
        }
        const double R = 0.5 * (lo + hi);
        return M_PI * R * R - short_sweep(R);
    }

    // --- polygonal metric --------------------------------------------------
    double scaled_edge_len(std::size_t i, double rho) const { return rho * lam_[i]; }

    // All chord solutions b - a = p with a on edge i, b on edge j of rho*I.
    std::vector<ArcSol> chord_solutions(double rho, const Vec2& p) const {
        std::vector<ArcSol> sols;
        const double scale = rho * std::max(1.0, norm(V_[0]));
        for (std::size_t i = 0; i < m_; ++i) {
            const Vec2 Wi = V_[i] * rho;
            const Vec2 Ei = (V_[(i + 1) % m_] - V_[i]) * rho;
            for (std::size_t j = 0; j < m_; ++j) {
                if (j == i) continue;
                const Vec2 Wj = V_[j] * rho;
                const Vec2 Ej = (V_[(j + 1) % m_] - V_[j]) * rho;
                const Vec2 q = p - (Wj - Wi);
                Vec2 tu;
                if (!solve2x2(-Ei.x, Ej.x, -Ei.y, Ej.y, q, tu, 1e-12)) continue;
                const double t = tu.x, u = tu.y;
                const double tol = 1e-9;
                if (t < -tol || t > 1.0 + tol || u < -tol || u > 1.0 + tol) continue;
                ArcSol s;
                s.i = i;
                s.j = j;
                s.t = std::clamp(t, 0.0, 1.0);
                s.u = std::clamp(u, 0.0, 1.0);
                s.a = Wi + Ei * s.t;
                s.b = s.a + p;
                finish_solution(rho, p, s);
                bool dup = false;
                for (const auto& o : sols)
                    if (norm(o.a - s.a) < 1e-10 * scale && std::abs(o.len - s.len) < 1e-10)
                        dup = true;
                if (!dup) sols.push_back(s);
            }
        }
        return sols;
    }

    void finish_solution(double rho, const Vec2& p, ArcSol& s) const {
        const bool same_edge_direct = (s.i == s.j) && (s.u >= s.t);
        std::size_t corners =
            same_edge_direct ? 0 : ((s.j + m_ - s.i - 1) % m_) + 1;
        // Minkowski length of the counterclockwise arc.
        if (same_edge_direct) {
            s.len = (s.u - s.t) * scaled_edge_len(s.i, rho);
        } else {
            double len = (1.0 - s.t) * scaled_edge_len(s.i, rho);
            for (std::size_t k = 1; k < corners; ++k)
                len += scaled_edge_len((s.i + k) % m_, rho);
            len += s.u * scaled_edge_len(s.j, rho);
            s.len = len;
        }
        // Swept area of the lift: shoelace of [0, corners - a, p].
        double twice = 0.0;
        Vec2 prev{0.0, 0.0};
        for (std::size_t k = 1; k <= corners; ++k) {
            const Vec2 c = V_[(s.i + k) % m_] * rho - s.a;
            twice += cross(prev, c);
            prev = c;
        }
        twice += cross(prev, p);
        s.sweep = 0.5 * twice;
    }

    // Flat chord families: configurations that persist along a slide, either
    // both endpoints on one edge (p parallel to it) or the endpoints on a
    // parallel edge pair. Each family lives at one exactly solvable scale;
    // arc length varies linearly along the slide, so length = 1 is a linear
    // solve. All valid candidates are collected.
    void flat_candidates(const Vec2& p, std::vector<double>& out) const {
        const double pn = norm(p);
        for (std::size_t i = 0; i < m_; ++i) {
            const Vec2 ei = V_[(i + 1) % m_] - V_[i];
            // Same-edge configurations need p parallel to the edge.
            if (std::abs(cross(p, ei)) <= 1e-11 * pn * norm(ei) && dot(p, ei) > 0.0) {
                // Direct run along the edge has rho-independent length.
                const double direct = norm_eval(Q_, p);
                if (std::abs(direct - 1.0) <= 1e-9) out.push_back(0.0);
                // Full wrap: length rho*L0 - direct = 1 fixes the scale.
                const double rho = (1.0 + direct) / L0_;
                const double du = pn / (rho * norm(ei));
                if (du <= 1.0 + 1e-12) {
                    ArcSol s;
                    s.i = s.j = i;
                    s.t = std::min(1.0, du);
                    s.u = s.t - du;
                    if (s.u >= -1e-12) {
                        s.u = std::max(0.0, s.u);
                        s.a = V_[i] * rho + ei * (rho * s.t);
                        s.b = s.a + p;
                        finish_solution(rho, p, s);
                        if (std::abs(s.len - 1.0) <= 1e-6) out.push_back(std::max(0.0, s.sweep));
                    }
                }
            }
            // Parallel edge pair i -> j: the chord stays feasible only at the
            // scale where p - rho (V_j - V_i) is parallel to the edge.
            const std::size_t j = (i + m_ / 2) % m_;
            const Vec2 ej = V_[(j + 1) % m_] - V_[j];
            const double denom = cross(V_[j] - V_[i], ei);
            if (std::abs(denom) < 1e-14) continue;
            const double rho = cross(p, ei) / denom;
            if (!(rho > 1e-14)) continue;
            const Vec2 Wi = V_[i] * rho, Wj = V_[j] * rho;
            const Vec2 Ei = ei * rho, Ej = ej * rho;
            const Vec2 q = p - (Wj - Wi);
            if (std::abs(cross(q, Ei)) > 1e-7 * std::max(1.0, pn) * norm(Ei)) continue;
            // u(t) is affine; restrict t to [0,1] with u(t) in [0,1].
            const double ej2 = norm2(Ej);
            const double u0 = dot(q, Ej) / ej2;
            const double ut = dot(Ei, Ej) / ej2;
            double tlo = 0.0, thi = 1.0;
            if (std::abs(ut) < 1e-15) {
                if (u0 < -1e-12 || u0 > 1.0 + 1e-12) continue;
            } else {
                double ta = (0.0 - u0) / ut, tb = (1.0 - u0) / ut;
                if (ta > tb) std::swap(ta, tb);
                tlo = std::max(tlo, ta);
                thi = std::min(thi, tb);
            }
            if (tlo > thi) continue;
            auto sol_at = [&](double t) {
                ArcSol s;
                s.i = i;
                s.j = j;
                s.t = t;
                s.u = std::clamp(u0 + ut * t, 0.0, 1.0);
                s.a = Wi + Ei * t;
                s.b = s.a + p;
                finish_solution(rho, p, s);
                return s;
            };
            const ArcSol sa = sol_at(tlo), sb = sol_at(thi);
            if (std::abs(sb.len - sa.len) < 1e-13) {
                if (std::abs(sa.len - 1.0) <= 1e-6)
                    out.push_back(std::max({0.0, sa.sweep, sb.sweep}));
                continue;
            }
            const double t = tlo + (thi - tlo) * (1.0 - sa.len) / (sb.len - sa.len);
            if (t < tlo - 1e-12 || t > thi + 1e-12) continue;
            const ArcSol s = sol_at(std::clamp(t, tlo, thi));
            if (std::abs(s.len - 1.0) <= 1e-6) out.push_back(std::max(0.0, s.sweep));
        }
    }

    struct RhoStats {
        double minlen = std::numeric_limits<double>::infinity();
        double maxlen = -std::numeric_limits<double>::infinity();
        bool any = false;
        ArcSol best;  // solution with len closest to 1
    };

    RhoStats stats_at(double rho, const Vec2& p) const {
        RhoStats st;
        double best_gap = std::numeric_limits<double>::infinity();
        for (const auto& s : chord_solutions(rho, p)) {
            st.minlen = std::min(st.minlen, s.len);
            st.maxlen = std::max(st.maxlen, s.len);
            const double gap = std::abs(s.len - 1.0);
            if (!st.any || gap < best_gap) {
                best_gap = gap;
                st.best = s;
            }
            st.any = true;
        }
        return st;
    }

    double top_polygon(const Vec2& p) const {
        std::vector<double> candidates;
        flat_candidates(p, candidates);

        const double rho_star = 0.5 * norm_eval(iso_, p);
        RhoStats st0;
        double rho0 = rho_star;
        for (const double bump : {1e-9, 1e-7, 1e-5, 1e-3}) {
            rho0 = rho_star * (1.0 + bump);
            st0 = stats_at(rho0, p);
            if (st0.any) break;
        }
        if (st0.any) {
            if (std::abs(st0.best.len - 1.0) <= 1e-7)
                candidates.push_back(std::max(0.0, st0.best.sweep));
            if (st0.maxlen < 1.0) {
                // Long branch: the longest arc grows with the scale.
                double lo = rho0, hi = rho0;
                for (int it = 0; it < 200; ++it) {
                    hi *= 1.5;
                    const RhoStats st = stats_at(hi, p);
                    if (st.any && st.maxlen >= 1.0) break;
                    lo = hi;
                }
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const RhoStats st = stats_at(mid, p);
                    ((st.any ? st.maxlen : 0.0) < 1.0 ? lo : hi) = mid;
                }
                const RhoStats st = stats_at(hi, p);
                if (st.any && std::abs(st.best.len - 1.0) <= 1e-6)
                    candidates.push_back(std::max(0.0, st.best.sweep));
            } else if (st0.minlen > 1.0) {
                // Short branch: the shortest arc shrinks toward ||p||_Q.
                if (norm_eval(Q_, p) < 1.0 - 1e-12) {
                    double lo = rho0, hi = rho0;
                    bool bracketed = false;
                    for (int it = 0; it < 200; ++it) {
                        hi *= 1.5;
                        const RhoStats st = stats_at(hi, p);
                        if (st.any && st.minlen <= 1.0) {
                            bracketed = true;
                            break;
                        }
                        lo = hi;
                    }
                    if (bracketed) {
                        for (int it = 0; it < 100; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            const RhoStats st = stats_at(mid, p);
                            ((st.any ? st.minlen : 2.0) > 1.0 ? lo : hi) = mid;
                        }
                        const RhoStats st = stats_at(lo, p);
                        if (st.any && std::abs(st.best.len - 1.0) <= 1e-6)
                            candidates.push_back(std::max(0.0, st.best.sweep));
                    }
                }
            }
        }
        if (candidates.empty()) {
            // Only straight runs of length 1 reach this point (boundary of Q).
            if (norm_eval(Q_, p) >= 1.0 - 1e-9) return 0.0;
            throw std::runtime_error("sphere_sample: no unit-length arc found at a sample point");
        }
        return *std::max_element(candidates.begin(), candidates.end());
    }

    ConvexBody Q_;
    ConvexBody iso_;
    Polygon2 V_;
    std::vector<double> lam_;
    std::size_t m_ = 0;
    double L0_ = 0.0;
    double r1_ = 0.0;    // disk: euclidean radius of the unit-area circle
    double beta_ = 1.0;  // disk: euclidean length budget per Minkowski unit
};

}  // namespace detail

// Counterclockwise parametrization of the boundary of Q with antipodal node
// pairing: node m + M/2 is exactly -node m.
inline Polygon2 footprint_nodes(const ConvexBody& Q, int resolution) {
    Polygon2 nodes;
    if (Q.is_polygon()) {
        const Polygon2& v = Q.vertices();
        const std::size_t e = v.size();
        const int per_edge = std::max(1, static_cast<int>((static_cast<std::size_t>(resolution) + e - 1) / e));
        nodes.reserve(e * static_cast<std::size_t>(per_edge));
        for (std::size_t i = 0; i < e; ++i)
            for (int k = 0; k < per_edge; ++k)
                nodes.push_back(lerp(v[i], v[(i + 1) % e], static_cast<double>(k) / per_edge));
    } else {
        const int M = resolution + (resolution % 2);
        nodes.reserve(static_cast<std::size_t>(M));
        for (int i = 0; i < M; ++i) {
            const double t = 2.0 * M_PI * static_cast<double>(i) / M;
            nodes.push_back({Q.radius() * std::cos(t), Q.radius() * std::sin(t)});
        }
    }
    // Enforce exact antipodal symmetry.
    const std::size_t M = nodes.size();
    for (std::size_t i = 0; i < M / 2; ++i) nodes[i + M / 2] = -nodes[i];
    return nodes;
}

// Watertight triangle mesh of the unit Carnot-Caratheodory sphere for the
// metric generated by Q. Symmetric under (x, y, z) -> (-x, -y, z) and
// z -> -z; polygonal metrics acquire vertical walls over the boundary of Q.
inline TriMesh sphere_sample(const ConvexBody& Q, int resolution = 256) {
    if (resolution < 16) throw std::invalid_argument("sphere_sample: resolution too coarse");
    const detail::BallTopSolver solver(Q);
    const Polygon2 ring = footprint_nodes(Q, resolution);
    const std::size_t M = ring.size();
    const std::size_t K = std::max<std::size_t>(8, static_cast<std::size_t>(resolution) / 2);

    // Heights z[k][m] at planar node (k/K) * ring[m]; antipodal symmetry lets
    // us solve only half of each ring.
    std::vector<std::vector<double>> z(K + 1, std::vector<double>(M, 0.0));
    z[0].assign(M, solver.apex());
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t k = 1; k <= K; ++k)
        for (std::size_t m = 0; m < M / 2; ++m) jobs.push_back({k, m});
    parallel_for(jobs.size(), [&](std::size_t idx) {
        const auto [k, m] = jobs[idx];
        const double t = static_cast<double>(k) / static_cast<double>(K);
        z[k][m] = solver.top_height(ring[m] * t);
    });
    for (std::size_t k = 1; k <= K; ++k)
        for (std::size_t m = 0; m < M / 2; ++m) z[k][m + M / 2] = z[k][m];

    // Assemble: top cap, bottom cap (mirror), rim welds, wall strips.
    TriMesh mesh;
    const double weld_tol = 1e-7;
    const int top_pole = 0, bot_pole = 1;
    mesh.verts.push_back({0.0, 0.0, solver.apex()});
    mesh.verts.push_back({0.0, 0.0, -solver.apex()});
    std::vector<std::vector<int>> top_id(K + 1, std::vector<int>(M, -1));
    std::vector<std::vector<int>> bot_id(K + 1, std::vector<int>(M, -1));
    for (std::size_t k = 1; k <= K; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(K);
        for (std::size_t m = 0; m < M; ++m) {
            const Vec2 p = ring[m] * t;
            const bool weld = (k == K) && (z[k][m] <= weld_tol);
            top_id[k][m] = static_cast<int>(mesh.verts.size());
            mesh.verts.push_back({p.x, p.y, weld ? 0.0 : z[k][m]});
            bot_id[k][m] = weld ? top_id[k][m] : static_cast<int>(mesh.verts.size());
            if (!weld) mesh.verts.push_back({p.x, p.y, -z[k][m]});
        }
    }
    auto quad = [&](int a, int b, int c, int d) {
        // Split (a, b, c, d) into triangles, skipping degenerate ones.
        if (a != b && b != c && a != c) mesh.tris.push_back({a, b, c});
        if (a != c && c != d && a != d) mesh.tris.push_back({a, c, d});
    };
    for (std::size_t m = 0; m < M; ++m) {
        const std::size_t m1 = (m + 1) % M;
        quad(top_pole, top_id[1][m], top_id[1][m1], top_pole);          // top fan
        quad(bot_pole, bot_id[1][m1], bot_id[1][m], bot_pole);          // bottom fan
        for (std::size_t k = 1; k < K; ++k) {
            quad(top_id[k][m], top_id[k + 1][m], top_id[k + 1][m1], top_id[k][m1]);
            quad(bot_id[k][m], bot_id[k][m1], bot_id[k + 1][m1], bot_id[k + 1][m]);
        }
        // Wall between top and bottom rims.
        quad(top_id[K][m], bot_id[K][m], bot_id[K][m1], top_id[K][m1]);
    }
    if (mesh_volume_signed(mesh) < 0.0) mesh_flip_orientation(mesh);
    if (!mesh_is_watertight(mesh))
        throw std::runtime_error("sphere_sample: resolution too coarse to close the mesh");
    return mesh;
}

// Raw endpoint cloud of the (dilate scale x start point) family used by the
// envelope: endpoints of unit-Minkowski-length subarcs of dilates of the
// isoperimetrix, lifted from the origin. Both hemispheres are emitted.
inline std::vector<Vec3> sphere_point_cloud(const ConvexBody& Q, int nscales = 64,
                                            int nstarts = 64, int disk_segments = 1024) {
    const IsoLoop L = IsoLoop::make(Q, 1.0, disk_segments);
    std::vector<Vec3> cloud;
    cloud.reserve(static_cast<std::size_t>(nscales) * static_cast<std::size_t>(nstarts) * 2);
    for (int j = 1; j <= nscales; ++j) {
        const double wrap = static_cast<double>(j) / nscales;  // fraction of a full loop
        const double rho = 1.0 / (wrap * L.total);
        IsoLoop S = L;
        for (auto& v : S.loop) v = v * rho;
        for (auto& e : S.edge_len) e *= rho;
        for (auto& c : S.cum) c *= rho;
        S.total *= rho;
        for (int i = 0; i < nstarts; ++i) {
            const double s0 = S.total * static_cast<double>(i) / nstarts;
            // Walk the scaled loop a Minkowski length of 1.
            std::vector<Vec2> pts = S.arc(s0, 1.0);
            const Vec2 start = pts.front();
            for (auto& p : pts) p -= start;
            const HorizontalPath hp = lift_path(PlanarCurve(std::move(pts), false), 0.0);
            const HPoint e = hp.endpoint();
            cloud.push_back({e.x, e.y, e.z});
            cloud.push_back({e.x, e.y, -e.z});
        }
    }
    return cloud;
}

}  // namespace heis
