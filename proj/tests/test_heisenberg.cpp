#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "heisenperim/heisenberg.hpp"
#include "heisenperim/mesh.hpp"
#include "helpers.hpp"

using namespace heis;

namespace {

// Independent closed form for the unit ball of the diamond metric: the top
// height over (x, y) in the unit diamond. Central region: paths wrapping
// three corners of a square dilate; lobes: two-corner staircases whose
// height depends only on the dominant coordinate.
double diamond_ball_top(double x, double y) {
    const double a = std::abs(x), b = std::abs(y);
    const double mx = std::max(a, b), mn = std::min(a, b);
    if (3.0 * mx <= 1.0 + mn) {
        const double s = 1.0 + a + b;
        return s * s / 16.0 - 0.5 * a * b;
    }
    return 0.5 * mx * (1.0 - mx);
}

// Brute-force maximum sweep over the raw (scale x start) arc family hitting
// a small box around p. Independent of the solver's root-finding.
double scatter_top(const ConvexBody& Q, const Vec2& p, double capture) {
    const auto cloud = sphere_point_cloud(Q, 600, 600);
    double best = 0.0;
    for (const auto& c : cloud) {
        if (std::abs(c.x - p.x) < capture && std::abs(c.y - p.y) < capture)
            best = std::max(best, c.z);
    }
    return best;
}

}  // namespace

TEST_CASE("group law") {
    const HPoint id{0, 0, 0};
    const HPoint p{0.3, -1.2, 0.7};
    const HPoint q = group_mul(id, p);
    CHECK(q.x == doctest::Approx(p.x));
    CHECK(q.y == doctest::Approx(p.y));
    CHECK(q.z == doctest::Approx(p.z));
    const HPoint r = group_mul({1, 0, 0}, {0, 1, 0});
    CHECK(r.x == doctest::Approx(1.0));
    CHECK(r.y == doctest::Approx(1.0));
    CHECK(r.z == doctest::Approx(0.5));
    const HPoint e = group_mul(p, group_inverse(p));
    CHECK(e.x == doctest::Approx(0.0));
    CHECK(e.y == doctest::Approx(0.0));
    CHECK(e.z == doctest::Approx(0.0));
    // Associativity on a sample triple.
    const HPoint a{0.1, 0.2, 0.3}, b{-0.7, 0.5, 0.1}, c{2.0, -1.0, 0.4};
    const HPoint lhs = group_mul(group_mul(a, b), c);
    const HPoint rhs = group_mul(a, group_mul(b, c));
    CHECK(lhs.x == doctest::Approx(rhs.x));
    CHECK(lhs.y == doctest::Approx(rhs.y));
    CHECK(lhs.z == doctest::Approx(rhs.z));
}

TEST_CASE("dilations") {
    const HPoint p = dilate(2.0, {1, 1, 1});
    CHECK(p.x == doctest::Approx(2.0));
    CHECK(p.y == doctest::Approx(2.0));
    CHECK(p.z == doctest::Approx(4.0));
    const HPoint q = dilate(1.0, {0.3, 0.4, 0.5});
    CHECK(q.z == doctest::Approx(0.5));
    CHECK_THROWS_AS(dilate(-1.0, {1, 0, 0}), std::invalid_argument);
    // delta_s o delta_t = delta_{st}.
    const HPoint a = dilate(2.0, dilate(3.0, {1, 2, 3}));
    const HPoint b = dilate(6.0, {1, 2, 3});
    CHECK(a.z == doctest::Approx(b.z));
    // Volume scales by s^4 on a box.
    const TriMesh box = make_box_mesh({-0.5, -1.0, -0.25}, {1.5, 0.5, 2.0});
    const double v = mesh_volume(box);
    CHECK(mesh_volume(mesh_dilate(box, 2.0)) == doctest::Approx(16.0 * v).epsilon(1e-9));
    // Automorphism: delta_s(p * q) = delta_s(p) * delta_s(q).
    const HPoint pp{0.2, -0.4, 0.9}, qq{1.1, 0.3, -0.2};
    const HPoint lhs = dilate(1.7, group_mul(pp, qq));
    const HPoint rhs = group_mul(dilate(1.7, pp), dilate(1.7, qq));
    CHECK(lhs.z == doctest::Approx(rhs.z));
}

TEST_CASE("path lifting") {
    // Counterclockwise unit square from the origin.
    const PlanarCurve sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}, false);
    const HorizontalPath hp = lift_path(sq, 0.0);
    CHECK(hp.endpoint().z == doctest::Approx(1.0));
    CHECK(lift_residual(hp) == doctest::Approx(0.0));

    // Circle through the origin (fine polygonization, exact unit area).
    Polygon2 circ = boundary_polyline(ConvexBody::disk(1.0 / std::sqrt(M_PI)), 4096);
    const Vec2 start = circ[0];
    std::vector<Vec2> loop;
    for (std::size_t i = 0; i <= circ.size(); ++i) loop.push_back(circ[i % circ.size()] - start);
    const HorizontalPath hc = lift_path(PlanarCurve(loop, false), 0.0);
    CHECK(hc.endpoint().z == doctest::Approx(1.0).epsilon(1e-12));

    // Straight segment through the origin stays flat.
    const HorizontalPath hs = lift_path(PlanarCurve({{-1, -2}, {0.5, 1.0}}, false), 0.0);
    CHECK(std::abs(hs.endpoint().z) < 1e-15);
}

TEST_CASE("cc geodesics") {
    // Diamond: the full unit-area square loop lifts to (0,0,1).
    {
        GeodesicSpec spec{ConvexBody::unit_diamond(), 1.0, {-0.5, 0.0}, 4.0};
        const HorizontalPath g = cc_geodesic(spec);
        CHECK(norm(g.planar.samples.front()) == doctest::Approx(0.0));
        const HPoint end = g.endpoint();
        CHECK(std::abs(end.x) < 1e-12);
        CHECK(std::abs(end.y) < 1e-12);
        CHECK(end.z == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(minkowski_length(spec.body, g.planar) == doctest::Approx(4.0).epsilon(1e-12));
    }
    // Disk: full loop of the unit-area circle.
    {
        const IsoLoop L = IsoLoop::make(ConvexBody::unit_disk(), 1.0, 4096);
        GeodesicSpec spec{ConvexBody::unit_disk(), 1.0, L.loop[0], L.total, 4096};
        const HorizontalPath g = cc_geodesic(spec);
        const HPoint end = g.endpoint();
        CHECK(std::abs(end.x) < 1e-9);
        CHECK(std::abs(end.y) < 1e-9);
        CHECK(end.z == doctest::Approx(1.0).epsilon(1e-9));
    }
    // Half loop of the square: endpoint height is the swept half area.
    {
        GeodesicSpec spec{ConvexBody::unit_diamond(), 1.0, {-0.5, 0.0}, 2.0};
        const HorizontalPath g = cc_geodesic(spec);
        Polygon2 poly = g.planar.samples;
        CHECK(g.endpoint().z == doctest::Approx(polygon_signed_area(poly)).epsilon(1e-12));
        CHECK(minkowski_length(spec.body, g.planar) == doctest::Approx(2.0).epsilon(1e-12));
    }
    // Span beyond one loop is rejected.
    CHECK_THROWS_AS(cc_geodesic(GeodesicSpec{ConvexBody::unit_diamond(), 1.0, {-0.5, 0.0}, 4.5}),
                    std::invalid_argument);
    // Start off the boundary is rejected.
    CHECK_THROWS_AS(cc_geodesic(GeodesicSpec{ConvexBody::unit_diamond(), 1.0, {0.1, 0.1}, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("bubble family") {
    for (const ConvexBody& Q : {ConvexBody::unit_diamond(), ConvexBody::unit_square(),
                                ConvexBody::unit_disk()}) {
        const auto fam = bubble_family(Q, 24, 2048);
        CHECK(fam.size() == 24);
        for (const auto& path : fam) {
            CHECK(norm(path.planar.samples.front()) == doctest::Approx(0.0));
            const HPoint end = path.endpoint();
            CHECK(std::abs(end.x) < 1e-9);
            CHECK(std::abs(end.y) < 1e-9);
            CHECK(std::abs(end.z - 1.0) < 1e-9);
            CHECK(lift_residual(path) < 1e-12);
        }
    }
    // Diamond body: paths project to unit-area squares through the origin.
    const auto fam = bubble_family(ConvexBody::unit_diamond(), 8);
    for (const auto& path : fam) {
        double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
        for (const auto& p : path.planar.samples) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        CHECK(xmax - xmin == doctest::Approx(1.0));
        CHECK(ymax - ymin == doctest::Approx(1.0));
    }
}

TEST_CASE("left invariance of projected length") {
    test::Rng rng(99);
    const auto fam = bubble_family(ConvexBody::unit_diamond(), 4);
    const ConvexBody Q = ConvexBody::unit_diamond();
    for (const auto& path : fam) {
        const double len = minkowski_length(Q, path.planar);
        const HPoint g{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const HorizontalPath moved = left_translate(g, path);
        CHECK(lift_residual(moved) < 1e-12);  // left translation preserves admissibility
        CHECK(minkowski_length(Q, moved.planar) == doctest::Approx(len).epsilon(1e-12));
    }
}

TEST_CASE("diamond ball heights match the closed form") {
    const detail::BallTopSolver solver(ConvexBody::unit_diamond());
    CHECK(solver.apex() == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    test::Rng rng(3);
    for (int k = 0; k < 200; ++k) {
        const double ang = rng.uniform(0, 2 * M_PI);
        const double rad = rng.uniform(0.0, 0.999);
        const Vec2 dir{std::cos(ang), std::sin(ang)};
        const Vec2 p = dir * (rad / norm_eval(ConvexBody::unit_diamond(), dir));
        const double want = diamond_ball_top(p.x, p.y);
        CHECK(solver.top_height(p) == doctest::Approx(want).epsilon(1e-7));
    }
    // Wall heights on the boundary: z = |x y| / 2 along |x| + |y| = 1.
    for (int k = 0; k < 32; ++k) {
        const double x = (k + 0.5) / 32.0;
        const Vec2 p{x, 1.0 - x};
        CHECK(solver.top_height(p) == doctest::Approx(0.5 * x * (1.0 - x)).epsilon(1e-6));
    }
}

TEST_CASE("disk ball heights match the circular arc formula") {
    const detail::BallTopSolver solver(ConvexBody::unit_disk());
    CHECK(solver.apex() == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-12));
    // At radius c the extremal arc solves R theta = 1 with chord c.
    auto closed_form = [](double c) {
        if (c >= 1.0) return 0.0;
        if (c < 1e-12) return 1.0 / (4.0 * M_PI);
        auto short_len = [&](double R) { return 2.0 * R * std::asin(std::min(1.0, c / (2 * R))); };
        double lo = 0.5 * c, hi = 0.5 * c;
        const bool short_branch = M_PI * c / 2.0 >= 1.0;
        if (short_branch) {
            while (short_len(hi) > 1.0) hi *= 2.0;
        } else {
            while (2 * M_PI * hi - short_len(hi) < 1.0) hi *= 2.0;
        }
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double v = short_branch ? short_len(mid) : 2 * M_PI * mid - short_len(mid);
            ((short_branch ? v > 1.0 : v < 1.0) ? lo : hi) = mid;
        }
        const double R = 0.5 * (lo + hi);
        const double th = 2.0 * std::asin(std::min(1.0, c / (2 * R)));
        const double seg = 0.5 * R * R * (th - std::sin(th));
        return short_branch ? seg : M_PI * R * R - seg;
    };
    for (int k = 0; k <= 20; ++k) {
        const double c = k / 20.0 * 0.999;
        CHECK(solver.top_height({c, 0.0}) == doctest::Approx(closed_form(c)).epsilon(1e-9));
    }
    // Independent scatter check at one radius.
    CHECK(scatter_top(ConvexBody::unit_disk(), {0.4, 0.0}, 0.01) ==
          doctest::Approx(closed_form(0.4)).epsilon(2e-2));
}

TEST_CASE("sphere mesh: diamond") {
    const TriMesh sphere = sphere_sample(ConvexBody::unit_diamond(), 96);
    CHECK(mesh_is_watertight(sphere));
    // Planar shadow is the unit diamond; the pole sits at 1/16 and the
    // highest points (1/8) are the wall tops at the edge midpoints.
    double max_gauge = 0.0;
    double max_z = 0.0;
    double pole_z = 0.0;
    for (const auto& v : sphere.verts) {
        max_gauge = std::max(max_gauge, std::abs(v.x) + std::abs(v.y));
        max_z = std::max(max_z, v.z);
        if (std::hypot(v.x, v.y) < 1e-12) pole_z = std::max(pole_z, v.z);
    }
    CHECK(max_gauge == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pole_z == doctest::Approx(1.0 / 16.0).epsilon(1e-9));
    CHECK(max_z == doctest::Approx(1.0 / 8.0).epsilon(1e-3));
    // Height field symmetric under (x, y) -> (-x, -y).
    const detail::BallTopSolver solver(ConvexBody::unit_diamond());
    CHECK(solver.top_height({0.3, 0.2}) == doctest::Approx(solver.top_height({-0.3, -0.2})));
    // Volume of the closed form, integrated on a fine grid, is 31/72.
    double vol = 0.0;
    const int n = 500;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = -1.0 + 2.0 * (i + 0.5) / n;
            const double y = -1.0 + 2.0 * (j + 0.5) / n;
            if (std::abs(x) + std::abs(y) >= 1.0) continue;
            vol += 2.0 * diamond_ball_top(x, y) * (2.0 / n) * (2.0 / n);
        }
    CHECK(vol == doctest::Approx(31.0 / 72.0).epsilon(2e-3));
    CHECK(mesh_volume(sphere) == doctest::Approx(31.0 / 72.0).epsilon(5e-3));
    // Homogeneity: the dilated mesh scales volume by s^4.
    CHECK(mesh_volume(mesh_dilate(sphere, 2.0)) ==
          doctest::Approx(16.0 * 31.0 / 72.0).epsilon(5e-3));
}

TEST_CASE("sphere mesh: disk (no walls) and square") {
    const TriMesh pansu_ball = sphere_sample(ConvexBody::unit_disk(), 96);
    CHECK(mesh_is_watertight(pansu_ball));
    double pole_z = 0.0, max_r = 0.0;
    for (const auto& v : pansu_ball.verts) {
        if (std::hypot(v.x, v.y) < 1e-12) pole_z = std::max(pole_z, v.z);
        max_r = std::max(max_r, std::hypot(v.x, v.y));
    }
    CHECK(pole_z == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-9));
    CHECK(max_r == doctest::Approx(1.0).epsilon(1e-9));

    // The square-metric ball is a rotated sqrt(2)-dilate of the diamond one.
    const TriMesh sq = sphere_sample(ConvexBody::unit_square(), 96);
    CHECK(mesh_is_watertight(sq));
    CHECK(mesh_volume(sq) == doctest::Approx(4.0 * 31.0 / 72.0).epsilon(5e-3));
}

TEST_CASE("sphere point cloud covers the envelope") {
    const auto cloud = sphere_point_cloud(ConvexBody::unit_diamond(), 400, 400);
    double apex = 0.0;
    for (const auto& c : cloud)
        if (std::hypot(c.x, c.y) < 0.02) apex = std::max(apex, c.z);
    CHECK(apex == doctest::Approx(1.0 / 16.0).epsilon(2e-2));
}

TEST_CASE("sphere sampling rejects coarse resolution") {
    CHECK_THROWS_AS(sphere_sample(ConvexBody::unit_diamond(), 8), std::invalid_argument);
}

TEST_CASE("geodesic endpoint law on random bodies") {
    test::Rng rng(314);
    for (int trial = 0; trial < 12; ++trial) {
        const ConvexBody Q = test::random_symmetric_body(rng, 4);
        const IsoLoop L = IsoLoop::make(Q);
        const double scale = rng.uniform(0.5, 2.0);
        const double s0 = rng.uniform(0.0, L.total * scale);
        const double span = rng.uniform(0.1, L.total * scale * 0.98);
        GeodesicSpec spec{Q, scale, L.point_at(s0 / scale) * scale, span};
        const HorizontalPath g = cc_geodesic(spec);
        // Length matches the requested span; the endpoint height equals the
        // shoelace area of the path closed back through the origin.
        CHECK(minkowski_length(Q, g.planar) == doctest::Approx(span).epsilon(1e-9));
        CHECK(g.endpoint().z ==
              doctest::Approx(polygon_signed_area(g.planar.samples)).epsilon(1e-9));
        CHECK(lift_residual(g) < 1e-12);
    }
}

