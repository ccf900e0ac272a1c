#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "heisenperim/surfaces.hpp"
#include "helpers.hpp"

using namespace heis;

namespace {

// Highest slab z at a planar point, or nothing when outside the footprint.
double slab_top_or_nan(const SlabSurface& s, const Vec2& p) {
    const auto z = s.height_at(p);
    return z ? *z : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

TEST_CASE("square bubble basics") {
    const SlabSurface s = build_square_bubble();
    CHECK(s.top.size() == 4);
    CHECK(s.walls.size() == 4);
    CHECK(slab_top_or_nan(s, {0, 0}) == doctest::Approx(0.5));
    CHECK(slab_top_or_nan(s, {1, 1}) == doctest::Approx(0.0));
    CHECK(s.volume() == doctest::Approx(3.0).epsilon(1e-12));
    // Walls sit over the boundary of [-1,1]^2 with unit Euclid area each.
    for (const auto& w : s.walls) {
        CHECK(norm_eval(s.support, w.a) == doctest::Approx(1.0));
        CHECK(norm_eval(s.support, w.b) == doctest::Approx(1.0));
        CHECK(w.euclid_area() == doctest::Approx(1.0));
    }
}

TEST_CASE("polygonal bubble reproduces the square bubble") {
    const SlabSurface ref = build_square_bubble();
    const SlabSurface gen = build_polygonal_bubble(ConvexBody::unit_diamond());
    CHECK(gen.top.size() == 4);   // (2n)(n-1) with n = 2
    CHECK(gen.walls.size() == 4); // 2n
    test::Rng rng(21);
    for (int k = 0; k < 500; ++k) {
        const Vec2 p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto za = ref.height_at(p);
        const auto zb = gen.height_at(p);
        REQUIRE(static_cast<bool>(za));
        REQUIRE(static_cast<bool>(zb));
        CHECK(*za == doctest::Approx(*zb).epsilon(1e-9));
    }
    CHECK(gen.volume() == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("structure counts for hexagon and octagon") {
    const SlabSurface hex = build_polygonal_bubble(ConvexBody::regular_ngon(6));
    CHECK(hex.top.size() == 12);  // 2n (n-1), n = 3
    CHECK(hex.walls.size() == 6);
    const SlabSurface oct = build_polygonal_bubble(ConvexBody::regular_ngon(8));
    CHECK(oct.top.size() == 24);  // n = 4
    CHECK(oct.walls.size() == 8);
    // Patch domains tile the support: areas add up.
    for (const SlabSurface* s : {&hex, &oct}) {
        double patch_area = 0.0;
        for (const auto& p : s->top) patch_area += polygon_signed_area(p.dom);
        CHECK(patch_area == doctest::Approx(s->support.area()).epsilon(1e-9));
    }
    // Walls sit over the support boundary.
    for (const auto& w : hex.walls) {
        CHECK(norm_eval(hex.support, w.a) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(norm_eval(hex.support, w.b) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("patch continuity across shared edges") {
    for (const ConvexBody& Q : {ConvexBody::unit_diamond(), ConvexBody::regular_ngon(6)}) {
        const SlabSurface s = build_polygonal_bubble(Q);
        int shared_samples = 0;
        for (const auto& patch : s.top) {
            for (std::size_t e = 0; e < patch.dom.size(); ++e) {
                for (int k = 1; k < 8; ++k) {
                    const Vec2 p = lerp(patch.dom[e], patch.dom[(e + 1) % patch.dom.size()],
                                        k / 8.0);
                    double zmin = 1e300, zmax = -1e300;
                    int hits = 0;
                    for (const auto& other : s.top) {
                        if (!point_in_convex(other.dom, p, 1e-9)) continue;
                        const double z = other.eval(p.x, p.y);
                        zmin = std::min(zmin, z);
                        zmax = std::max(zmax, z);
                        ++hits;
                    }
                    if (hits >= 2) {
                        ++shared_samples;
                        CHECK(zmax - zmin < 1e-9);
                    }
                }
            }
        }
        CHECK(shared_samples > 20);  // interior edges were exercised
    }
}

TEST_CASE("bubble volumes agree between slab and mesh forms") {
    // Diamond: exact volume 3 both ways.
    const TriMesh mesh_d = build_q_bubble_mesh(ConvexBody::unit_diamond(), 128);
    CHECK(mesh_volume(mesh_d) == doctest::Approx(3.0).epsilon(1e-2));
    // Hexagon: the slab and mesh constructions are independent.
    const SlabSurface hex = build_polygonal_bubble(ConvexBody::regular_ngon(6));
    const TriMesh mesh_h = build_q_bubble_mesh(ConvexBody::regular_ngon(6), 128);
    CHECK(mesh_volume(mesh_h) == doctest::Approx(hex.volume()).epsilon(1e-2));
    // Pansu bubble: volume 3 as well; its planar shadow is the disk swept by
    // unit-area circles through the origin, radius 2/sqrt(pi).
    const TriMesh pansu = build_q_bubble_mesh(ConvexBody::unit_disk(), 128);
    CHECK(mesh_volume(pansu) == doctest::Approx(3.0).epsilon(1e-2));
    double shadow = 0.0;
    for (const auto& v : pansu.verts) shadow = std::max(shadow, std::hypot(v.x, v.y));
    CHECK(shadow == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-3));
}

TEST_CASE("q-bubble mesh stays within the slab surface") {
    const SlabSurface slab = build_square_bubble();
    const TriMesh mesh = build_q_bubble_mesh(ConvexBody::unit_diamond(), 128);
    CHECK(mesh_is_watertight(mesh));
    double worst = 0.0;
    for (const auto& v : mesh.verts) {
        const auto z = slab.height_at({v.x, v.y}, 1e-7);
        REQUIRE(static_cast<bool>(z));
        worst = std::max(worst, std::abs(v.z) - *z);
    }
    CHECK(worst < 2.0 / 128.0);
    // z extent is [-1/2, 1/2] for the centered bubble.
    double zmin = 0, zmax = 0;
    for (const auto& v : mesh.verts) {
        zmin = std::min(zmin, v.z);
        zmax = std::max(zmax, v.z);
    }
    CHECK(zmax == doctest::Approx(0.5));
    CHECK(zmin == doctest::Approx(-0.5));
}

TEST_CASE("slab to mesh export is consistent") {
    const SlabSurface s = build_square_bubble();
    const TriMesh welded = mesh_weld(slab_to_mesh(s, 16), 1e-9);
    CHECK(mesh_is_watertight(welded));
    CHECK(mesh_volume(welded) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("dilation scales volumes by s^4") {
    const SlabSurface s = build_square_bubble();
    const SlabSurface d = dilate_slab(s, 1.5);
    CHECK(d.volume() == doctest::Approx(std::pow(1.5, 4) * 3.0).epsilon(1e-12));
    GraphSurface g = make_plane_graph(0.0, 0.0, 1.0, rect_domain(0, 1, 0, 1));
    const GraphSurface gd = dilate_graph(g, 2.0);
    CHECK(volume(gd) == doctest::Approx(16.0 * volume(g)).epsilon(1e-6));
}

TEST_CASE("graph gradient consistency check") {
    GraphSurface good;
    good.f = [](double x, double y) { return x * x - 0.5 * x * y; };
    good.fx = [](double x, double y) { return 2 * x - 0.5 * y; };
    good.fy = [](double x, double) { return -0.5 * x; };
    good.domain = rect_domain(-1, 1, -1, 1);
    CHECK(graph_gradient_residual(good) < 1e-5);
    GraphSurface bad = good;
    bad.fx = [](double, double) { return 0.0; };
    CHECK(graph_gradient_residual(bad) > 1e-2);
}

TEST_CASE("marching cubes on a sphere") {
    ImplicitSurface sph;
    sph.F = [](const Vec3& p) { return dot(p, p) - 1.0; };
    sph.gradF = [](const Vec3& p) { return p * 2.0; };
    sph.lo = {-1.3, -1.3, -1.3};
    sph.hi = {1.3, 1.3, 1.3};
    MarchingCubesStats stats;
    const TriMesh m = marching_cubes(sph, 48, &stats);
    CHECK(mesh_is_watertight(m));
    CHECK(mesh_volume(m) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(2e-2));
    CHECK(m.area() == doctest::Approx(4.0 * M_PI).epsilon(2e-2));
    CHECK(stats.vertices == m.verts.size());
    CHECK(stats.singular_gradient_samples == 0);  // the sphere level set is regular
}

TEST_CASE("characteristic points") {
    // Vertical plane x = 0: the projected normal is (1, 0), never zero.
    TriMesh wall;
    wall.verts = {{0, 0, 0}, {0, 1, 0}, {0, 1, 1}, {0, 0, 1}};
    wall.tris = {{0, 1, 2}, {0, 2, 3}};
    CHECK(characteristic_points(wall, 1e-6).empty());

    // Square bubble top patch: the projected normal is (0, x), so the
    // characteristic set is the segment x = 0 (including the origin).
    QuadraticPatch p;
    p.c = {0.5, 0.0, 0.0, 0.0, -0.5, 0.0};
    p.dom = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto pts = characteristic_points(p.as_graph(), 64, 1e-9);
    REQUIRE(pts.size() >= 1);
    bool has_origin = false;
    for (const auto& q : pts) {
        CHECK(std::abs(q.x) < 1e-9);
        if (norm(q) < 1e-12) has_origin = true;
    }
    CHECK(has_origin);

    // Pansu bubble poles are characteristic (the projected normal shrinks
    // toward the poles; the caps are flat so the approach is cubic).
    const TriMesh pansu = build_q_bubble_mesh(ConvexBody::unit_disk(), 192);
    const auto cps = characteristic_points(pansu, 0.2);
    bool near_top = false, near_bottom = false;
    for (const auto& c : cps) {
        if (std::hypot(c.x, c.y) < 0.4 && c.z > 0.4) near_top = true;
        if (std::hypot(c.x, c.y) < 0.4 && c.z < -0.4) near_bottom = true;
    }
    CHECK(near_top);
    CHECK(near_bottom);
}

namespace {

// Brute-force bubble height: the unit-area isoperimetrix translates passing
// through both the origin and p; the top height is the maximal swept area
// minus 1/2. Translate positions come from intersecting the boundary with
// its own p-shift, segment pair by segment pair.
double bubble_top_oracle(const ConvexBody& Q, const Vec2& p) {
    const ConvexBody iso = isoperimetrix(Q, 1.0);
    const Polygon2& V = iso.vertices();
    const std::size_t m = V.size();
    double best = -1e300;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2 a0 = V[i], a1 = V[(i + 1) % m];
        for (std::size_t j = 0; j < m; ++j) {
            const Vec2 b0 = V[j] - p, b1 = V[(j + 1) % m] - p;
            // Solve a0 + t(a1-a0) = b0 + u(b1-b0).
            Vec2 tu;
            if (!solve2x2(a1.x - a0.x, b0.x - b1.x, a1.y - a0.y, b0.y - b1.y, b0 - a0, tu))
                continue;
            if (tu.x < -1e-9 || tu.x > 1 + 1e-9 || tu.y < -1e-9 || tu.y > 1 + 1e-9) continue;
            const Vec2 s = lerp(a0, a1, std::clamp(tu.x, 0.0, 1.0));  // -start of the loop
            // Walk the full loop from s and record the lifted height at p.
            std::vector<Vec2> walk{Vec2{0, 0}};
            for (std::size_t k = 1; k <= m; ++k) {
                const Vec2 c = V[(i + k) % m] - s;
                if (norm(c - walk.back()) > 1e-14) walk.push_back(c);
            }
            if (norm(walk.back()) > 1e-14) walk.push_back({0, 0});
            const HorizontalPath hp = lift_path(PlanarCurve(walk, false), 0.0);
            // Height where the loop passes through p.
            for (std::size_t k = 0; k + 1 < hp.planar.samples.size(); ++k) {
                const Vec2 d = hp.planar.samples[k + 1] - hp.planar.samples[k];
                const double len2 = norm2(d);
                if (len2 < 1e-28) continue;
                const double t = dot(p - hp.planar.samples[k], d) / len2;
                if (t < -1e-7 || t > 1 + 1e-7) continue;
                if (norm(hp.planar.samples[k] + d * t - p) > 1e-7) continue;
                const double z = hp.heights[k] +
                                 0.5 * cross(hp.planar.samples[k],
                                             hp.planar.samples[k + 1]) * std::clamp(t, 0.0, 1.0);
                best = std::max(best, z - 0.5);
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("slab heights match the translate oracle on random bodies") {
    test::Rng rng(4242);
    for (int trial = 0; trial < 4; ++trial) {
        const ConvexBody Q = test::random_symmetric_body(rng, 3);
        const SlabSurface s = build_polygonal_bubble(Q);
        const double R = std::sqrt(s.support.area());
        int checked = 0;
        for (int k = 0; k < 600 && checked < 40; ++k) {
            const Vec2 p{rng.uniform(-R, R), rng.uniform(-R, R)};
            if (norm_eval(s.support, p) > 0.95) continue;
            if (norm(p) < 1e-3) continue;
            const auto z = s.height_at(p);
            if (!z) continue;
            const double want = bubble_top_oracle(Q, p);
            if (want < -1e200) continue;
            CHECK(*z == doctest::Approx(want).epsilon(1e-7).scale(1.0));
            ++checked;
        }
        CHECK(checked >= 25);
    }
}

TEST_CASE("polygonal bubbles for random bodies") {
    test::Rng rng(808);
    for (int trial = 0; trial < 6; ++trial) {
        const ConvexBody Q = test::random_symmetric_body(rng, 4);
        const std::size_t n = Q.vertices().size() / 2;
        const SlabSurface s = build_polygonal_bubble(Q);
        CHECK(s.top.size() == 2 * n * (n - 1));
        CHECK(s.walls.size() == 2 * n);
        // Patch domains tile the support.
        double patch_area = 0.0;
        for (const auto& p : s.top) patch_area += polygon_signed_area(p.dom);
        CHECK(patch_area == doctest::Approx(s.support.area()).epsilon(1e-9));
        // Every unit-area-isoperimetrix bubble encloses volume exactly 3.
        CHECK(s.volume() == doctest::Approx(3.0).epsilon(1e-9));
        // The slab interior heights are positive and bounded by 1/2, and the
        // generating mesh stays inside the slab.
        const TriMesh mesh = build_q_bubble_mesh(Q, 64);
        CHECK(mesh_is_watertight(mesh));
        CHECK(mesh_volume(mesh) == doctest::Approx(s.volume()).epsilon(3e-2));
        for (std::size_t k = 0; k < mesh.verts.size(); k += 7) {
            const auto& v = mesh.verts[k];
            const auto z = s.height_at({v.x, v.y}, 1e-7);
            REQUIRE(static_cast<bool>(z));
            CHECK(std::abs(v.z) <= *z + 1e-7);
        }
    }
}

TEST_CASE("obj round trip") {
    const TriMesh m = build_q_bubble_mesh(ConvexBody::unit_diamond(), 32);
    std::stringstream ss;
    write_obj(m, ss);
    const TriMesh back = read_obj(ss);
    REQUIRE(back.verts.size() == m.verts.size());
    REQUIRE(back.tris.size() == m.tris.size());
    CHECK(mesh_volume(back) == doctest::Approx(mesh_volume(m)).epsilon(1e-12));
}
