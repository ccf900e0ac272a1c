#pragma once

// Command-line harness: body and surface construction from textual specs,
// perimeter/ratio reports, the reference comparison table, bound checks, and
// mesh/report exports. Exit codes: 0 success, 2 tolerance failure, 3 invalid
// input.

#include <array>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "heisenperim/expr.hpp"
#include "heisenperim/perimeter.hpp"
#include "heisenperim/surfaces.hpp"
#include "heisenperim/variation.hpp"

namespace heis::cli {

using nlohmann::json;

struct RunConfig {
    std::string body = "diamond";
    std::string surface = "square-bubble";
    std::string measure = "both";  // mink | anti | both
    double rtol = 1e-4;
    int resolution = 256;
    std::string out;            // empty writes to stdout
    std::string format = "csv"; // csv | json | obj
    std::array<double, 4> domain{-1.0, 1.0, -1.0, 1.0};
    double scale = 2.0;     // bounds: body scaling factor
    int napprox = 3;        // bounds: strong-approximation level
    bool uncentered = false;  // build: emit bubbles over z in [0, 1] instead of |z| <= f

    void validate() const {
        if (!(rtol > 0.0) || rtol > 0.1)
            throw std::invalid_argument("rtol must lie in (0, 0.1]");
        if (resolution < 16) throw std::invalid_argument("resolution must be at least 16");
        if (measure != "mink" && measure != "anti" && measure != "both")
            throw std::invalid_argument("measure must be mink, anti or both");
        if (format != "csv" && format != "json" && format != "obj")
            throw std::invalid_argument("format must be csv, json or obj");
    }
};

// --- body construction ------------------------------------------------------

inline ConvexBody read_body_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open body file: " + path);
    Polygon2 verts;
    double x, y;
    while (f >> x >> y) verts.push_back({x, y});
    return ConvexBody::polygon(std::move(verts));
}

inline void write_body_file(const ConvexBody& b, std::ostream& os) {
    os.precision(17);
    for (const auto& v : boundary_polyline(b, 64)) os << v.x << " " << v.y << "\n";
}

inline ConvexBody parse_body(const std::string& spec) {
    if (spec == "diamond") return ConvexBody::unit_diamond();
    if (spec == "square") return ConvexBody::unit_square();
    if (spec == "disk") return ConvexBody::unit_disk();
    if (spec.rfind("ngon:", 0) == 0) {
        const int k = std::stoi(spec.substr(5));
        return ConvexBody::regular_ngon(k);
    }
    if (spec.rfind("file:", 0) == 0) return read_body_file(spec.substr(5));
    throw std::invalid_argument("unknown body spec: " + spec);
}

// --- surface construction ----------------------------------------------------

struct SurfaceInstance {
    std::string name;
    std::optional<SlabSurface> slab;
    std::optional<TriMesh> mesh;
    std::optional<GraphSurface> graph;

    bool closed() const { return slab || mesh; }
};

inline SurfaceInstance make_surface(const RunConfig& cfg, const ConvexBody& body) {
    SurfaceInstance s;
    s.name = cfg.surface;
    if (cfg.surface == "square-bubble") {
        s.slab = build_square_bubble();
    } else if (cfg.surface == "q-bubble") {
        if (body.is_polygon())
            s.slab = build_polygonal_bubble(body);
        else
            s.mesh = build_q_bubble_mesh(body, cfg.resolution);
    } else if (cfg.surface == "dual-bubble") {
        const ConvexBody dual = polar_dual(body);
        if (dual.is_polygon())
            s.slab = build_polygonal_bubble(dual);
        else
            s.mesh = build_q_bubble_mesh(dual, cfg.resolution);
    } else if (cfg.surface == "pansu-bubble") {
        s.mesh = build_q_bubble_mesh(ConvexBody::unit_disk(), cfg.resolution);
    } else if (cfg.surface == "cc-ball") {
        s.mesh = sphere_sample(body, cfg.resolution);
    } else if (cfg.surface.rfind("graph:", 0) == 0) {
        GraphSurface g = graph_from_expression(
            cfg.surface.substr(6), rect_domain(cfg.domain[0], cfg.domain[1], cfg.domain[2],
                                               cfg.domain[3]));
        if (graph_gradient_residual(g) > 1e-5)
            throw std::invalid_argument("graph expression failed the gradient check");
        s.graph = std::move(g);
    } else if (cfg.surface.rfind("mesh:", 0) == 0) {
        s.mesh = read_obj(cfg.surface.substr(5));
    } else {
        throw std::invalid_argument("unknown surface spec: " + cfg.surface);
    }
    return s;
}

inline double surface_volume(const SurfaceInstance& s, double rtol) {
    if (s.slab) return s.slab->volume();
    if (s.mesh) return mesh_volume(*s.mesh);
    return volume(*s.graph, rtol);
}

inline double surface_content(const PerimeterMeasure& m, const SurfaceInstance& s, double rtol) {
    if (s.slab) return slab_content(m, *s.slab, rtol);
    if (s.mesh) return mesh_content(m, *s.mesh, rtol);
    return graph_content(m, *s.graph, rtol);
}

// --- output helpers -----------------------------------------------------------

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::invalid_argument("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

inline json slab_to_json(const SlabSurface& s) {
    json j;
    j["volume"] = s.volume();
    j["patches"] = json::array();
    for (const auto& p : s.top) {
        json pj;
        pj["coefficients"] = p.c;
        pj["domain"] = json::array();
        for (const auto& v : p.dom) pj["domain"].push_back({v.x, v.y});
        j["patches"].push_back(pj);
    }
    j["walls"] = json::array();
    for (const auto& w : s.walls) {
        json wj;
        wj["base"] = {{w.a.x, w.a.y}, {w.b.x, w.b.y}};
        wj["profile"] = json::array();
        for (const auto& p : w.profile) wj["profile"].push_back({p.x, p.y});
        j["walls"].push_back(wj);
    }
    return j;
}

inline json body_to_json(const ConvexBody& b) {
    json j;
    if (b.is_disk()) {
        j["kind"] = "disk";
        j["radius"] = b.radius();
    } else {
        j["kind"] = "polygon";
        j["vertices"] = json::array();
        for (const auto& v : b.vertices()) j["vertices"].push_back({v.x, v.y});
    }
    j["area"] = b.area();
    return j;
}

// --- commands -----------------------------------------------------------------

inline int cmd_dual(const RunConfig& cfg) {
    const ConvexBody body = parse_body(cfg.body);
    const ConvexBody dual = polar_dual(body);
    Output out(cfg.out);
    if (cfg.format == "json") {
        json j;
        j["body"] = body_to_json(body);
        j["dual"] = body_to_json(dual);
        out.stream() << j.dump(2) << "\n";
    } else {
        // Plain vertex list, one "x y" per line: the body file format.
        write_body_file(dual, out.stream());
    }
    return 0;
}

inline int cmd_build(const RunConfig& cfg) {
    const ConvexBody body = parse_body(cfg.body);
    SurfaceInstance s = make_surface(cfg, body);
    // Bubble sets are built centered (|z| <= f); --uncentered restores the
    // origin-to-(0,0,1) convention for exports.
    const bool is_bubble = cfg.surface.find("bubble") != std::string::npos;
    if (cfg.uncentered && is_bubble && s.mesh)
        for (auto& v : s.mesh->verts) v.z += 0.5;
    const double zshift = (cfg.uncentered && is_bubble) ? 0.5 : 0.0;
    Output out(cfg.out);
    if (cfg.format == "obj") {
        TriMesh mesh;
        if (s.mesh)
            mesh = *s.mesh;
        else if (s.slab)
            mesh = mesh_weld(slab_to_mesh(*s.slab, std::max(4, cfg.resolution / 16)));
        else
            mesh = graph_to_mesh(*s.graph, cfg.resolution);
        if (zshift != 0.0 && !s.mesh)
            for (auto& v : mesh.verts) v.z += zshift;
        write_obj(mesh, out.stream());
    } else if (cfg.format == "json") {
        if (s.slab) {
            json j = slab_to_json(*s.slab);
            j["z_offset"] = zshift;  // slab heights are stored centered
            out.stream() << j.dump(2) << "\n";
        } else {
            const TriMesh mesh = s.mesh ? *s.mesh : graph_to_mesh(*s.graph, cfg.resolution);
            json j;
            j["vertices"] = json::array();
            for (const auto& v : mesh.verts) j["vertices"].push_back({v.x, v.y, v.z});
            j["triangles"] = mesh.tris;
            out.stream() << j.dump(2) << "\n";
        }
    } else {
        // CSV point cloud "x,y,z".
        std::vector<Vec3> pts;
        if (cfg.surface == "cc-ball")
            pts = sphere_point_cloud(body, cfg.resolution, cfg.resolution);
        else if (s.mesh)
            pts = s.mesh->verts;
        else if (s.slab)
            pts = mesh_weld(slab_to_mesh(*s.slab, std::max(4, cfg.resolution / 16))).verts;
        else
            pts = graph_to_mesh(*s.graph, cfg.resolution).verts;
        if (zshift != 0.0)
            for (auto& p : pts) p.z += zshift;
        write_point_cloud_csv(pts, out.stream());
    }
    return 0;
}

inline int cmd_perimeter(const RunConfig& cfg) {
    const ConvexBody body = parse_body(cfg.body);
    const SurfaceInstance s = make_surface(cfg, body);
    IsoReport rep;
    rep.surface = cfg.surface;
    rep.body = cfg.body;
    rep.rtol = cfg.rtol;
    rep.resolution = cfg.resolution;
    rep.volume = surface_volume(s, cfg.rtol);
    const bool want_mink = cfg.measure != "anti";
    const bool want_anti = cfg.measure != "mink";
    if (want_mink) {
        rep.perimeter_mink = surface_content(PerimeterMeasure::minkowski(body), s, cfg.rtol);
        const double coarse =
            surface_content(PerimeterMeasure::minkowski(body), s, cfg.rtol * 16.0);
        rep.convergence = std::abs(coarse - rep.perimeter_mink) /
                          std::max(1e-30, rep.perimeter_mink);
        rep.ratio_mink = iso_ratio(rep.volume, rep.perimeter_mink);
    }
    if (want_anti) {
        rep.perimeter_anti = surface_content(PerimeterMeasure::anti_minkowski(body), s, cfg.rtol);
        rep.ratio_anti = iso_ratio(rep.volume, rep.perimeter_anti);
    }
    Output out(cfg.out);
    if (cfg.format == "json") {
        json j;
        j["surface"] = rep.surface;
        j["body"] = rep.body;
        j["volume"] = rep.volume;
        j["resolution"] = rep.resolution;
        j["rtol"] = rep.rtol;
        j["convergence_estimate"] = rep.convergence;
        if (want_mink) {
            j["perimeter_mink"] = rep.perimeter_mink;
            j["ratio_mink"] = rep.ratio_mink;
        }
        if (want_anti) {
            j["perimeter_anti"] = rep.perimeter_anti;
            j["ratio_anti"] = rep.ratio_anti;
        }
        out.stream() << j.dump(2) << "\n";
    } else {
        // Traceability header, then the report row.
        out.stream() << "# body=" << cfg.body << " resolution=" << cfg.resolution
                     << " rtol=" << cfg.rtol << " convergence=" << rep.convergence << "\n"
                     << "surface,body,volume,mink,anti,ratio_mink,ratio_anti\n"
                     << rep.csv_row() << "\n";
    }
    return 0;
}

struct TableRow {
    std::string surface;
    double ref_mink = 0.0;
    double ref_anti = 0.0;
    double tolerance = 0.01;
};

// Reference isoperimetric ratios for the diamond-metric comparison table.
inline std::vector<TableRow> reference_table() {
    return {{"cc-ball", 0.308626, 0.154422, 0.01},
            {"square-bubble", 0.284938, 0.379918, 0.005},
            {"dual-bubble", 0.268642, 0.228175, 0.005},
            {"pansu-bubble", 0.357117, 0.50504, 0.01}};
}

inline int cmd_table53(const RunConfig& cfg) {
    const ConvexBody diamond = ConvexBody::unit_diamond();
    Output out(cfg.out);
    std::ostream& os = out.stream();
    os.precision(9);

    struct Cell {
        IsoReport rep;
        TableRow ref;
        bool ok_mink = false, ok_anti = false;
    };
    std::vector<Cell> cells;
    for (const TableRow& row : reference_table()) {
        RunConfig rc = cfg;
        rc.surface = row.surface;
        rc.body = "diamond";
        const SurfaceInstance s = make_surface(rc, diamond);
        Cell c;
        c.ref = row;
        c.rep.surface = row.surface;
        c.rep.body = "diamond";
        c.rep.volume = surface_volume(s, cfg.rtol);
        c.rep.perimeter_mink = surface_content(PerimeterMeasure::minkowski(diamond), s, cfg.rtol);
        c.rep.perimeter_anti =
            surface_content(PerimeterMeasure::anti_minkowski(diamond), s, cfg.rtol);
        c.rep.ratio_mink = iso_ratio(c.rep.volume, c.rep.perimeter_mink);
        c.rep.ratio_anti = iso_ratio(c.rep.volume, c.rep.perimeter_anti);
        c.ok_mink = std::abs(c.rep.ratio_mink - row.ref_mink) <= row.tolerance * row.ref_mink;
        c.ok_anti = std::abs(c.rep.ratio_anti - row.ref_anti) <= row.tolerance * row.ref_anti;
        cells.push_back(std::move(c));
    }
    // Ordering verdict: the pansu-bubble row strictly tops both columns.
    const Cell& pansu = cells.back();
    bool pansu_max = true;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
        if (cells[i].rep.ratio_mink >= pansu.rep.ratio_mink) pansu_max = false;
        if (cells[i].rep.ratio_anti >= pansu.rep.ratio_anti) pansu_max = false;
    }

    bool all_ok = pansu_max;
    if (cfg.format == "json") {
        json j;
        j["rows"] = json::array();
        for (const auto& c : cells) {
            json r;
            r["surface"] = c.rep.surface;
            r["volume"] = c.rep.volume;
            r["mink"] = c.rep.perimeter_mink;
            r["anti"] = c.rep.perimeter_anti;
            r["ratio_mink"] = c.rep.ratio_mink;
            r["ratio_anti"] = c.rep.ratio_anti;
            r["ref_mink"] = c.ref.ref_mink;
            r["ref_anti"] = c.ref.ref_anti;
            r["ok_mink"] = c.ok_mink;
            r["ok_anti"] = c.ok_anti;
            j["rows"].push_back(r);
            all_ok = all_ok && c.ok_mink && c.ok_anti;
        }
        j["pansu_maximal"] = pansu_max;
        j["resolution"] = cfg.resolution;
        j["rtol"] = cfg.rtol;
        os << j.dump(2) << "\n";
    } else {
        os << "surface,volume,mink,anti,ratio_mink,ratio_anti,ref_mink,ref_anti,ok_mink,ok_anti\n";
        for (const auto& c : cells) {
            os << c.rep.surface << "," << c.rep.volume << "," << c.rep.perimeter_mink << ","
               << c.rep.perimeter_anti << "," << c.rep.ratio_mink << "," << c.rep.ratio_anti
               << "," << c.ref.ref_mink << "," << c.ref.ref_anti << ","
               << (c.ok_mink ? "yes" : "FLAG") << "," << (c.ok_anti ? "yes" : "FLAG") << "\n";
            all_ok = all_ok && c.ok_mink && c.ok_anti;
        }
        os << "verdict,pansu_maximal," << (pansu_max ? "yes" : "no") << ",,,,,,,\n";
    }
    return all_ok ? 0 : 2;
}

inline int cmd_bounds(const RunConfig& cfg) {
    const ConvexBody body = parse_body(cfg.body);
    const SurfaceInstance s = make_surface(cfg, body);
    if (!s.closed()) throw std::invalid_argument("bounds need a closed surface");
    Output out(cfg.out);
    std::ostream& os = out.stream();
    os.precision(9);

    bool ok = true;
    json j;
    {
        const SandwichReport rep = s.slab ? sandwich_bounds(body, *s.slab, cfg.rtol)
                                          : sandwich_bounds(body, *s.mesh, cfg.rtol);
        ok = ok && rep.contains(16 * cfg.rtol);
        j["sandwich"] = {{"r", rep.r},           {"R", rep.R},
                         {"iso_disk", rep.iso_disk}, {"iso_lo", rep.iso_lo},
                         {"iso", rep.iso},       {"iso_hi", rep.iso_hi},
                         {"aiso_lo", rep.aiso_lo},   {"aiso", rep.aiso},
                         {"aiso_hi", rep.aiso_hi},   {"contains", rep.contains(16 * cfg.rtol)}};
    }
    {
        const StrongApproxBracket b = s.slab ? strong_approx(cfg.napprox, *s.slab, cfg.rtol)
                                             : strong_approx(cfg.napprox, *s.mesh, cfg.rtol);
        ok = ok && b.contains(16 * cfg.rtol);
        j["strong_approx"] = {{"n", b.n},
                              {"Rn", b.Rn},
                              {"lo", b.lo},
                              {"hi", b.hi},
                              {"iso_disk", b.iso_disk},
                              {"contains", b.contains(16 * cfg.rtol)}};
    }
    {
        const auto [scaled, direct] = s.slab ? scaling_check(body, cfg.scale, *s.slab, cfg.rtol)
                                             : scaling_check(body, cfg.scale, *s.mesh, cfg.rtol);
        const bool match = std::abs(scaled - direct) <= 16.0 * cfg.rtol * std::abs(direct);
        ok = ok && match;
        j["scaling"] = {{"r", cfg.scale},
                        {"content_scaled_body", scaled},
                        {"r_times_content", direct},
                        {"match", match}};
    }
    {
        // Containment against the circumscribed disk.
        const auto [rin, rout] = in_circum_radii(body);
        const ConvexBody outer = ConvexBody::disk(rout);
        const auto [inner_c, outer_c] = s.slab
                                            ? containment_bounds(body, outer, *s.slab, cfg.rtol)
                                            : containment_bounds(body, outer, *s.mesh, cfg.rtol);
        const bool ordered = inner_c <= outer_c * (1.0 + 16.0 * cfg.rtol);
        ok = ok && ordered;
        j["containment"] = {{"inscribed_r", rin},
                            {"circumscribed_R", rout},
                            {"content_body", inner_c},
                            {"content_disk", outer_c},
                            {"ordered", ordered}};
    }
    j["surface"] = cfg.surface;
    j["body"] = cfg.body;
    j["rtol"] = cfg.rtol;
    if (cfg.format == "json") {
        os << j.dump(2) << "\n";
    } else {
        os << "check,quantity,value\n";
        for (const auto& [section, vals] : j.items()) {
            if (!vals.is_object()) continue;
            for (const auto& [k, v] : vals.items())
                os << section << "," << k << "," << v.dump() << "\n";
        }
    }
    return ok ? 0 : 2;
}

}  // namespace heis::cli
