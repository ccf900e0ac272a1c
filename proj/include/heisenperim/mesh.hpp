#pragma once

// Indexed triangle meshes: topology checks, volume by the divergence theorem,
// dilation, refinement, and OBJ / CSV emission.

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heisenperim/geom.hpp"

namespace heis {

struct TriMesh {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> tris;

    std::size_t triangle_count() const { return tris.size(); }

    Vec3 tri_normal_area(std::size_t t) const {
        const Vec3& a = verts[static_cast<std::size_t>(tris[t][0])];
        const Vec3& b = verts[static_cast<std::size_t>(tris[t][1])];
        const Vec3& c = verts[static_cast<std::size_t>(tris[t][2])];
        return cross(b - a, c - a) * 0.5;  // length = area, direction = normal
    }

    Vec3 tri_centroid(std::size_t t) const {
        const Vec3& a = verts[static_cast<std::size_t>(tris[t][0])];
        const Vec3& b = verts[static_cast<std::size_t>(tris[t][1])];
        const Vec3& c = verts[static_cast<std::size_t>(tris[t][2])];
        return (a + b + c) / 3.0;
    }

    double area() const {
        std::vector<double> parts;
        parts.reserve(tris.size());
        for (std::size_t t = 0; t < tris.size(); ++t) parts.push_back(norm(tri_normal_area(t)));
        return pairwise_sum(std::move(parts));
    }
};

// Every undirected edge must be used by exactly two triangles, once in each
// direction (consistent orientation).
inline bool mesh_is_watertight(const TriMesh& m) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : m.tris) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[static_cast<std::size_t>(k)];
            const int b = t[static_cast<std::size_t>((k + 1) % 3)];
            if (a == b) return false;
            ++count[{a, b}];
        }
    }
    for (const auto& [e, c] : count) {
        if (c != 1) return false;
        auto it = count.find({e.second, e.first});
        if (it == count.end() || it->second != 1) return false;
    }
    return true;
}

// Signed volume; positive when triangles are oriented outward.
inline double mesh_volume_signed(const TriMesh& m) {
    std::vector<double> parts;
    parts.reserve(m.tris.size());
    for (const auto& t : m.tris) {
        const Vec3& a = m.verts[static_cast<std::size_t>(t[0])];
        const Vec3& b = m.verts[static_cast<std::size_t>(t[1])];
        const Vec3& c = m.verts[static_cast<std::size_t>(t[2])];
        parts.push_back(dot(a, cross(b, c)) / 6.0);
    }
    return pairwise_sum(std::move(parts));
}

inline double mesh_volume(const TriMesh& m) {
    if (!mesh_is_watertight(m)) throw std::invalid_argument("mesh_volume: open mesh rejected");
    return std::abs(mesh_volume_signed(m));
}

inline void mesh_flip_orientation(TriMesh& m) {
    for (auto& t : m.tris) std::swap(t[1], t[2]);
}

// Heisenberg dilation of all vertices: (x, y, z) -> (s x, s y, s^2 z).
inline TriMesh mesh_dilate(const TriMesh& m, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("mesh_dilate: scale must be positive");
    TriMesh out = m;
    for (auto& v : out.verts) {
        v.x *= s;
        v.y *= s;
        v.z *= s * s;
    }
    return out;
}

// Uniform 1:4 refinement (edge midpoints), preserving orientation.
inline TriMesh mesh_refine(const TriMesh& m) {
    TriMesh out;
    out.verts = m.verts;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find({key.first, key.second});
        if (it != midpoint.end()) return it->second;
        const Vec3 p =
            (m.verts[static_cast<std::size_t>(a)] + m.verts[static_cast<std::size_t>(b)]) * 0.5;
        const int idx = static_cast<int>(out.verts.size());
        out.verts.push_back(p);
        midpoint[{key.first, key.second}] = idx;
        return idx;
    };
    out.tris.reserve(m.tris.size() * 4);
    for (const auto& t : m.tris) {
        const int ab = mid(t[0], t[1]);
        const int bc = mid(t[1], t[2]);
        const int ca = mid(t[2], t[0]);
        out.tris.push_back({t[0], ab, ca});
        out.tris.push_back({ab, t[1], bc});
        out.tris.push_back({ca, bc, t[2]});
        out.tris.push_back({ab, bc, ca});
    }
    return out;
}

// Axis-aligned box mesh, outward oriented. Handy for tests and dilation laws.
inline TriMesh make_box_mesh(const Vec3& lo, const Vec3& hi) {
    TriMesh m;
    m.verts = {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
               {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
    m.tris = {{0, 2, 1}, {0, 3, 2},   // bottom (z = lo)
              {4, 5, 6}, {4, 6, 7},   // top
              {0, 1, 5}, {0, 5, 4},   // y = lo
              {1, 2, 6}, {1, 6, 5},   // x = hi
              {2, 3, 7}, {2, 7, 6},   // y = hi
              {3, 0, 4}, {3, 4, 7}};  // x = lo
    return m;
}

// Merge vertices that coincide up to `tol` (snap-grid based) and drop the
// degenerate triangles that result. Makes patchwise-built meshes watertight.
inline TriMesh mesh_weld(const TriMesh& m, double tol = 1e-9) {
    TriMesh out;
    std::map<std::array<long long, 3>, int> seen;
    std::vector<int> remap(m.verts.size());
    for (std::size_t i = 0; i < m.verts.size(); ++i) {
        const Vec3& v = m.verts[i];
        const std::array<long long, 3> key{static_cast<long long>(std::llround(v.x / tol)),
                                           static_cast<long long>(std::llround(v.y / tol)),
                                           static_cast<long long>(std::llround(v.z / tol))};
        auto it = seen.find(key);
        if (it == seen.end()) {
            const int id = static_cast<int>(out.verts.size());
            out.verts.push_back(v);
            seen[key] = id;
            remap[i] = id;
        } else {
            remap[i] = it->second;
        }
    }
    for (const auto& t : m.tris) {
        const int a = remap[static_cast<std::size_t>(t[0])];
        const int b = remap[static_cast<std::size_t>(t[1])];
        const int c = remap[static_cast<std::size_t>(t[2])];
        if (a != b && b != c && a != c) out.tris.push_back({a, b, c});
    }
    return out;
}

inline void write_obj(const TriMesh& m, std::ostream& os) {
    os.precision(17);
    for (const auto& v : m.verts) os << "v " << v.x << " " << v.y << " " << v.z << "\n";
    for (const auto& t : m.tris) os << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
}

inline void write_obj(const TriMesh& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_obj: cannot open " + path);
    write_obj(m, f);
}

inline TriMesh read_obj(std::istream& is) {
    TriMesh m;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            ss >> v.x >> v.y >> v.z;
            m.verts.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> t{};
            for (int k = 0; k < 3; ++k) {
                std::string tok;
                ss >> tok;
                // Accept "i", "i/j", "i/j/k" forms.
                t[static_cast<std::size_t>(k)] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            m.tris.push_back(t);
        }
    }
    return m;
}

inline TriMesh read_obj(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_obj: cannot open " + path);
    return read_obj(f);
}

inline void write_point_cloud_csv(const std::vector<Vec3>& pts, std::ostream& os) {
    os.precision(17);
    for (const auto& p : pts) os << p.x << "," << p.y << "," << p.z << "\n";
}

}  // namespace heis
