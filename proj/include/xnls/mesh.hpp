#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "xnls/core.hpp"
#include "xnls/geometry.hpp"
#include "xnls/marching_cubes_tables.hpp"
#include "xnls/voxel.hpp"

namespace xnls {

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    bool watertight = false;

    bool empty() const { return triangles.empty(); }
};

inline double mesh_area(const TriMesh& mesh) {
    double area = 0.0;
    for (const auto& t : mesh.triangles) {
        const Vec3 e1 = mesh.vertices[t[1]] - mesh.vertices[t[0]];
        const Vec3 e2 = mesh.vertices[t[2]] - mesh.vertices[t[0]];
        area += 0.5 * norm(cross(e1, e2));
    }
    return area;
}

inline double mesh_signed_volume(const TriMesh& mesh) {
    double vol = 0.0;
    for (const auto& t : mesh.triangles)
        vol += dot(mesh.vertices[t[0]], cross(mesh.vertices[t[1]], mesh.vertices[t[2]])) / 6.0;
    return vol;
}

// Two sampling modes:
//   Open:   struts only; where a strut exits the cell the tube is left open
//           (boundary cut disks are interior material in a tessellation and
//           must not count toward surface area).
//   Capped: the box trim is part of the field, so boundary cuts get capped
//           and the mesh is a closed solid suitable for printing.
enum class MeshMode { Open, Capped };

// Marching-cubes isosurface of the model's signed distance field, sampled on
// an (n+1)^3 corner lattice spanning the cell box.
inline TriMesh surface_mesh(const StrutModel& model, int resolution,
                            MeshMode mode = MeshMode::Open) {
    if (resolution < 8) throw InvalidSpec("surface mesh resolution must be >= 8");
    const int n = resolution;
    const int nc = n + 1;
    const double L = model.cell_size_mm;
    const double half = L / 2.0;
    const double pitch = L / n;

    auto corner_coord = [&](int i) { return (static_cast<double>(i) / n - 0.5) * L; };

    // Field values at corners. The capped mode shifts the box face a hair
    // inward so boundary corners read strictly positive and caps are emitted.
    const double cap_shift = 1e-3 * pitch;
    std::vector<float> field(static_cast<std::size_t>(nc) * nc * nc);
    bool boundary_touched = false;
    auto cidx = [&](int i, int j, int k) {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(nc) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(nc) * k);
    };
    for (int k = 0; k < nc; ++k)
        for (int j = 0; j < nc; ++j)
            for (int i = 0; i < nc; ++i) {
                const Vec3 p{corner_coord(i), corner_coord(j), corner_coord(k)};
                double v = struts_sdf(p, model);
                const bool on_boundary =
                    i == 0 || i == n || j == 0 || j == n || k == 0 || k == n;
                if (on_boundary && v < 0) boundary_touched = true;
                if (mode == MeshMode::Capped) v = std::max(v, box_sdf(p, half) + cap_shift);
                field[cidx(i, j, k)] = static_cast<float>(v);
            }

    TriMesh mesh;
    // One shared vertex per lattice edge: key = corner id * 3 + direction.
    std::unordered_map<std::uint64_t, int> edge_vertex;
    auto edge_key = [&](int i, int j, int k, int dir) {
        return static_cast<std::uint64_t>(cidx(i, j, k)) * 3 + dir;
    };

    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                float vals[8];
                int ci[8][3];
                for (int c = 0; c < 8; ++c) {
                    ci[c][0] = i + detail::kMcCornerOffset[c][0];
                    ci[c][1] = j + detail::kMcCornerOffset[c][1];
                    ci[c][2] = k + detail::kMcCornerOffset[c][2];
                    vals[c] = field[cidx(ci[c][0], ci[c][1], ci[c][2])];
                }
                int cube = 0;
                for (int c = 0; c < 8; ++c)
                    if (vals[c] < 0.0f) cube |= 1 << c;
                const int edges = detail::kMcEdgeTable[cube];
                if (edges == 0) continue;

                int everts[12];
                for (int e = 0; e < 12; ++e) {
                    if (!(edges & (1 << e))) continue;
                    const int c0 = detail::kMcEdgeCorners[e][0];
                    const int c1 = detail::kMcEdgeCorners[e][1];
                    // Canonical lattice edge: lower corner + axis direction.
                    int lo = c0, hi = c1, dir = 0;
                    for (int c = 0; c < 3; ++c)
                        if (ci[c0][c] != ci[c1][c]) dir = c;
                    if (ci[c0][dir] > ci[c1][dir]) std::swap(lo, hi);
                    const std::uint64_t key = edge_key(ci[lo][0], ci[lo][1], ci[lo][2], dir);
                    auto it = edge_vertex.find(key);
                    if (it == edge_vertex.end()) {
                        const float v0 = field[cidx(ci[lo][0], ci[lo][1], ci[lo][2])];
                        const float v1 = field[cidx(ci[hi][0], ci[hi][1], ci[hi][2])];
                        double t = v0 == v1 ? 0.5 : static_cast<double>(v0) / (v0 - v1);
                        t = std::clamp(t, 0.0, 1.0);
                        Vec3 p{corner_coord(ci[lo][0]), corner_coord(ci[lo][1]),
                               corner_coord(ci[lo][2])};
                        p[dir] += t * pitch;
                        it = edge_vertex.emplace(key, static_cast<int>(mesh.vertices.size()))
                                 .first;
                        mesh.vertices.push_back(p);
                    }
                    everts[e] = it->second;
                }
                for (const int* t = detail::kMcTriTable[cube]; *t != -1; t += 3) {
                    const int a = everts[t[0]], b = everts[t[1]], c = everts[t[2]];
                    if (a == b || b == c || a == c) continue;
                    const Vec3 cr = cross(mesh.vertices[b] - mesh.vertices[a],
                                          mesh.vertices[c] - mesh.vertices[a]);
                    if (dot(cr, cr) < 1e-24 * pitch * pitch * pitch * pitch) continue;
                    mesh.triangles.push_back({a, b, c});
                }
            }

    if (mesh.triangles.empty())
        throw EmptyModel("no isosurface crossing at resolution " + std::to_string(n));
    mesh.watertight = (mode == MeshMode::Capped) || !boundary_touched;
    return mesh;
}

// Surface area per unit of solid volume (mm^-1).
inline double surface_area_density(const StrutModel& model, int resolution) {
    if (model.empty()) throw EmptyModel("surface area density of an empty model");
    const TriMesh mesh = surface_mesh(model, resolution, MeshMode::Open);
    const double rho = relative_density(voxelize(model, resolution));
    const double cell_volume = model.cell_size_mm * model.cell_size_mm * model.cell_size_mm;
    if (rho <= 0) throw NoSolid("model has no solid voxels at this resolution");
    return mesh_area(mesh) / (rho * cell_volume);
}

// ---------------------------------------------------------------------------
// Binary STL, little-endian: 80-byte header, uint32 count, then per triangle
// a float32 normal (recomputed from winding), 3 float32 vertices, uint16 pad.

inline void export_stl(const TriMesh& mesh, const std::string& path) {
    if (mesh.empty()) throw EmptyModel("refusing to export an empty mesh");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    char header[80] = {};
    std::snprintf(header, sizeof(header), "%s binary STL", kToolVersion);
    out.write(header, 80);
    const std::uint32_t count = static_cast<std::uint32_t>(mesh.triangles.size());
    out.write(reinterpret_cast<const char*>(&count), 4);

    auto put_vec = [&](Vec3 v) {
        const float f[3] = {static_cast<float>(v.x), static_cast<float>(v.y),
                            static_cast<float>(v.z)};
        out.write(reinterpret_cast<const char*>(f), 12);
    };
    for (const auto& t : mesh.triangles) {
        const Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
        Vec3 nrm = cross(b - a, c - a);
        const double len = norm(nrm);
        nrm = len > 0 ? nrm / len : Vec3{0, 0, 0};
        put_vec(nrm);
        put_vec(a);
        put_vec(b);
        put_vec(c);
        const std::uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline TriMesh read_stl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    char header[80];
    in.read(header, 80);
    std::uint32_t count = 0;
    in.read(reinterpret_cast<char*>(&count), 4);
    TriMesh mesh;
    mesh.vertices.reserve(count * 3);
    mesh.triangles.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        float raw[12];
        in.read(reinterpret_cast<char*>(raw), 48);
        std::uint16_t attr;
        in.read(reinterpret_cast<char*>(&attr), 2);
        if (!in) throw IoError("truncated STL '" + path + "'");
        const int base = static_cast<int>(mesh.vertices.size());
        for (int v = 0; v < 3; ++v)
            mesh.vertices.push_back({raw[3 + 3 * v], raw[4 + 3 * v], raw[5 + 3 * v]});
        mesh.triangles.push_back({base, base + 1, base + 2});
    }
    return mesh;
}

inline void export_obj(const TriMesh& mesh, const std::string& path,
                       const std::string& comment = "") {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    if (!comment.empty()) out << "# " << comment << "\n";
    for (const Vec3& v : mesh.vertices)
        out << "v " << format_g9(v.x) << ' ' << format_g9(v.y) << ' ' << format_g9(v.z)
            << '\n';
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace xnls
