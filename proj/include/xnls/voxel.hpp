#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "xnls/core.hpp"
#include "xnls/geometry.hpp"

namespace xnls {

// ---------------------------------------------------------------------------
// Signed distances. Solid is sdf < 0. The cell solid is the union of strut
// capsules intersected with the cell box, so struts crossing a boundary plane
// are trimmed to half cross-sections there.

inline double capsule_sdf(Vec3 p, const Segment& s) {
    const Vec3 ab = s.b - s.a;
    const Vec3 ap = p - s.a;
    const double denom = dot(ab, ab);
    double t = denom > 0 ? dot(ap, ab) / denom : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(ap - t * ab) - s.radius_mm;
}

inline double box_sdf(Vec3 p, double half_extent) {
    const Vec3 q{std::abs(p.x) - half_extent, std::abs(p.y) - half_extent,
                 std::abs(p.z) - half_extent};
    const Vec3 qp = max3(q, {0, 0, 0});
    const double outside = norm(qp);
    const double inside = std::min(std::max(q.x, std::max(q.y, q.z)), 0.0);
    return outside + inside;
}

// Union of capsules; +infinity for an empty model.
inline double struts_sdf(Vec3 p, const StrutModel& model) {
    double d = std::numeric_limits<double>::infinity();
    for (const Segment& s : model.segments) d = std::min(d, capsule_sdf(p, s));
    return d;
}

inline double sdf(const StrutModel& model, Vec3 p) {
    if (model.empty()) return std::numeric_limits<double>::infinity();
    return std::max(struts_sdf(p, model), box_sdf(p, model.cell_size_mm / 2.0));
}

// ---------------------------------------------------------------------------
// Occupancy grid, sampled at voxel centers.

struct VoxelGrid {
    int resolution = 0;       // n; the grid is n x n x n
    double cell_size_mm = 0;  // L0
    std::vector<std::uint8_t> occupancy;  // x-fastest, n^3 entries

    double pitch() const { return cell_size_mm / resolution; }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(resolution) *
                   (static_cast<std::size_t>(j) +
                    static_cast<std::size_t>(resolution) * static_cast<std::size_t>(k));
    }
    bool solid(int i, int j, int k) const { return occupancy[index(i, j, k)] != 0; }
    double center_coord(int i) const {
        return ((i + 0.5) / resolution - 0.5) * cell_size_mm;
    }
    std::size_t solid_count() const {
        std::size_t c = 0;
        for (auto v : occupancy) c += v;
        return c;
    }
};

// Voxelizes by center sampling. Voxel centers are strictly interior, so only
// the capsule union matters here; the box trim only affects corner-sampled
// surfaces. Rasterization visits each segment's inflated bounding box rather
// than testing every voxel against every segment.
inline VoxelGrid voxelize(const StrutModel& model, int resolution,
                          std::vector<std::string>* warnings = nullptr) {
    if (resolution < 2) throw InvalidSpec("voxel resolution must be >= 2");
    VoxelGrid grid;
    grid.resolution = resolution;
    grid.cell_size_mm = model.cell_size_mm;
    grid.occupancy.assign(static_cast<std::size_t>(resolution) * resolution * resolution, 0);

    const double L = model.cell_size_mm;
    const double pitch = L / resolution;
    if (warnings) {
        double min_d = std::numeric_limits<double>::infinity();
        for (const Segment& s : model.segments) min_d = std::min(min_d, 2 * s.radius_mm);
        if (!model.segments.empty() && min_d < 3 * pitch)
            warnings->push_back("MinFeatureWarning: smallest strut diameter " +
                                format_g9(min_d) + " mm spans fewer than 3 voxels at n=" +
                                std::to_string(resolution));
    }

    auto to_cell = [&](double x) { return x / pitch + 0.5 * resolution - 0.5; };
    for (const Segment& s : model.segments) {
        const Vec3 lo = min3(s.a, s.b) - Vec3{s.radius_mm, s.radius_mm, s.radius_mm};
        const Vec3 hi = max3(s.a, s.b) + Vec3{s.radius_mm, s.radius_mm, s.radius_mm};
        int i0[3], i1[3];
        for (int c = 0; c < 3; ++c) {
            i0[c] = std::max(0, static_cast<int>(std::ceil(to_cell(lo[c]) - 1e-9)));
            i1[c] = std::min(resolution - 1, static_cast<int>(std::floor(to_cell(hi[c]) + 1e-9)));
        }
        for (int k = i0[2]; k <= i1[2]; ++k)
            for (int j = i0[1]; j <= i1[1]; ++j)
                for (int i = i0[0]; i <= i1[0]; ++i) {
                    const std::size_t idx = grid.index(i, j, k);
                    if (grid.occupancy[idx]) continue;
                    const Vec3 p{grid.center_coord(i), grid.center_coord(j),
                                 grid.center_coord(k)};
                    if (capsule_sdf(p, s) < 0) grid.occupancy[idx] = 1;
                }
    }
    return grid;
}

inline double relative_density(const VoxelGrid& grid) {
    const double total = static_cast<double>(grid.occupancy.size());
    return total > 0 ? static_cast<double>(grid.solid_count()) / total : 0.0;
}

}  // namespace xnls
