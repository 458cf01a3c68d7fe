#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "xnls/core.hpp"

namespace xnls {

// ---------------------------------------------------------------------------
// Parametric description of one nested X-cross lattice design.

struct NestingOrderSpec {
    int index = 0;               // nesting order i >= 0
    double orientation_deg = 0;  // theta_i
    double diameter_mm = 0.8;    // strut diameter d_i
};

struct NestedLatticeSpec {
    double cell_size_mm = 8.75;          // L0
    std::vector<double> spacing_mm;      // alpha_i, one per ring transition
    std::vector<NestingOrderSpec> orders;
    Axis orientation_axis = Axis::Z;
    std::string name;

    void validate() const;
    int max_index() const {
        int m = -1;
        for (const auto& o : orders) m = std::max(m, o.index);
        return m;
    }
};

struct Segment {
    Vec3 a, b;
    double radius_mm = 0;

    double length() const { return norm(b - a); }
};

struct StrutModel {
    double cell_size_mm = 0;  // L0; the cell box is [-L0/2, L0/2]^3
    std::vector<Segment> segments;
    std::optional<NestedLatticeSpec> spec;

    bool empty() const { return segments.empty(); }
};

// Default dedup tolerance: far below any strut radius, far above fp noise
// at mm scale.
inline constexpr double kSegmentTol = 1e-6;

// ---------------------------------------------------------------------------
// Side-length recursion: L_{i+1} = sqrt(2) * (L_i / sqrt(2) - alpha_i).

inline std::vector<double> nesting_side_lengths(double cell_size_mm,
                                                const std::vector<double>& spacings,
                                                int count) {
    if (cell_size_mm <= 0) throw NonPositiveLength("cell size must be > 0");
    if (count < 1) throw InvalidSpec("side-length count must be >= 1");
    if (static_cast<int>(spacings.size()) < count - 1)
        throw InvalidSpec("need at least count-1 spacing entries");
    const double sqrt2 = std::sqrt(2.0);
    std::vector<double> sides;
    sides.reserve(count);
    sides.push_back(cell_size_mm);
    for (int i = 0; i + 1 < count; ++i) {
        if (spacings[i] <= 0) throw InvalidSpec("spacing entries must be > 0");
        const double next = sqrt2 * (sides.back() / sqrt2 - spacings[i]);
        if (next <= 0)
            throw NonPositiveLength("L_" + std::to_string(i + 1) + " = " +
                                    format_g9(next) + " mm; spec geometrically infeasible");
        sides.push_back(next);
    }
    return sides;
}

inline void NestedLatticeSpec::validate() const {
    if (cell_size_mm <= 0) throw InvalidSpec("cell_size_mm must be > 0");
    for (double a : spacing_mm)
        if (a <= 0) throw InvalidSpec("spacing_mm entries must be > 0");
    for (const auto& o : orders) {
        if (o.index < 0) throw InvalidSpec("order index must be >= 0");
        if (o.diameter_mm <= 0) throw InvalidSpec("diameter_mm must be > 0");
        if (o.index == 0 && o.orientation_deg != 0.0)
            throw InvalidSpec("order 0 must have orientation_deg = 0");
    }
    for (std::size_t k = 1; k < orders.size(); ++k)
        if (orders[k].index <= orders[k - 1].index)
            throw InvalidSpec("orders must be sorted by strictly increasing index");
    // Contiguous from 0, or a single order of any index (mono).
    if (orders.size() > 1) {
        for (std::size_t k = 0; k < orders.size(); ++k)
            if (orders[k].index != static_cast<int>(k))
                throw InvalidSpec("multi-order specs must use contiguous indices from 0");
    }
    if (!orders.empty()) {
        // Throws NonPositiveLength when the recursion goes infeasible.
        nesting_side_lengths(cell_size_mm, spacing_mm, max_index() + 1);
    }
}

// ---------------------------------------------------------------------------
// X-cross strut placement: the two face diagonals of the L-cube's three
// central planes, rotated rigidly by theta about the chosen axis.

inline std::vector<Segment> xcross_struts(double side_mm, double orientation_deg,
                                          Axis axis, double diameter_mm,
                                          Vec3 center = {}) {
    if (side_mm <= 0) throw NonPositiveLength("X-cross side must be > 0");
    if (diameter_mm <= 0) throw InvalidSpec("strut diameter must be > 0");
    const double h = side_mm / 2.0;
    const double r = diameter_mm / 2.0;
    const Segment base[6] = {
        {{-h, -h, 0}, {h, h, 0}, r},  {{-h, h, 0}, {h, -h, 0}, r},   // XY plane
        {{0, -h, -h}, {0, h, h}, r},  {{0, -h, h}, {0, h, -h}, r},   // YZ plane
        {{-h, 0, -h}, {h, 0, h}, r},  {{-h, 0, h}, {h, 0, -h}, r},   // XZ plane
    };
    const Mat3 rot = axis_rotation(axis, orientation_deg);
    std::vector<Segment> out;
    out.reserve(6);
    for (const Segment& s : base)
        out.push_back({rot * s.a + center, rot * s.b + center, r});
    return out;
}

// ---------------------------------------------------------------------------
// Deduplication: order-insensitive endpoint matching within tol; equal radii
// required to collapse. Output order is lexicographic by canonicalized
// endpoints, so results are deterministic regardless of input order.

namespace detail {

inline bool vec_close(Vec3 a, Vec3 b, double tol) {
    return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
           std::abs(a.z - b.z) <= tol;
}

inline bool segments_match(const Segment& s, const Segment& t, double tol) {
    if (std::abs(s.radius_mm - t.radius_mm) > tol) return false;
    return (vec_close(s.a, t.a, tol) && vec_close(s.b, t.b, tol)) ||
           (vec_close(s.a, t.b, tol) && vec_close(s.b, t.a, tol));
}

inline bool vec_less(Vec3 a, Vec3 b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
}

inline Segment canonical(Segment s) {
    if (vec_less(s.b, s.a)) std::swap(s.a, s.b);
    return s;
}

inline bool segment_less(const Segment& s, const Segment& t) {
    if (vec_less(s.a, t.a)) return true;
    if (vec_less(t.a, s.a)) return false;
    if (vec_less(s.b, t.b)) return true;
    if (vec_less(t.b, s.b)) return false;
    return s.radius_mm < t.radius_mm;
}

}  // namespace detail

inline std::vector<Segment> dedup_segments(const std::vector<Segment>& segments,
                                           double tol_mm = kSegmentTol) {
    if (tol_mm < 0) throw InvalidSpec("dedup tolerance must be >= 0");
    std::vector<Segment> out;
    out.reserve(segments.size());
    for (const Segment& s : segments) {
        const Segment c = detail::canonical(s);
        bool dup = false;
        for (const Segment& kept : out)
            if (detail::segments_match(c, kept, tol_mm)) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(c);
    }
    std::sort(out.begin(), out.end(), detail::segment_less);
    return out;
}

// ---------------------------------------------------------------------------
// Base (pre-fold) structure: one X-cross per nesting order, concentric at the
// cell center.

inline StrutModel build_base(const NestedLatticeSpec& spec) {
    spec.validate();
    StrutModel model;
    model.cell_size_mm = spec.cell_size_mm;
    model.spec = spec;
    if (spec.orders.empty()) return model;
    const auto sides =
        nesting_side_lengths(spec.cell_size_mm, spec.spacing_mm, spec.max_index() + 1);
    for (const auto& order : spec.orders) {
        auto struts = xcross_struts(sides[order.index], order.orientation_deg,
                                    spec.orientation_axis, order.diameter_mm);
        model.segments.insert(model.segments.end(), struts.begin(), struts.end());
    }
    return model;
}

// ---------------------------------------------------------------------------
// Four-fold rotational union about one principal axis through the cell center.

inline StrutModel fourfold(const StrutModel& model, Axis axis) {
    std::vector<Segment> all;
    all.reserve(model.segments.size() * 4);
    for (int q = 0; q < 4; ++q) {
        const Mat3 rot = quarter_turn(axis, q);
        for (const Segment& s : model.segments)
            all.push_back({rot * s.a, rot * s.b, s.radius_mm});
    }
    StrutModel out;
    out.cell_size_mm = model.cell_size_mm;
    out.spec = model.spec;
    out.segments = dedup_segments(all);
    return out;
}

// Clip a segment's axis to the cell box [-h, h]^3. Returns nothing when the
// axis lies entirely outside or the clipped piece degenerates to a point.
inline std::optional<Segment> clip_segment_to_box(const Segment& s, double half_extent) {
    double t0 = 0.0, t1 = 1.0;
    const Vec3 d = s.b - s.a;
    for (int c = 0; c < 3; ++c) {
        const double lo = -half_extent - s.a[c];
        const double hi = half_extent - s.a[c];
        if (std::abs(d[c]) < 1e-300) {
            if (s.a[c] < -half_extent || s.a[c] > half_extent) return std::nullopt;
            continue;
        }
        double ta = lo / d[c], tb = hi / d[c];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 >= t1) return std::nullopt;
    }
    Segment out{s.a + t0 * d, s.a + t1 * d, s.radius_mm};
    if (norm(out.b - out.a) <= kSegmentTol) return std::nullopt;
    return out;
}

// ---------------------------------------------------------------------------
// T4FAS: sequential four-fold unions about Y, X, then Z, then trim the strut
// axes to the cell bounding box. The folded segment set is invariant under
// 90-degree rotations about all three axes.

inline StrutModel t4fas_fold(const StrutModel& model) {
    StrutModel folded = fourfold(model, Axis::Y);
    folded = fourfold(folded, Axis::X);
    folded = fourfold(folded, Axis::Z);
    std::vector<Segment> clipped;
    clipped.reserve(folded.segments.size());
    for (const Segment& s : folded.segments)
        if (auto c = clip_segment_to_box(s, model.cell_size_mm / 2.0)) clipped.push_back(*c);
    folded.segments = dedup_segments(clipped);
    return folded;
}

// ---------------------------------------------------------------------------
// Catalog of the named designs. Paper-convention names:
//   mono  XNFS:<order>:<theta>
//   bi    XNFS:0-1:0-<theta1>
//   tri   XNFS:0-<theta1>-<theta2>

enum class CatalogFamily { Mono, Bi, Tri };

inline constexpr double kDefaultCellMm = 8.75;
inline constexpr double kDefaultSpacingMm = 1.81;
inline constexpr double kDefaultDiameterMm = 0.8;

namespace detail {

inline NestedLatticeSpec catalog_spec(std::string name, std::vector<NestingOrderSpec> orders) {
    NestedLatticeSpec spec;
    spec.cell_size_mm = kDefaultCellMm;
    int max_index = 0;
    for (const auto& o : orders) max_index = std::max(max_index, o.index);
    spec.spacing_mm.assign(max_index, kDefaultSpacingMm);
    spec.orders = std::move(orders);
    spec.name = std::move(name);
    spec.validate();
    return spec;
}

inline std::string deg_label(double deg) { return std::to_string(static_cast<int>(deg)); }

}  // namespace detail

inline std::vector<NestedLatticeSpec> catalog(CatalogFamily family) {
    static constexpr double kAngles[4] = {0, 15, 30, 45};
    std::vector<NestedLatticeSpec> specs;
    switch (family) {
        case CatalogFamily::Mono:
            specs.push_back(detail::catalog_spec(
                "XNFS:0:0", {{0, 0.0, kDefaultDiameterMm}}));
            for (int order : {1, 2})
                for (double theta : kAngles)
                    specs.push_back(detail::catalog_spec(
                        "XNFS:" + std::to_string(order) + ":" + detail::deg_label(theta),
                        {{order, theta, kDefaultDiameterMm}}));
            break;
        case CatalogFamily::Bi:
            for (double theta : kAngles)
                specs.push_back(detail::catalog_spec(
                    "XNFS:0-1:0-" + detail::deg_label(theta),
                    {{0, 0.0, kDefaultDiameterMm}, {1, theta, kDefaultDiameterMm}}));
            break;
        case CatalogFamily::Tri:
            for (double t1 : kAngles)
                for (double t2 : kAngles)
                    specs.push_back(detail::catalog_spec(
                        "XNFS:0-" + detail::deg_label(t1) + "-" + detail::deg_label(t2),
                        {{0, 0.0, kDefaultDiameterMm},
                         {1, t1, kDefaultDiameterMm},
                         {2, t2, kDefaultDiameterMm}}));
            break;
    }
    return specs;
}

inline std::vector<NestedLatticeSpec> full_catalog() {
    std::vector<NestedLatticeSpec> all = catalog(CatalogFamily::Mono);
    for (auto family : {CatalogFamily::Bi, CatalogFamily::Tri})
        for (auto& s : catalog(family)) all.push_back(std::move(s));
    return all;
}

inline NestedLatticeSpec catalog_design(const std::string& name) {
    for (auto& s : full_catalog())
        if (s.name == name) return s;
    throw InvalidSpec("unknown catalog design '" + name + "'");
}

}  // namespace xnls
