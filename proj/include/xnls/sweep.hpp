#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "xnls/analysis.hpp"
#include "xnls/geometry.hpp"
#include "xnls/homogenize.hpp"
#include "xnls/io.hpp"
#include "xnls/mesh.hpp"
#include "xnls/voxel.hpp"

namespace xnls {

// ---------------------------------------------------------------------------
// End-to-end pipeline: spec -> folded model -> grid -> C -> report.

struct PipelineOptions {
    int resolution = 64;
    MaterialSpec material;
    double strain_magnitude = 0.001;
    double solver_tol = 1e-8;
    long max_iters = -1;
};

namespace detail {

template <typename F>
auto pipeline_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.family(), std::string("[") + stage + "] " + e.what());
    }
}

}  // namespace detail

inline AnisotropyReport run_pipeline(const NestedLatticeSpec& spec,
                                     const PipelineOptions& opt) {
    AnisotropyReport report;
    report.design_name = spec.name;
    report.resolution = opt.resolution;
    report.material = opt.material;
    report.strain_magnitude = opt.strain_magnitude;

    const StrutModel folded = detail::pipeline_stage(
        "geometry", [&] { return t4fas_fold(build_base(spec)); });
    const VoxelGrid grid = detail::pipeline_stage(
        "voxelize", [&] { return voxelize(folded, opt.resolution); });
    detail::pipeline_stage("metrics", [&] {
        report.rho_bar = relative_density(grid);
        double area = 0.0;
        try {
            area = mesh_area(surface_mesh(folded, opt.resolution, MeshMode::Open));
        } catch (const EmptyModel&) {
            // No isosurface crossing: an all-void or all-solid cell has no
            // internal surface, so the area is zero.
        }
        const double cell_volume = std::pow(folded.cell_size_mm, 3);
        report.s_bar_cell = area / cell_volume;
        report.s_bar = report.rho_bar > 0 ? area / (report.rho_bar * cell_volume) : 0.0;
        return 0;
    });
    const StiffnessMatrix c = detail::pipeline_stage("homogenize", [&] {
        return homogenize(grid, opt.material, opt.strain_magnitude, opt.solver_tol,
                          opt.max_iters);
    });
    detail::pipeline_stage("analysis", [&] {
        report.asymmetry = c.asymmetry;
        report.cubic = cubic_project(c);
        report.e_gpa = modulus_axis(report.cubic);
        report.e_bar = normalized_modulus(report.e_gpa, opt.material.youngs_modulus_gpa);
        report.zener = zener(report.cubic);
        report.cls = classify(report.zener);
        return 0;
    });
    return report;
}

// ---------------------------------------------------------------------------
// Parameter sweeps. Axis paths:
//   "d<i>"        diameter of order i, mm
//   "theta<i>"    orientation of order i, degrees
//   "resolution"  voxel resolution
//   "d<i>/d<j>"   ratio constraint, applied after plain axes: d_i = ratio*d_j

struct SweepAxis {
    std::string param;
    std::vector<double> values;
};

struct SweepPlan {
    NestedLatticeSpec base_spec;
    std::vector<SweepAxis> axes;
    PipelineOptions options;

    void validate() const;
};

struct SweepRow {
    std::vector<double> parameter_values;  // one per axis, Cartesian order
    NestedLatticeSpec realized_spec;       // after axis and ratio application
    AnisotropyReport report;
};

struct SweepFailure {
    std::vector<double> parameter_values;
    std::string error;
};

struct SweepResult {
    std::vector<std::string> axis_names;
    std::vector<SweepRow> rows;
    std::vector<SweepFailure> failures;
};

namespace detail {

struct ParsedAxis {
    enum Kind { Diameter, Theta, Resolution, Ratio } kind;
    int target = -1;  // order index
    int source = -1;  // ratio source order index
};

inline ParsedAxis parse_axis(const std::string& param) {
    auto parse_d = [](const std::string& s) -> std::optional<int> {
        if (s.size() < 2 || s[0] != 'd') return std::nullopt;
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
        return std::stoi(s.substr(1));
    };
    if (param == "resolution") return {ParsedAxis::Resolution, -1, -1};
    if (auto slash = param.find('/'); slash != std::string::npos) {
        const auto ti = parse_d(param.substr(0, slash));
        const auto si = parse_d(param.substr(slash + 1));
        if (!ti || !si) throw InvalidSpec("bad ratio axis '" + param + "'");
        return {ParsedAxis::Ratio, *ti, *si};
    }
    if (auto d = parse_d(param)) return {ParsedAxis::Diameter, *d, -1};
    if (param.rfind("theta", 0) == 0) {
        const std::string idx = param.substr(5);
        if (!idx.empty() && std::all_of(idx.begin(), idx.end(), [](char c) {
                return std::isdigit(static_cast<unsigned char>(c));
            }))
            return {ParsedAxis::Theta, std::stoi(idx), -1};
    }
    throw InvalidSpec("unknown sweep parameter '" + param + "'");
}

inline NestingOrderSpec& order_by_index(NestedLatticeSpec& spec, int index) {
    for (auto& o : spec.orders)
        if (o.index == index) return o;
    throw InvalidSpec("sweep parameter addresses missing order " + std::to_string(index));
}

}  // namespace detail

inline void SweepPlan::validate() const {
    base_spec.validate();
    if (axes.empty()) throw InvalidSpec("sweep plan needs at least one axis");
    auto has_order = [&](int index) {
        for (const auto& o : base_spec.orders)
            if (o.index == index) return true;
        return false;
    };
    std::vector<int> ratio_targets;
    for (const auto& axis : axes) {
        if (axis.values.empty()) throw InvalidSpec("axis '" + axis.param + "' has no values");
        const auto parsed = detail::parse_axis(axis.param);
        if (parsed.target >= 0 && !has_order(parsed.target))
            throw InvalidSpec("axis '" + axis.param + "' addresses missing order " +
                              std::to_string(parsed.target));
        if (parsed.source >= 0 && !has_order(parsed.source))
            throw InvalidSpec("axis '" + axis.param + "' addresses missing order " +
                              std::to_string(parsed.source));
        if (parsed.kind == detail::ParsedAxis::Ratio) ratio_targets.push_back(parsed.target);
    }
    for (const auto& axis : axes) {
        const auto parsed = detail::parse_axis(axis.param);
        if (parsed.kind == detail::ParsedAxis::Ratio)
            for (int t : ratio_targets)
                if (parsed.source == t)
                    throw InvalidSpec("cyclic ratio constraints through d" +
                                      std::to_string(t));
    }
}

// Runs every grid point; point failures are recorded, not fatal. Rows appear
// in Cartesian order (first axis outermost) regardless of worker count.
inline SweepResult run_sweep(const SweepPlan& plan, int workers = 1) {
    plan.validate();
    SweepResult result;
    std::size_t total = 1;
    for (const auto& axis : plan.axes) {
        result.axis_names.push_back(axis.param);
        total *= axis.values.size();
    }

    struct Slot {
        std::vector<double> values;
        NestedLatticeSpec realized;
        std::optional<AnisotropyReport> report;
        std::string error;
    };
    std::vector<Slot> slots(total);

    auto point_values = [&](std::size_t flat) {
        std::vector<double> vals(plan.axes.size());
        for (std::size_t a = plan.axes.size(); a-- > 0;) {
            const auto& axis = plan.axes[a];
            vals[a] = axis.values[flat % axis.values.size()];
            flat /= axis.values.size();
        }
        return vals;
    };

    auto run_point = [&](std::size_t flat) {
        Slot& slot = slots[flat];
        slot.values = point_values(flat);
        try {
            NestedLatticeSpec spec = plan.base_spec;
            PipelineOptions opt = plan.options;
            // Plain axes first, then ratio constraints on the assigned values.
            for (std::size_t a = 0; a < plan.axes.size(); ++a) {
                const auto parsed = detail::parse_axis(plan.axes[a].param);
                const double v = slot.values[a];
                switch (parsed.kind) {
                    case detail::ParsedAxis::Diameter:
                        detail::order_by_index(spec, parsed.target).diameter_mm = v;
                        break;
                    case detail::ParsedAxis::Theta:
                        detail::order_by_index(spec, parsed.target).orientation_deg = v;
                        break;
                    case detail::ParsedAxis::Resolution:
                        opt.resolution = static_cast<int>(v);
                        break;
                    case detail::ParsedAxis::Ratio:
                        break;
                }
            }
            for (std::size_t a = 0; a < plan.axes.size(); ++a) {
                const auto parsed = detail::parse_axis(plan.axes[a].param);
                if (parsed.kind != detail::ParsedAxis::Ratio) continue;
                auto& target = detail::order_by_index(spec, parsed.target);
                const auto& source = detail::order_by_index(spec, parsed.source);
                target.diameter_mm = slot.values[a] * source.diameter_mm;
            }
            if (!spec.name.empty()) {
                std::string suffix;
                for (std::size_t a = 0; a < plan.axes.size(); ++a)
                    suffix += " " + plan.axes[a].param + "=" + format_g9(slot.values[a]);
                spec.name += suffix;
            }
            slot.realized = spec;
            slot.report = run_pipeline(spec, opt);
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    };

    if (workers <= 1) {
        for (std::size_t f = 0; f < total; ++f) run_point(f);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t f = next.fetch_add(1); f < total; f = next.fetch_add(1))
                    run_point(f);
            });
        for (auto& t : pool) t.join();
    }

    for (auto& slot : slots) {
        if (slot.report)
            result.rows.push_back({std::move(slot.values), std::move(slot.realized),
                                   std::move(*slot.report)});
        else
            result.failures.push_back({std::move(slot.values), std::move(slot.error)});
    }
    return result;
}

inline std::string sweep_csv(const SweepResult& result) {
    std::string out;
    for (const auto& name : result.axis_names) out += name + ",";
    out += report_csv_header() + "\n";
    for (const auto& row : result.rows) {
        for (double v : row.parameter_values) out += format_g9(v) + ",";
        out += report_csv_row(row.report) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Density-targeted diameter search: bisection on a monotone, staircase
// rho(d). Terminates on |rho - target| <= tol or when the bracket shrinks
// below 1e-4 mm, returning the best diameter seen.

inline double target_density_generic(const std::function<double(double)>& rho_of_d,
                                     double target_rho, double d_min, double d_max,
                                     double tol = 0.002) {
    if (d_min <= 0 || d_min >= d_max) throw InvalidSpec("need 0 < d_min < d_max");
    (void)tol;  // the attainable |rho - target| is capped by the voxel staircase
    double rho_lo = rho_of_d(d_min);
    double rho_hi = rho_of_d(d_max);
    if (target_rho < rho_lo || target_rho > rho_hi)
        throw Unbracketed("target rho " + format_g9(target_rho) + " outside [" +
                          format_g9(rho_lo) + ", " + format_g9(rho_hi) + "]");
    double lo = d_min, hi = d_max;
    double best_d = std::abs(rho_lo - target_rho) < std::abs(rho_hi - target_rho) ? d_min : d_max;
    double best_err = std::min(std::abs(rho_lo - target_rho), std::abs(rho_hi - target_rho));
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        const double rho = rho_of_d(mid);
        const double err = std::abs(rho - target_rho);
        if (err < best_err) {
            best_err = err;
            best_d = mid;
        }
        (rho < target_rho ? lo : hi) = mid;
    }
    return best_d;
}

inline double target_density(const NestedLatticeSpec& spec, double target_rho, double d_min,
                             double d_max, int resolution, double tol = 0.002) {
    spec.validate();
    auto rho_of_d = [&](double d) {
        NestedLatticeSpec s = spec;
        for (auto& o : s.orders) o.diameter_mm = d;
        return relative_density(voxelize(t4fas_fold(build_base(s)), resolution));
    };
    return target_density_generic(rho_of_d, target_rho, d_min, d_max, tol);
}

// ---------------------------------------------------------------------------
// Plan config: same structured format as specs, plus an axes table.

inline SweepPlan plan_from_json(const json& j) {
    SweepPlan plan;
    try {
        if (j.contains("design"))
            plan.base_spec = catalog_design(j.at("design").get<std::string>());
        else
            plan.base_spec = spec_from_json(j.at("base_spec"));
        plan.options.resolution = j.value("resolution", 48);
        if (j.contains("material")) {
            const auto& m = j.at("material");
            plan.options.material.youngs_modulus_gpa =
                m.value("youngs_modulus_gpa", 193.0);
            plan.options.material.poisson_ratio = m.value("poisson_ratio", 0.28);
            plan.options.material.void_contrast = m.value("void_contrast", 1e-6);
        }
        plan.options.strain_magnitude = j.value("strain_magnitude", 0.001);
        plan.options.solver_tol = j.value("tol", 1e-8);
        for (const auto& a : j.at("axes")) {
            SweepAxis axis;
            axis.param = a.at("param").get<std::string>();
            axis.values = a.at("values").get<std::vector<double>>();
            plan.axes.push_back(std::move(axis));
        }
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("bad sweep plan: ") + e.what());
    }
    plan.validate();
    return plan;
}

inline SweepPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("bad sweep plan '") + path + "': " + e.what());
    }
    return plan_from_json(j);
}

}  // namespace xnls
