// Command-line front end: generate / metrics / homogenize / analyze / sweep /
// ymsurf / export-stl / catalog over the xnls library.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "xnls/analysis.hpp"
#include "xnls/geometry.hpp"
#include "xnls/homogenize.hpp"
#include "xnls/io.hpp"
#include "xnls/mesh.hpp"
#include "xnls/sweep.hpp"
#include "xnls/voxel.hpp"

namespace fs = std::filesystem;
using namespace xnls;

namespace {

int exit_code(ErrorFamily family) {
    switch (family) {
        case ErrorFamily::InvalidSpec: return 2;
        case ErrorFamily::NonPositiveLength: return 3;
        case ErrorFamily::EmptyModel: return 4;
        case ErrorFamily::NoSolid: return 5;
        case ErrorFamily::NotConverged: return 6;
        case ErrorFamily::DegenerateInput: return 7;
        case ErrorFamily::SingularFit: return 8;
        case ErrorFamily::NonPositiveData: return 9;
        case ErrorFamily::Unbracketed: return 10;
        case ErrorFamily::IoError: return 11;
    }
    return 1;
}

std::string provenance(const std::string& config) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config)));
    return std::string(kToolVersion) + " config=" + buf;
}

// Timestamps stay out of output bodies so identical configs giveident
// byte-identical files; the sidecar carries the wall-clock record.
void write_sidecar(const std::string& path, const std::string& prov) {
    std::ofstream out(path + ".meta");
    if (!out) return;
    const std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << prov << "\n" << "written " << stamp << "\n";
}

std::string sanitize(std::string name) {
    for (char& c : name)
        if (c == ':' || c == '/' || c == ' ') c = '_';
    return name;
}

std::vector<NestedLatticeSpec> family_catalog(const std::string& family) {
    if (family == "mono") return catalog(CatalogFamily::Mono);
    if (family == "bi") return catalog(CatalogFamily::Bi);
    if (family == "tri") return catalog(CatalogFamily::Tri);
    if (family == "all") return full_catalog();
    throw InvalidSpec("unknown catalog family '" + family + "' (mono|bi|tri|all)");
}

MaterialSpec parse_material(const std::string& text, double contrast) {
    MaterialSpec mat;
    mat.void_contrast = contrast;
    if (text.empty()) return mat;
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw InvalidSpec("--material expects E,nu (e.g. 193,0.28)");
    try {
        mat.youngs_modulus_gpa = std::stod(text.substr(0, comma));
        mat.poisson_ratio = std::stod(text.substr(comma + 1));
    } catch (const std::exception&) {
        throw InvalidSpec("--material expects E,nu (e.g. 193,0.28)");
    }
    mat.validate();
    return mat;
}

struct MetricsRow {
    double rho = 0, s_bar = 0, s_bar_cell = 0;
};

MetricsRow compute_metrics(const StrutModel& model, int resolution) {
    if (model.empty()) throw EmptyModel("model has no struts");
    MetricsRow row;
    row.rho = relative_density(voxelize(model, resolution));
    double area = 0;
    try {
        area = mesh_area(surface_mesh(model, resolution, MeshMode::Open));
    } catch (const EmptyModel&) {
        area = 0;  // fully solid or invisible at this resolution
    }
    const double cell_volume = std::pow(model.cell_size_mm, 3);
    row.s_bar_cell = area / cell_volume;
    if (row.rho <= 0) throw NoSolid("no solid voxels at this resolution");
    row.s_bar = area / (row.rho * cell_volume);
    return row;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << body;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nested X-cross lattice toolkit: construction, voxel "
                 "homogenization, anisotropy analysis"};
    app.require_subcommand(1);

    // ---- catalog ----
    std::string family = "all", write_dir;
    auto* cmd_catalog = app.add_subcommand("catalog", "list the named lattice designs");
    cmd_catalog->add_option("family", family, "mono|bi|tri|all")->required();
    cmd_catalog->add_option("--write-specs", write_dir, "write one spec JSON per design");

    // ---- generate ----
    std::string gen_spec, gen_design, gen_out, gen_stl;
    int gen_resolution = 64;
    auto* cmd_generate = app.add_subcommand("generate", "build a folded strut model");
    auto* gen_spec_opt = cmd_generate->add_option("--spec", gen_spec, "spec config file");
    cmd_generate->add_option("--design", gen_design, "catalog design name")
        ->excludes(gen_spec_opt);
    cmd_generate->add_option("--out", gen_out, "model output path");
    cmd_generate->add_option("--stl", gen_stl, "also export a capped STL");
    cmd_generate->add_option("--resolution", gen_resolution, "STL sampling resolution");

    // ---- metrics ----
    std::string met_model, met_out;
    int met_resolution = 64;
    auto* cmd_metrics = app.add_subcommand("metrics", "relative density and surface area density");
    cmd_metrics->add_option("--model", met_model, "model file")->required();
    cmd_metrics->add_option("--resolution", met_resolution, "voxel resolution")->required();
    cmd_metrics->add_option("--out", met_out, "CSV output path (default stdout)");

    // ---- homogenize ----
    std::string hom_model, hom_grid, hom_material = "193,0.28", hom_out = "stiffness.txt";
    int hom_resolution = 64;
    double hom_strain = 0.001, hom_tol = 1e-8, hom_contrast = 1e-6;
    auto* cmd_homogenize =
        app.add_subcommand("homogenize", "effective 6x6 stiffness of a voxelized model");
    auto* hom_model_opt = cmd_homogenize->add_option("--model", hom_model, "model file");
    cmd_homogenize->add_option("--grid", hom_grid, "voxel dump file")->excludes(hom_model_opt);
    cmd_homogenize->add_option("--resolution", hom_resolution, "voxel resolution");
    cmd_homogenize->add_option("--material", hom_material, "E,nu in GPa");
    cmd_homogenize->add_option("--strain", hom_strain, "prescribed strain magnitude");
    cmd_homogenize->add_option("--tol", hom_tol, "solver relative residual");
    cmd_homogenize->add_option("--contrast", hom_contrast, "void ersatz contrast");
    cmd_homogenize->add_option("--out", hom_out, "stiffness output path");

    // ---- analyze ----
    std::string ana_stiffness, ana_json, ana_csv;
    double ana_es = 193.0;
    auto* cmd_analyze = app.add_subcommand("analyze", "cubic constants, E, Z, class");
    cmd_analyze->add_option("--stiffness", ana_stiffness, "stiffness file")->required();
    cmd_analyze->add_option("--es", ana_es, "base material modulus, GPa");
    cmd_analyze->add_option("--json", ana_json, "JSON record output path");
    cmd_analyze->add_option("--csv", ana_csv, "CSV row output path");

    // ---- sweep ----
    std::string swp_plan, swp_out = "sweep.csv", swp_failures;
    int swp_workers = 1;
    auto* cmd_sweep = app.add_subcommand("sweep", "run a parameter sweep plan");
    cmd_sweep->add_option("--plan", swp_plan, "plan config file")->required();
    cmd_sweep->add_option("--workers", swp_workers, "simultaneous grid points")
        ->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--out", swp_out, "CSV output path");
    cmd_sweep->add_option("--failures", swp_failures, "failures sidecar path");

    // ---- ymsurf ----
    std::string yms_stiffness, yms_out = "ymsurface.obj";
    int yms_subdiv = 3;
    double yms_es = 193.0;
    auto* cmd_ymsurf = app.add_subcommand("ymsurf", "directional Young's modulus surface");
    cmd_ymsurf->add_option("--stiffness", yms_stiffness, "stiffness file")->required();
    cmd_ymsurf->add_option("--subdiv", yms_subdiv, "icosphere subdivision level");
    cmd_ymsurf->add_option("--es", yms_es, "base material modulus, GPa");
    cmd_ymsurf->add_option("--out", yms_out, "OBJ output path");

    // ---- export-stl ----
    std::string stl_model, stl_out = "model.stl";
    int stl_resolution = 64;
    auto* cmd_export = app.add_subcommand("export-stl", "watertight STL of a model");
    cmd_export->add_option("--model", stl_model, "model file")->required();
    cmd_export->add_option("--resolution", stl_resolution, "sampling resolution")->required();
    cmd_export->add_option("--out", stl_out, "STL output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_catalog) {
            const auto specs = family_catalog(family);
            for (const auto& spec : specs) {
                std::string orders;
                for (const auto& o : spec.orders) {
                    if (!orders.empty()) orders += ",";
                    orders += std::to_string(o.index) + ":" +
                              format_g9(o.orientation_deg) + "deg:" +
                              format_g9(o.diameter_mm) + "mm";
                }
                std::printf("%-18s L0=%smm alpha=%smm orders=%s\n", spec.name.c_str(),
                            format_g9(spec.cell_size_mm).c_str(),
                            spec.spacing_mm.empty() ? "-"
                                                    : format_g9(spec.spacing_mm[0]).c_str(),
                            orders.c_str());
            }
            if (!write_dir.empty()) {
                fs::create_directories(write_dir);
                for (const auto& spec : specs)
                    save_spec(spec, (fs::path(write_dir) / (sanitize(spec.name) + ".json"))
                                        .string());
            }
            return 0;
        }

        if (*cmd_generate) {
            if (gen_spec.empty() && gen_design.empty())
                throw InvalidSpec("generate needs --spec or --design");
            const NestedLatticeSpec spec =
                gen_spec.empty() ? catalog_design(gen_design) : load_spec(gen_spec);
            const std::string prov =
                provenance("generate " + spec_to_json(spec).dump());
            const StrutModel folded = t4fas_fold(build_base(spec));
            const std::string out_path =
                gen_out.empty() ? sanitize(spec.name.empty() ? "model" : spec.name) +
                                      ".model.txt"
                                : gen_out;
            save_model(folded, out_path, prov);
            write_sidecar(out_path, prov);
            std::printf("%s: %zu struts -> %s\n", spec.name.c_str(),
                        folded.segments.size(), out_path.c_str());
            if (!gen_stl.empty()) {
                export_stl(surface_mesh(folded, gen_resolution, MeshMode::Capped), gen_stl);
                write_sidecar(gen_stl, prov);
                std::printf("capped STL -> %s\n", gen_stl.c_str());
            }
            return 0;
        }

        if (*cmd_metrics) {
            const StrutModel model = load_model(met_model);
            std::vector<std::string> warnings;
            voxelize(model, met_resolution, &warnings);
            for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            const MetricsRow row = compute_metrics(model, met_resolution);
            const std::string prov = provenance(
                "metrics " + met_model + " n=" + std::to_string(met_resolution));
            std::string body = "# " + prov + "\n";
            body += "model,n,rho_bar,s_bar,s_bar_cell\n";
            body += met_model + "," + std::to_string(met_resolution) + "," +
                    format_g9(row.rho) + "," + format_g9(row.s_bar) + "," +
                    format_g9(row.s_bar_cell) + "\n";
            if (met_out.empty()) {
                std::fputs(body.c_str(), stdout);
            } else {
                write_text(met_out, body);
                write_sidecar(met_out, prov);
            }
            return 0;
        }

        if (*cmd_homogenize) {
            VoxelGrid grid;
            std::string source;
            if (!hom_grid.empty()) {
                grid = load_voxels(hom_grid);
                source = hom_grid;
            } else {
                if (hom_model.empty()) throw InvalidSpec("homogenize needs --model or --grid");
                const StrutModel model = load_model(hom_model);
                std::vector<std::string> warnings;
                grid = voxelize(model, hom_resolution, &warnings);
                for (const auto& w : warnings)
                    std::fprintf(stderr, "warning: %s\n", w.c_str());
                source = hom_model;
            }
            const MaterialSpec mat = parse_material(hom_material, hom_contrast);
            const StiffnessMatrix c = homogenize(grid, mat, hom_strain, hom_tol);
            const std::string prov = provenance(
                "homogenize " + source + " n=" + std::to_string(grid.resolution) +
                " material=" + hom_material + " strain=" + format_g9(hom_strain) +
                " tol=" + format_g9(hom_tol) + " contrast=" + format_g9(hom_contrast));
            save_stiffness(c, hom_out, prov);
            write_sidecar(hom_out, prov);
            std::printf("C (GPa) -> %s; asymmetry %s, iterations", hom_out.c_str(),
                        format_g9(c.asymmetry).c_str());
            for (int it : c.info.iterations) std::printf(" %d", it);
            std::printf("\n");
            return 0;
        }

        if (*cmd_analyze) {
            const StiffnessMatrix c = load_stiffness(ana_stiffness);
            AnisotropyReport r;
            r.design_name = ana_stiffness;
            r.cubic = cubic_project(c);
            r.e_gpa = modulus_axis(r.cubic);
            r.e_bar = normalized_modulus(r.e_gpa, ana_es);
            r.zener = zener(r.cubic);
            r.cls = classify(r.zener);
            r.resolution = c.info.resolution;
            r.bc_family = c.info.bc_family.empty() ? "kinematic" : c.info.bc_family;
            r.material.youngs_modulus_gpa = ana_es;
            r.asymmetry = c.asymmetry;
            const json record = report_to_json(r);
            std::printf("%s\n", record.dump(2).c_str());
            const std::string prov = provenance("analyze " + ana_stiffness +
                                                " es=" + format_g9(ana_es));
            if (!ana_json.empty()) {
                write_text(ana_json, record.dump(2) + "\n");
                write_sidecar(ana_json, prov);
            }
            if (!ana_csv.empty()) {
                write_text(ana_csv,
                           "# " + prov + "\n" + report_csv_header() + "\n" +
                               report_csv_row(r) + "\n");
                write_sidecar(ana_csv, prov);
            }
            return 0;
        }

        if (*cmd_sweep) {
            const SweepPlan plan = load_plan(swp_plan);
            const SweepResult result = run_sweep(plan, swp_workers);
            std::ifstream plan_file(swp_plan);
            std::string plan_text((std::istreambuf_iterator<char>(plan_file)),
                                  std::istreambuf_iterator<char>());
            const std::string prov = provenance("sweep " + plan_text);
            write_text(swp_out, "# " + prov + "\n" + sweep_csv(result));
            write_sidecar(swp_out, prov);
            const std::string failures_path =
                swp_failures.empty() ? swp_out + ".failures" : swp_failures;
            std::string fail_body = "# " + prov + "\n";
            for (const auto& f : result.failures) {
                for (double v : f.parameter_values) fail_body += format_g9(v) + ",";
                fail_body += "\"" + f.error + "\"\n";
            }
            write_text(failures_path, fail_body);
            std::printf("%zu rows, %zu failures -> %s\n", result.rows.size(),
                        result.failures.size(), swp_out.c_str());
            return 0;
        }

        if (*cmd_ymsurf) {
            const StiffnessMatrix c = load_stiffness(yms_stiffness);
            const CubicConstants cc = cubic_project(c);
            const TriMesh mesh = ymsurface_mesh(cc, yms_es, yms_subdiv);
            const std::string prov = provenance(
                "ymsurf " + yms_stiffness + " subdiv=" + std::to_string(yms_subdiv) +
                " es=" + format_g9(yms_es));
            export_obj(mesh, yms_out, prov + " (radii in E/E_s units)");
            write_sidecar(yms_out, prov);
            std::printf("3DYMS (%zu vertices) -> %s\n", mesh.vertices.size(),
                        yms_out.c_str());
            return 0;
        }

        if (*cmd_export) {
            const StrutModel model = load_model(stl_model);
            const TriMesh mesh = surface_mesh(model, stl_resolution, MeshMode::Capped);
            export_stl(mesh, stl_out);
            const std::string prov = provenance("export-stl " + stl_model + " n=" +
                                                std::to_string(stl_resolution));
            write_sidecar(stl_out, prov);
            std::printf("%zu triangles -> %s\n", mesh.triangles.size(), stl_out.c_str());
            return 0;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.family());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
