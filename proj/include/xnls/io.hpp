#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xnls/analysis.hpp"
#include "xnls/geometry.hpp"
#include "xnls/homogenize.hpp"
#include "xnls/voxel.hpp"

namespace xnls {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Lattice spec config.

inline json spec_to_json(const NestedLatticeSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["cell_size_mm"] = spec.cell_size_mm;
    j["spacing_mm"] = spec.spacing_mm;
    j["orientation_axis"] = axis_name(spec.orientation_axis);
    j["orders"] = json::array();
    for (const auto& o : spec.orders)
        j["orders"].push_back({{"index", o.index},
                               {"orientation_deg", o.orientation_deg},
                               {"diameter_mm", o.diameter_mm}});
    return j;
}

inline NestedLatticeSpec spec_from_json(const json& j) {
    NestedLatticeSpec spec;
    try {
        spec.name = j.value("name", "");
        spec.cell_size_mm = j.at("cell_size_mm").get<double>();
        spec.spacing_mm = j.value("spacing_mm", std::vector<double>{});
        spec.orientation_axis = axis_from_name(j.value("orientation_axis", "Z"));
        for (const auto& o : j.value("orders", json::array())) {
            NestingOrderSpec order;
            order.index = o.at("index").get<int>();
            order.orientation_deg = o.at("orientation_deg").get<double>();
            order.diameter_mm = o.at("diameter_mm").get<double>();
            spec.orders.push_back(order);
        }
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("bad spec config: ") + e.what());
    }
    spec.validate();
    return spec;
}

inline void save_spec(const NestedLatticeSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << spec_to_json(spec).dump(2) << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline NestedLatticeSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("bad spec config '") + path + "': " + e.what());
    }
    return spec_from_json(j);
}

// ---------------------------------------------------------------------------
// Strut model: line-oriented text, one segment per line
// "ax ay az bx by bz r" in mm at 9 significant digits. '#' lines are comments.

inline void save_model(const StrutModel& model, const std::string& path,
                       const std::string& provenance = "") {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    if (!provenance.empty()) out << "# " << provenance << "\n";
    out << "# cell_size_mm " << format_g9(model.cell_size_mm) << "\n";
    for (const Segment& s : model.segments)
        out << format_g9(s.a.x) << ' ' << format_g9(s.a.y) << ' ' << format_g9(s.a.z) << ' '
            << format_g9(s.b.x) << ' ' << format_g9(s.b.y) << ' ' << format_g9(s.b.z) << ' '
            << format_g9(s.radius_mm) << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline StrutModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    StrutModel model;
    std::string line;
    bool have_cell = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hdr(line.substr(1));
            std::string key;
            hdr >> key;
            if (key == "cell_size_mm") {
                hdr >> model.cell_size_mm;
                have_cell = true;
            }
            continue;
        }
        std::istringstream ls(line);
        Segment s;
        if (!(ls >> s.a.x >> s.a.y >> s.a.z >> s.b.x >> s.b.y >> s.b.z >> s.radius_mm))
            throw IoError("bad segment line in '" + path + "': " + line);
        model.segments.push_back(s);
    }
    if (!have_cell) {
        // Legacy files without the header: infer the cell from strut extents.
        double extent = 0;
        for (const Segment& s : model.segments) {
            for (int c = 0; c < 3; ++c) {
                extent = std::max(extent, std::abs(s.a[c]) + s.radius_mm);
                extent = std::max(extent, std::abs(s.b[c]) + s.radius_mm);
            }
        }
        model.cell_size_mm = 2 * extent;
    }
    if (model.cell_size_mm <= 0 && !model.segments.empty())
        throw IoError("model file '" + path + "' has no usable cell size");
    return model;
}

// ---------------------------------------------------------------------------
// Voxel grid dump: uint64 n, float64 cell size, then n^3 occupancy bytes
// (x-fastest), little-endian.

inline void save_voxels(const VoxelGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const std::uint64_t n = static_cast<std::uint64_t>(grid.resolution);
    const double cell = grid.cell_size_mm;
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&cell), 8);
    out.write(reinterpret_cast<const char*>(grid.occupancy.data()),
              static_cast<std::streamsize>(grid.occupancy.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline VoxelGrid load_voxels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::uint64_t n = 0;
    double cell = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&cell), 8);
    if (!in || n < 2 || cell <= 0) throw IoError("bad voxel dump header in '" + path + "'");
    VoxelGrid grid;
    grid.resolution = static_cast<int>(n);
    grid.cell_size_mm = cell;
    grid.occupancy.resize(n * n * n);
    in.read(reinterpret_cast<char*>(grid.occupancy.data()),
            static_cast<std::streamsize>(grid.occupancy.size()));
    if (!in) throw IoError("truncated voxel dump '" + path + "'");
    return grid;
}

// ---------------------------------------------------------------------------
// Stiffness matrix: 6 rows of 6 values (GPa, 9 significant digits), preceded
// and followed by '#' metadata lines.

inline void save_stiffness(const StiffnessMatrix& c, const std::string& path,
                           const std::string& provenance = "") {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    if (!provenance.empty()) out << "# " << provenance << "\n";
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) out << (j ? " " : "") << format_g9(c.c[i][j]);
        out << "\n";
    }
    out << "# resolution " << c.info.resolution << "\n";
    out << "# tol " << format_g9(c.info.tol) << "\n";
    out << "# strain_magnitude " << format_g9(c.info.strain_magnitude) << "\n";
    out << "# asymmetry " << format_g9(c.asymmetry) << "\n";
    out << "# bc_family " << c.info.bc_family << "\n";
    out << "# iterations";
    for (int i : c.info.iterations) out << ' ' << i;
    out << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline StiffnessMatrix load_stiffness(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    StiffnessMatrix c;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hdr(line.substr(1));
            std::string key;
            hdr >> key;
            if (key == "asymmetry") hdr >> c.asymmetry;
            if (key == "resolution") hdr >> c.info.resolution;
            if (key == "bc_family") hdr >> c.info.bc_family;
            continue;
        }
        if (row >= 6) throw IoError("too many stiffness rows in '" + path + "'");
        std::istringstream ls(line);
        for (int j = 0; j < 6; ++j)
            if (!(ls >> c.c[row][j])) throw IoError("bad stiffness row in '" + path + "'");
        ++row;
    }
    if (row != 6) throw IoError("expected 6 stiffness rows in '" + path + "', got " +
                                std::to_string(row));
    return c;
}

// ---------------------------------------------------------------------------
// AnisotropyReport as a structured JSON record.

inline json report_to_json(const AnisotropyReport& r) {
    json j;
    j["name"] = r.design_name;
    j["rho_bar"] = r.rho_bar;
    j["s_bar"] = r.s_bar;
    j["s_bar_cell"] = r.s_bar_cell;
    j["c11"] = r.cubic.c11;
    j["c12"] = r.cubic.c12;
    j["c44"] = r.cubic.c44;
    j["cubic_deviation"] = r.cubic.deviation;
    j["e_gpa"] = r.e_gpa;
    j["e_bar"] = r.e_bar;
    j["zener"] = r.zener;
    j["class"] = class_name(r.cls);
    j["run"] = {{"resolution", r.resolution},
                {"bc_family", r.bc_family},
                {"youngs_modulus_gpa", r.material.youngs_modulus_gpa},
                {"poisson_ratio", r.material.poisson_ratio},
                {"void_contrast", r.material.void_contrast},
                {"strain_magnitude", r.strain_magnitude},
                {"asymmetry", r.asymmetry}};
    return j;
}

}  // namespace xnls
