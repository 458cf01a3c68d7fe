#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "xnls/core.hpp"
#include "xnls/homogenize.hpp"
#include "xnls/mesh.hpp"

namespace xnls {

// ---------------------------------------------------------------------------
// Cubic elastic constants extracted from a full 6x6 stiffness matrix.

struct CubicConstants {
    double c11 = 0, c12 = 0, c44 = 0;  // GPa
    double deviation = 0;  // max relative departure from the cubic template
};

inline CubicConstants cubic_project(const StiffnessMatrix& c) {
    CubicConstants cc;
    cc.c11 = (c.c[0][0] + c.c[1][1] + c.c[2][2]) / 3.0;
    cc.c12 = (c.c[0][1] + c.c[0][2] + c.c[1][2]) / 3.0;
    cc.c44 = (c.c[3][3] + c.c[4][4] + c.c[5][5]) / 3.0;
    if (cc.c11 <= std::abs(cc.c12))
        throw DegenerateInput("c11 <= |c12| (" + format_g9(cc.c11) + " vs " +
                              format_g9(cc.c12) + ")");
    double dev = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            double tmpl = 0;
            if (i < 3 && j < 3) tmpl = (i == j) ? cc.c11 : cc.c12;
            else if (i == j) tmpl = cc.c44;
            dev = std::max(dev, std::abs(c.c[i][j] - tmpl));
        }
    cc.deviation = dev / cc.c11;
    return cc;
}

// Axis-aligned Young's modulus; the factored form of the cubic identity.
inline double modulus_axis(const CubicConstants& cc) {
    if (cc.c11 <= std::abs(cc.c12)) throw DegenerateInput("c11 <= |c12|");
    return (cc.c11 - cc.c12) * (cc.c11 + 2 * cc.c12) / (cc.c11 + cc.c12);
}

inline double zener(const CubicConstants& cc) {
    if (cc.c11 == cc.c12) throw DegenerateInput("c11 == c12, Zener ratio undefined");
    return cc.c44 / ((cc.c11 - cc.c12) / 2.0);
}

inline double normalized_modulus(double e_gpa, double e_s_gpa) {
    if (e_s_gpa <= 0) throw InvalidSpec("base material modulus must be > 0");
    return e_gpa / e_s_gpa;
}

// Anisotropy classes by Zener ratio band. Band endpoints land on NeoIsotropic:
// the perfectly-isotropic band is open, the neo bands are closed.
enum class AnisotropyClass { TCD, NeoIsotropic, PerfectlyIsotropic, SD };

inline AnisotropyClass classify(double z) {
    if (z > 0.950 && z < 1.050) return AnisotropyClass::PerfectlyIsotropic;
    if ((z >= 0.900 && z <= 0.950) || (z >= 1.050 && z <= 1.100))
        return AnisotropyClass::NeoIsotropic;
    return z < 0.900 ? AnisotropyClass::TCD : AnisotropyClass::SD;
}

inline const char* class_name(AnisotropyClass c) {
    switch (c) {
        case AnisotropyClass::TCD: return "TCD";
        case AnisotropyClass::NeoIsotropic: return "NeoIsotropic";
        case AnisotropyClass::PerfectlyIsotropic: return "PerfectlyIsotropic";
        default: return "SD";
    }
}

// ---------------------------------------------------------------------------
// Cubic compliance and the directional Young's modulus surface.

struct CubicCompliance {
    double s11 = 0, s12 = 0, s44 = 0;  // 1/GPa
};

inline CubicCompliance compliance(const CubicConstants& cc) {
    const double d = (cc.c11 - cc.c12) * (cc.c11 + 2 * cc.c12);
    if (d == 0 || cc.c44 == 0)
        throw DegenerateInput("singular cubic stiffness, cannot invert");
    return {(cc.c11 + cc.c12) / d, -cc.c12 / d, 1.0 / cc.c44};
}

inline double directional_modulus(const CubicCompliance& s, Vec3 n) {
    const double len = norm(n);
    if (std::abs(len - 1.0) > 1e-9) throw InvalidSpec("direction must be a unit vector");
    const double cross_term =
        n.x * n.x * n.y * n.y + n.y * n.y * n.z * n.z + n.z * n.z * n.x * n.x;
    const double inv_e = s.s11 - 2 * (s.s11 - s.s12 - s.s44 / 2.0) * cross_term;
    if (inv_e <= 0) throw DegenerateInput("non-positive directional compliance");
    return 1.0 / inv_e;
}

namespace detail {

// Unit icosahedron (12 vertices, 20 faces), outward winding.
inline TriMesh icosahedron() {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh m;
    const double raw[12][3] = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                               {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                               {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (const auto& v : raw) m.vertices.push_back(normalized({v[0], v[1], v[2]}));
    const int faces[20][3] = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                              {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                              {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                              {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (const auto& f : faces) m.triangles.push_back({f[0], f[1], f[2]});
    m.watertight = true;
    return m;
}

inline TriMesh subdivide_on_sphere(const TriMesh& in) {
    TriMesh out;
    out.vertices = in.vertices;
    out.watertight = true;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it == midpoint.end()) {
            const Vec3 m = normalized(0.5 * (out.vertices[a] + out.vertices[b]));
            it = midpoint.emplace(key, static_cast<int>(out.vertices.size())).first;
            out.vertices.push_back(m);
        }
        return it->second;
    };
    for (const auto& t : in.triangles) {
        const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
        out.triangles.push_back({t[0], ab, ca});
        out.triangles.push_back({t[1], bc, ab});
        out.triangles.push_back({t[2], ca, bc});
        out.triangles.push_back({ab, bc, ca});
    }
    return out;
}

}  // namespace detail

// Directional Young's modulus surface: an icosphere whose vertex at direction
// n sits at radius E(n)/E_s. Subdivision level s gives 20*4^s triangles.
inline TriMesh ymsurface_mesh(const CubicConstants& cc, double e_s_gpa, int subdivisions) {
    if (subdivisions < 0) throw InvalidSpec("subdivisions must be >= 0");
    if (e_s_gpa <= 0) throw InvalidSpec("base material modulus must be > 0");
    const CubicCompliance s = compliance(cc);
    TriMesh mesh = detail::icosahedron();
    for (int i = 0; i < subdivisions; ++i) mesh = detail::subdivide_on_sphere(mesh);
    for (Vec3& v : mesh.vertices) {
        const double radius = directional_modulus(s, normalized(v)) / e_s_gpa;
        v = radius * normalized(v);
    }
    return mesh;
}

// ---------------------------------------------------------------------------
// Trend fits.

struct FitResult {
    std::vector<double> coefficients;  // polynomial: highest degree first
    double r_squared = 0;
};

// Least squares polynomial of degree 2 or 3; exact interpolation (R^2 = 1)
// when the point count equals degree+1.
inline FitResult fit_polynomial(const std::vector<double>& xs, const std::vector<double>& ys,
                                int degree) {
    if (degree != 2 && degree != 3) throw InvalidSpec("degree must be 2 or 3");
    const int m = degree + 1;
    const int npts = static_cast<int>(xs.size());
    if (npts < m || ys.size() != xs.size())
        throw InvalidSpec("need at least degree+1 (x, y) points");

    // Normal equations A^T A c = A^T y for the Vandermonde system.
    std::vector<std::vector<double>> ata(m, std::vector<double>(m, 0.0));
    std::vector<double> aty(m, 0.0);
    for (int p = 0; p < npts; ++p) {
        std::vector<double> row(m);
        double v = 1.0;
        for (int j = m - 1; j >= 0; --j) {
            row[j] = v;
            v *= xs[p];
        }
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) ata[i][j] += row[i] * row[j];
            aty[i] += row[i] * ys[p];
        }
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(ata[r][col]) > std::abs(ata[pivot][col])) pivot = r;
        if (std::abs(ata[pivot][col]) < 1e-12 * (std::abs(ata[col][col]) + 1))
            throw SingularFit("rank-deficient polynomial fit");
        std::swap(ata[col], ata[pivot]);
        std::swap(aty[col], aty[pivot]);
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = ata[r][col] / ata[col][col];
            for (int c2 = col; c2 < m; ++c2) ata[r][c2] -= f * ata[col][c2];
            aty[r] -= f * aty[col];
        }
    }
    FitResult fit;
    fit.coefficients.resize(m);
    for (int i = 0; i < m; ++i) fit.coefficients[i] = aty[i] / ata[i][i];
    for (double c : fit.coefficients)
        if (!std::isfinite(c)) throw SingularFit("non-finite fit coefficients");

    double mean = 0;
    for (double y : ys) mean += y;
    mean /= npts;
    double ss_res = 0, ss_tot = 0;
    for (int p = 0; p < npts; ++p) {
        double pred = 0;
        for (double c : fit.coefficients) pred = pred * xs[p] + c;
        ss_res += (ys[p] - pred) * (ys[p] - pred);
        ss_tot += (ys[p] - mean) * (ys[p] - mean);
    }
    // Zero total variance (constant data): R^2 = 1 by convention.
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

// Gibson-Ashby power law e_bar = c * rho_bar^n fitted in log-log space.
// coefficients = {c, n}; R^2 is reported in log space.
inline FitResult fit_power_law(const std::vector<double>& rho_bars,
                               const std::vector<double>& e_bars) {
    const int npts = static_cast<int>(rho_bars.size());
    if (npts < 2 || e_bars.size() != rho_bars.size())
        throw InvalidSpec("need at least 2 (rho, e) points");
    std::vector<double> lx(npts), ly(npts);
    for (int i = 0; i < npts; ++i) {
        if (rho_bars[i] <= 0 || e_bars[i] <= 0)
            throw NonPositiveData("power-law fit requires positive data");
        lx[i] = std::log(rho_bars[i]);
        ly[i] = std::log(e_bars[i]);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < npts; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double det = npts * sxx - sx * sx;
    if (det == 0) throw SingularFit("all abscissae equal in power-law fit");
    const double slope = (npts * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / npts;

    FitResult fit;
    fit.coefficients = {std::exp(intercept), slope};
    double mean = sy / npts, ss_res = 0, ss_tot = 0;
    for (int i = 0; i < npts; ++i) {
        const double pred = intercept + slope * lx[i];
        ss_res += (ly[i] - pred) * (ly[i] - pred);
        ss_tot += (ly[i] - mean) * (ly[i] - mean);
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

// ---------------------------------------------------------------------------
// Per-design results record.

struct AnisotropyReport {
    std::string design_name;
    CubicConstants cubic;
    double e_gpa = 0;
    double e_bar = 0;
    double zener = 0;
    AnisotropyClass cls = AnisotropyClass::TCD;
    double rho_bar = 0;
    double s_bar = 0;             // area / solid volume, mm^-1
    double s_bar_cell = 0;        // secondary: area / cell volume, mm^-1
    // Run provenance.
    int resolution = 0;
    std::string bc_family = "kinematic";
    MaterialSpec material;
    double strain_magnitude = 0.001;
    double asymmetry = 0;
};

inline std::string report_csv_header() {
    return "name,n,rho_bar,s_bar,c11,c12,c44,e_gpa,e_bar,zener,class,bc_family";
}

inline std::string report_csv_row(const AnisotropyReport& r) {
    std::string row = r.design_name;
    auto add = [&](const std::string& s) { row += "," + s; };
    add(std::to_string(r.resolution));
    add(format_g9(r.rho_bar));
    add(format_g9(r.s_bar));
    add(format_g9(r.cubic.c11));
    add(format_g9(r.cubic.c12));
    add(format_g9(r.cubic.c44));
    add(format_g9(r.e_gpa));
    add(format_g9(r.e_bar));
    add(format_g9(r.zener));
    add(class_name(r.cls));
    add(r.bc_family);
    return row;
}

}  // namespace xnls
