#pragma once

#include <array>
#include <cmath>

#include "xnls/core.hpp"

namespace xnls {

struct MaterialSpec {
    double youngs_modulus_gpa = 193.0;
    double poisson_ratio = 0.28;
    double void_contrast = 1e-6;  // ersatz modulus ratio assigned to void voxels

    void validate() const {
        if (youngs_modulus_gpa <= 0) throw InvalidSpec("Young's modulus must be > 0");
        if (poisson_ratio <= -1.0 || poisson_ratio >= 0.5)
            throw InvalidSpec("Poisson ratio must lie in (-1, 0.5)");
        if (void_contrast <= 0 || void_contrast > 1e-3)
            throw InvalidSpec("void_contrast must lie in (0, 1e-3]");
    }
};

struct LameParameters {
    double lambda_gpa = 0;
    double mu_gpa = 0;
};

inline LameParameters lame_parameters(const MaterialSpec& mat) {
    mat.validate();
    const double e = mat.youngs_modulus_gpa, nu = mat.poisson_ratio;
    return {e * nu / ((1 + nu) * (1 - 2 * nu)), e / (2 * (1 + nu))};
}

// Isotropic constitutive matrix, Voigt order (11,22,33,23,31,12) with
// engineering shear strains.
inline std::array<double, 36> isotropic_constitutive(double lambda, double mu) {
    std::array<double, 36> d{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) d[6 * i + j] = lambda;
        d[6 * i + i] = lambda + 2 * mu;
        d[6 * (i + 3) + (i + 3)] = mu;
    }
    return d;
}

using ElementMatrix = std::array<double, 24 * 24>;

namespace detail {

// Shape function gradients of the trilinear hex at (x,y,z) in [0,h]^3,
// local node l = li + 2*lj + 4*lk at (li*h, lj*h, lk*h).
inline void hex_gradients(double x, double y, double z, double h, double grad[8][3]) {
    const double xr = x / h, yr = y / h, zr = z / h;
    for (int l = 0; l < 8; ++l) {
        const int li = l & 1, lj = (l >> 1) & 1, lk = (l >> 2) & 1;
        const double fx = li ? xr : 1 - xr;
        const double fy = lj ? yr : 1 - yr;
        const double fz = lk ? zr : 1 - zr;
        const double dx = (li ? 1.0 : -1.0) / h;
        const double dy = (lj ? 1.0 : -1.0) / h;
        const double dz = (lk ? 1.0 : -1.0) / h;
        grad[l][0] = dx * fy * fz;
        grad[l][1] = fx * dy * fz;
        grad[l][2] = fx * fy * dz;
    }
}

inline void strain_matrix(const double grad[8][3], double b[6][24]) {
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 24; ++j) b[i][j] = 0;
    for (int l = 0; l < 8; ++l) {
        const double bx = grad[l][0], by = grad[l][1], bz = grad[l][2];
        b[0][3 * l + 0] = bx;
        b[1][3 * l + 1] = by;
        b[2][3 * l + 2] = bz;
        b[3][3 * l + 1] = bz;
        b[3][3 * l + 2] = by;
        b[4][3 * l + 0] = bz;
        b[4][3 * l + 2] = bx;
        b[5][3 * l + 0] = by;
        b[5][3 * l + 1] = bx;
    }
}

}  // namespace detail

// 2x2x2 Gauss integration of B^T D B over the cube element; exact for the
// trilinear integrand. K scales as h * K(h=1).
inline ElementMatrix hex_element_stiffness(double lambda, double mu, double voxel_pitch) {
    if (voxel_pitch <= 0) throw InvalidSpec("voxel pitch must be > 0");
    const double h = voxel_pitch;
    const auto d = isotropic_constitutive(lambda, mu);
    ElementMatrix k{};
    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    const double weight = h * h * h / 8.0;
    double grad[8][3], b[6][24], db[6][24];
    for (int gx = 0; gx < 2; ++gx)
        for (int gy = 0; gy < 2; ++gy)
            for (int gz = 0; gz < 2; ++gz) {
                detail::hex_gradients(gp[gx] * h, gp[gy] * h, gp[gz] * h, h, grad);
                detail::strain_matrix(grad, b);
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 24; ++j) {
                        double s = 0;
                        for (int m = 0; m < 6; ++m) s += d[6 * i + m] * b[m][j];
                        db[i][j] = s;
                    }
                for (int i = 0; i < 24; ++i)
                    for (int j = 0; j < 24; ++j) {
                        double s = 0;
                        for (int m = 0; m < 6; ++m) s += b[m][i] * db[m][j];
                        k[24 * i + j] += weight * s;
                    }
            }
    return k;
}

}  // namespace xnls
