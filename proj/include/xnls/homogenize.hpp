#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xnls/core.hpp"
#include "xnls/elasticity.hpp"
#include "xnls/voxel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace xnls {

// Voigt load cases, order (11, 22, 33, 23, 31, 12). Shear cases prescribe the
// engineering shear gamma = strain_magnitude, realized as u_i = (gamma/2) x_j
// plus its transpose on the four in-plane faces.
struct LoadCase {
    int case_index = 1;  // 1..6
    double strain_magnitude = 0.001;

    void validate() const {
        if (case_index < 1 || case_index > 6) throw InvalidSpec("case_index must be 1..6");
        if (strain_magnitude <= 0) throw InvalidSpec("strain_magnitude must be > 0");
    }
    bool is_shear() const { return case_index >= 4; }
    // Shear index pairs: case 4 -> (y,z), 5 -> (z,x), 6 -> (x,y).
    std::array<int, 2> shear_axes() const {
        switch (case_index) {
            case 4: return {1, 2};
            case 5: return {2, 0};
            default: return {0, 1};
        }
    }
};

struct BoundaryConstraints {
    std::vector<std::uint8_t> fixed;  // per DOF
    std::vector<double> value;        // prescribed value where fixed
    std::size_t count = 0;
};

struct DisplacementField {
    int resolution = 0;
    std::vector<double> values;  // 3 per node, node = i + (n+1)*(j + (n+1)*k)
    double converged_residual = 0;
    int iterations = 0;
};

struct StiffnessMatrix {
    std::array<std::array<double, 6>, 6> c{};  // GPa, Voigt (11,22,33,23,31,12)
    double asymmetry = 0;                      // max |c_ij - c_ji| / c11, pre-symmetrization

    struct RunInfo {
        int resolution = 0;
        double tol = 0;
        double strain_magnitude = 0;
        std::array<int, 6> iterations{};
        std::array<double, 6> residuals{};
        std::string bc_family = "kinematic";
    } info;
};

namespace detail {

inline std::size_t node_count(int n) {
    const std::size_t nn = static_cast<std::size_t>(n) + 1;
    return nn * nn * nn;
}

// Kinematic uniform boundary conditions (Eqs. of the uniform-strain scheme):
// only the named displacement component is pinned on each face; tangential
// components stay free so the homogeneous field remains an exact solution.
inline BoundaryConstraints load_case_constraints_impl(const LoadCase& load,
                                                      const VoxelGrid& grid) {
    load.validate();
    const int n = grid.resolution;
    const int nn = n + 1;
    const double L = grid.cell_size_mm;
    BoundaryConstraints bc;
    bc.fixed.assign(3 * node_count(n), 0);
    bc.value.assign(3 * node_count(n), 0.0);

    auto fix = [&](std::size_t node, int comp, double v) {
        const std::size_t dof = 3 * node + comp;
        if (!bc.fixed[dof]) ++bc.count;
        bc.fixed[dof] = 1;
        bc.value[dof] = v;
    };

    for (int k = 0; k < nn; ++k)
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < nn; ++i) {
                const int idx[3] = {i, j, k};
                const std::size_t node =
                    static_cast<std::size_t>(i) +
                    static_cast<std::size_t>(nn) *
                        (static_cast<std::size_t>(j) + static_cast<std::size_t>(nn) * k);
                if (!load.is_shear()) {
                    const int a = load.case_index - 1;
                    for (int c = 0; c < 3; ++c) {
                        if (idx[c] == 0) fix(node, c, 0.0);
                        if (idx[c] == n)
                            fix(node, c, c == a ? load.strain_magnitude * L : 0.0);
                    }
                } else {
                    const auto [p, q] = load.shear_axes();
                    const int m = 3 - p - q;
                    const double half_gamma = load.strain_magnitude / 2.0;
                    if (idx[q] == 0) fix(node, p, 0.0);
                    if (idx[q] == n) fix(node, p, half_gamma * L);
                    if (idx[p] == 0) fix(node, q, 0.0);
                    if (idx[p] == n) fix(node, q, half_gamma * L);
                    if (idx[m] == 0) fix(node, m, 0.0);
                    if (idx[m] == n) fix(node, m, 0.0);
                }
            }
    return bc;
}

// Exact solution of the load case for a homogeneous cell; used as the initial
// guess (it already satisfies every constraint).
inline std::vector<double> homogeneous_field(const LoadCase& load, const VoxelGrid& grid) {
    const int n = grid.resolution;
    const int nn = n + 1;
    const double pitch = grid.pitch();
    std::vector<double> u(3 * node_count(n), 0.0);
    for (int k = 0; k < nn; ++k)
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < nn; ++i) {
                const double coord[3] = {i * pitch, j * pitch, k * pitch};
                const std::size_t node =
                    static_cast<std::size_t>(i) +
                    static_cast<std::size_t>(nn) *
                        (static_cast<std::size_t>(j) + static_cast<std::size_t>(nn) * k);
                if (!load.is_shear()) {
                    const int a = load.case_index - 1;
                    u[3 * node + a] = load.strain_magnitude * coord[a];
                } else {
                    const auto [p, q] = load.shear_axes();
                    const double half_gamma = load.strain_magnitude / 2.0;
                    u[3 * node + p] = half_gamma * coord[q];
                    u[3 * node + q] = half_gamma * coord[p];
                }
            }
    return u;
}

// Matrix-free operator for the voxel grid: one shared element stiffness, a
// scalar modulus multiplier per voxel. Element matvecs run color-by-color
// (8 parity classes share no nodes) so accumulation order is fixed and
// results do not depend on thread count.
class GridOperator {
  public:
    GridOperator(const VoxelGrid& grid, const MaterialSpec& mat)
        : grid_(grid), n_(grid.resolution) {
        const auto lame = lame_parameters(MaterialSpec{1.0, mat.poisson_ratio, 1e-3});
        ke_ = hex_element_stiffness(lame.lambda_gpa, lame.mu_gpa, grid.pitch());
        solid_scale_ = mat.youngs_modulus_gpa;
        void_scale_ = mat.youngs_modulus_gpa * mat.void_contrast;
        const std::size_t nn = static_cast<std::size_t>(n_) + 1;
        for (int l = 0; l < 8; ++l) {
            const std::size_t li = l & 1, lj = (l >> 1) & 1, lk = (l >> 2) & 1;
            node_offset_[l] = li + nn * (lj + nn * lk);
        }
    }

    std::size_t dof_count() const { return 3 * node_count(n_); }
    double element_scale(std::size_t e) const {
        return grid_.occupancy[e] ? solid_scale_ : void_scale_;
    }
    const ElementMatrix& element_stiffness() const { return ke_; }

    // y = K x
    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        std::fill(y.begin(), y.end(), 0.0);
        const int n = n_;
        const std::size_t nn = static_cast<std::size_t>(n) + 1;
        for (int color = 0; color < 8; ++color) {
            const int ci = color & 1, cj = (color >> 1) & 1, ck = (color >> 2) & 1;
#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(static)
#endif
            for (int k = ck; k < n; k += 2)
                for (int j = cj; j < n; j += 2)
                    for (int i = ci; i < n; i += 2) {
                        const std::size_t e = grid_.index(i, j, k);
                        const double scale = element_scale(e);
                        const std::size_t base =
                            static_cast<std::size_t>(i) +
                            nn * (static_cast<std::size_t>(j) + nn * k);
                        double ue[24], ye[24];
                        for (int l = 0; l < 8; ++l) {
                            const std::size_t d = 3 * (base + node_offset_[l]);
                            ue[3 * l] = x[d];
                            ue[3 * l + 1] = x[d + 1];
                            ue[3 * l + 2] = x[d + 2];
                        }
                        for (int r = 0; r < 24; ++r) {
                            const double* row = ke_.data() + 24 * r;
                            double s = 0;
                            for (int c = 0; c < 24; ++c) s += row[c] * ue[c];
                            ye[r] = scale * s;
                        }
                        for (int l = 0; l < 8; ++l) {
                            const std::size_t d = 3 * (base + node_offset_[l]);
                            y[d] += ye[3 * l];
                            y[d + 1] += ye[3 * l + 1];
                            y[d + 2] += ye[3 * l + 2];
                        }
                    }
        }
    }

    std::vector<double> diagonal() const {
        std::vector<double> diag(dof_count(), 0.0);
        const int n = n_;
        const std::size_t nn = static_cast<std::size_t>(n) + 1;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const std::size_t e = grid_.index(i, j, k);
                    const double scale = element_scale(e);
                    const std::size_t base =
                        static_cast<std::size_t>(i) + nn * (static_cast<std::size_t>(j) + nn * k);
                    for (int l = 0; l < 8; ++l) {
                        const std::size_t d = 3 * (base + node_offset_[l]);
                        for (int c = 0; c < 3; ++c)
                            diag[d + c] += scale * ke_[24 * (3 * l + c) + (3 * l + c)];
                    }
                }
        return diag;
    }

  private:
    const VoxelGrid& grid_;
    int n_;
    ElementMatrix ke_;
    double solid_scale_ = 1, void_scale_ = 1;
    std::array<std::size_t, 8> node_offset_{};
};

inline double dot_all(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

inline BoundaryConstraints load_case_constraints(const LoadCase& load, const VoxelGrid& grid) {
    return detail::load_case_constraints_impl(load, grid);
}

// Preconditioned conjugate gradients on the free DOFs, constraints imposed by
// elimination. The homogeneous macro-strain field is the starting point, so
// for a homogeneous cell the solver returns it untouched.
inline DisplacementField solve_case(const VoxelGrid& grid, const MaterialSpec& mat,
                                    const LoadCase& load, double tol = 1e-8,
                                    long max_iters = -1) {
    mat.validate();
    load.validate();
    if (grid.solid_count() == 0) throw NoSolid("voxel grid is entirely void");
    if (max_iters < 0)
        max_iters = 10L * grid.resolution * grid.resolution * grid.resolution;

    const detail::GridOperator op(grid, mat);
    const BoundaryConstraints bc = load_case_constraints(load, grid);
    const std::size_t ndof = op.dof_count();

    std::vector<double> u = detail::homogeneous_field(load, grid);
    std::vector<double> r(ndof), z(ndof), p(ndof), ap(ndof);

    // r = -K u on free DOFs (the homogeneous field satisfies the constraints).
    op.apply(u, r);
    for (std::size_t d = 0; d < ndof; ++d) r[d] = bc.fixed[d] ? 0.0 : -r[d];

    std::vector<double> inv_diag = op.diagonal();
    for (std::size_t d = 0; d < ndof; ++d)
        inv_diag[d] = bc.fixed[d] ? 0.0 : 1.0 / inv_diag[d];

    // Reference norm: RHS of the eliminated system, -K u_c restricted to free.
    double rhs_norm;
    {
        std::vector<double> uc(ndof, 0.0);
        for (std::size_t d = 0; d < ndof; ++d)
            if (bc.fixed[d]) uc[d] = bc.value[d];
        op.apply(uc, ap);
        double s = 0;
        for (std::size_t d = 0; d < ndof; ++d)
            if (!bc.fixed[d]) s += ap[d] * ap[d];
        rhs_norm = std::sqrt(s);
    }
    const double denom = std::max(rhs_norm, 1e-300);

    DisplacementField field;
    field.resolution = grid.resolution;
    field.iterations = 0;

    double rz = 0;
    for (std::size_t d = 0; d < ndof; ++d) {
        z[d] = inv_diag[d] * r[d];
        rz += r[d] * z[d];
    }
    double rnorm = std::sqrt(detail::dot_all(r, r));
    p = z;

    while (rnorm / denom > tol && field.iterations < max_iters) {
        op.apply(p, ap);
        for (std::size_t d = 0; d < ndof; ++d)
            if (bc.fixed[d]) ap[d] = 0.0;
        const double pap = detail::dot_all(p, ap);
        if (pap <= 0) break;  // numerically exhausted
        const double alpha = rz / pap;
        for (std::size_t d = 0; d < ndof; ++d) {
            u[d] += alpha * p[d];
            r[d] -= alpha * ap[d];
        }
        double rz_new = 0;
        for (std::size_t d = 0; d < ndof; ++d) {
            z[d] = inv_diag[d] * r[d];
            rz_new += r[d] * z[d];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t d = 0; d < ndof; ++d) p[d] = z[d] + beta * p[d];
        rnorm = std::sqrt(detail::dot_all(r, r));
        ++field.iterations;
    }

    field.converged_residual = rnorm / denom;
    if (field.converged_residual > tol)
        throw NotConverged("PCG residual " + format_g9(field.converged_residual) + " after " +
                           std::to_string(field.iterations) + " iterations");
    field.values = std::move(u);
    return field;
}

// Volume average of stress over the whole cell, ersatz-void elements included.
inline std::array<double, 6> average_stress(const VoxelGrid& grid, const MaterialSpec& mat,
                                            const DisplacementField& field) {
    const int n = grid.resolution;
    const std::size_t nn = static_cast<std::size_t>(n) + 1;
    const double h = grid.pitch();
    const auto lame = lame_parameters(mat);
    const auto d_solid = isotropic_constitutive(lame.lambda_gpa, lame.mu_gpa);

    // Element-average strain equals the strain at the element center for
    // trilinear interpolation.
    double grad[8][3], b[6][24];
    detail::hex_gradients(h / 2, h / 2, h / 2, h, grad);
    detail::strain_matrix(grad, b);

    std::size_t offset[8];
    for (int l = 0; l < 8; ++l) {
        const std::size_t li = l & 1, lj = (l >> 1) & 1, lk = (l >> 2) & 1;
        offset[l] = li + nn * (lj + nn * lk);
    }

    std::array<double, 6> sigma{};
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double scale =
                    grid.solid(i, j, k) ? 1.0 : mat.void_contrast;
                const std::size_t base =
                    static_cast<std::size_t>(i) + nn * (static_cast<std::size_t>(j) + nn * k);
                double ue[24];
                for (int l = 0; l < 8; ++l) {
                    const std::size_t dof = 3 * (base + offset[l]);
                    ue[3 * l] = field.values[dof];
                    ue[3 * l + 1] = field.values[dof + 1];
                    ue[3 * l + 2] = field.values[dof + 2];
                }
                double eps[6];
                for (int rr = 0; rr < 6; ++rr) {
                    double s = 0;
                    for (int c = 0; c < 24; ++c) s += b[rr][c] * ue[c];
                    eps[rr] = s;
                }
                for (int rr = 0; rr < 6; ++rr) {
                    double s = 0;
                    for (int c = 0; c < 6; ++c) s += d_solid[6 * rr + c] * eps[c];
                    sigma[rr] += scale * s;
                }
            }
    const double volume_fraction = 1.0 / (static_cast<double>(n) * n * n);
    for (double& s : sigma) s *= volume_fraction;
    return sigma;
}

// Six prescribed-strain solves; column j of C is the volume-averaged stress of
// case j divided by the applied strain magnitude.
inline StiffnessMatrix homogenize(const VoxelGrid& grid, const MaterialSpec& mat,
                                  double strain_magnitude = 0.001, double tol = 1e-8,
                                  long max_iters = -1) {
    if (grid.solid_count() == 0) throw NoSolid("voxel grid is entirely void");
    StiffnessMatrix result;
    result.info.resolution = grid.resolution;
    result.info.tol = tol;
    result.info.strain_magnitude = strain_magnitude;
    for (int j = 0; j < 6; ++j) {
        const LoadCase load{j + 1, strain_magnitude};
        const DisplacementField field = solve_case(grid, mat, load, tol, max_iters);
        const auto sigma = average_stress(grid, mat, field);
        for (int i = 0; i < 6; ++i) result.c[i][j] = sigma[i] / strain_magnitude;
        result.info.iterations[j] = field.iterations;
        result.info.residuals[j] = field.converged_residual;
    }
    double asym = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            asym = std::max(asym, std::abs(result.c[i][j] - result.c[j][i]));
    result.asymmetry = result.c[0][0] != 0 ? asym / std::abs(result.c[0][0]) : asym;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const double avg = 0.5 * (result.c[i][j] + result.c[j][i]);
            result.c[i][j] = result.c[j][i] = avg;
        }
    return result;
}

}  // namespace xnls
