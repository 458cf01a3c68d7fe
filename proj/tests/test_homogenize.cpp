#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "xnls/homogenize.hpp"
#include "xnls/sweep.hpp"

using namespace xnls;
using Catch::Approx;

namespace reference {
#include "hex_reference.inc"
}

namespace {

VoxelGrid uniform_grid(int n, double cell, bool solid) {
    VoxelGrid g;
    g.resolution = n;
    g.cell_size_mm = cell;
    g.occupancy.assign(static_cast<std::size_t>(n) * n * n, solid ? 1 : 0);
    return g;
}

// Left half solid, right half void, layered normal to x.
VoxelGrid laminate_grid(int n, double cell) {
    VoxelGrid g = uniform_grid(n, cell, false);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n / 2; ++i) g.occupancy[g.index(i, j, k)] = 1;
    return g;
}

VoxelGrid random_grid(int n, double cell, unsigned seed, double fill = 0.5) {
    VoxelGrid g = uniform_grid(n, cell, false);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : g.occupancy) v = u(rng) < fill ? 1 : 0;
    if (g.solid_count() == 0) g.occupancy[0] = 1;
    return g;
}

}  // namespace

TEST_CASE("Lame parameters from engineering constants") {
    const auto steel = lame_parameters({193.0, 0.28, 1e-6});
    CHECK(steel.lambda_gpa == Approx(95.95).margin(0.01));
    CHECK(steel.mu_gpa == Approx(75.39).margin(0.01));

    const auto nu0 = lame_parameters({1.0, 0.0, 1e-6});
    CHECK(nu0.lambda_gpa == Approx(0.0).margin(1e-15));
    CHECK(nu0.mu_gpa == Approx(0.5));

    const auto soft = lame_parameters({2.6, 0.3, 1e-6});
    CHECK(soft.lambda_gpa == Approx(1.5));
    CHECK(soft.mu_gpa == Approx(1.0));

    CHECK_THROWS_AS(lame_parameters({0.0, 0.3, 1e-6}), InvalidSpec);
    CHECK_THROWS_AS(lame_parameters({1.0, 0.5, 1e-6}), InvalidSpec);
    CHECK_THROWS_AS(lame_parameters({1.0, 0.3, 0.1}), InvalidSpec);
}

TEST_CASE("hex element stiffness matches the symbolic reference") {
    // K(lam, mu, h=1) decomposes as lam*KL + mu*KM; both parts were integrated
    // symbolically (exact rationals) ahead of the implementation.
    const auto k_mu = hex_element_stiffness(0.0, 1.0, 1.0);
    const auto k_lam = hex_element_stiffness(1.0, 0.0, 1.0);
    for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 24; ++j) {
            CHECK(k_mu[24 * i + j] ==
                  Approx(reference::kHexMuRef[i][j]).margin(1e-10));
            CHECK(k_lam[24 * i + j] ==
                  Approx(reference::kHexLambdaRef[i][j]).margin(1e-10));
        }
}

TEST_CASE("hex element stiffness is symmetric with six rigid modes") {
    const auto k = hex_element_stiffness(95.95, 75.39, 0.1367);
    double maxabs = 0;
    for (double v : k) maxabs = std::max(maxabs, std::abs(v));
    for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 24; ++j)
            CHECK(std::abs(k[24 * i + j] - k[24 * j + i]) <= 1e-12 * maxabs);

    // Rigid translations and infinitesimal rotations carry zero force.
    std::vector<std::array<double, 24>> rigid;
    for (int c = 0; c < 3; ++c) {
        std::array<double, 24> t{};
        for (int l = 0; l < 8; ++l) t[3 * l + c] = 1.0;
        rigid.push_back(t);
    }
    for (int axis = 0; axis < 3; ++axis) {
        std::array<double, 24> w{};
        for (int l = 0; l < 8; ++l) {
            const Vec3 p{static_cast<double>(l & 1), static_cast<double>((l >> 1) & 1),
                         static_cast<double>((l >> 2) & 1)};
            Vec3 omega{0, 0, 0};
            omega[axis] = 1.0;
            const Vec3 v = cross(omega, p);
            w[3 * l] = v.x;
            w[3 * l + 1] = v.y;
            w[3 * l + 2] = v.z;
        }
        rigid.push_back(w);
    }
    for (const auto& mode : rigid)
        for (int i = 0; i < 24; ++i) {
            double f = 0;
            for (int j = 0; j < 24; ++j) f += k[24 * i + j] * mode[j];
            CHECK(std::abs(f) <= 1e-9 * maxabs);
        }

    std::vector<double> kvec(k.begin(), k.end());
    const auto eig = xnls_test::symmetric_eigenvalues(kvec, 24);
    const double scale = eig.back();
    for (int i = 0; i < 6; ++i) CHECK(std::abs(eig[i]) <= 1e-9 * scale);
    CHECK(eig[6] > 1e-6 * scale);
}

TEST_CASE("hex element stiffness scales linearly with pitch") {
    const auto k1 = hex_element_stiffness(1.5, 1.0, 1.0);
    const auto kh = hex_element_stiffness(1.5, 1.0, 0.25);
    for (int i = 0; i < 576; ++i) CHECK(kh[i] == Approx(0.25 * k1[i]).epsilon(1e-12));
}

TEST_CASE("load case constraints follow the kinematic scheme") {
    const auto grid = uniform_grid(2, 10.0, true);

    SECTION("normal case pins face-normal components") {
        const auto bc = load_case_constraints({1, 0.001}, grid);
        CHECK(bc.count == 6 * 3 * 3);
        int at_zero = 0, at_l = 0;
        const int nn = 3;
        for (int k = 0; k < nn; ++k)
            for (int j = 0; j < nn; ++j)
                for (int i = 0; i < nn; ++i) {
                    const std::size_t node = i + nn * (j + nn * k);
                    const std::size_t dof_x = 3 * node;
                    if (i == 0 && bc.fixed[dof_x]) {
                        CHECK(bc.value[dof_x] == 0.0);
                        ++at_zero;
                    }
                    if (i == 2 && bc.fixed[dof_x]) {
                        CHECK(bc.value[dof_x] == Approx(0.001 * 10.0));
                        ++at_l;
                    }
                }
        CHECK(at_zero == 9);
        CHECK(at_l == 9);
    }

    SECTION("shear case 12 loads the x and y faces") {
        const auto bc = load_case_constraints({6, 0.001}, grid);
        CHECK(bc.count == 6 * 3 * 3);
        const int nn = 3;
        for (int k = 0; k < nn; ++k)
            for (int j = 0; j < nn; ++j)
                for (int i = 0; i < nn; ++i) {
                    const std::size_t node = i + nn * (j + nn * k);
                    if (j == 2) {  // face y = L carries u_x = 0.0005 L
                        REQUIRE(bc.fixed[3 * node]);
                        CHECK(bc.value[3 * node] == Approx(0.0005 * 10.0));
                    }
                    if (i == 2) {  // face x = L carries u_y = 0.0005 L
                        REQUIRE(bc.fixed[3 * node + 1]);
                        CHECK(bc.value[3 * node + 1] == Approx(0.0005 * 10.0));
                    }
                    if (k == 0 || k == 2) {
                        REQUIRE(bc.fixed[3 * node + 2]);
                        CHECK(bc.value[3 * node + 2] == 0.0);
                    }
                }
    }

    SECTION("constraint counts are deterministic in n") {
        for (int n : {2, 4, 7})
            for (int c = 1; c <= 6; ++c) {
                const auto g = uniform_grid(n, 8.75, true);
                CHECK(load_case_constraints({c, 0.001}, g).count ==
                      static_cast<std::size_t>(6 * (n + 1) * (n + 1)));
            }
    }
}

TEST_CASE("solve_case reproduces homogeneous fields exactly") {
    const MaterialSpec steel{193.0, 0.28, 1e-6};
    const auto grid = uniform_grid(6, 8.75, true);
    const double L = 8.75;

    SECTION("uniaxial case") {
        const auto field = solve_case(grid, steel, {1, 0.001});
        CHECK(field.converged_residual <= 1e-8);
        const int nn = 7;
        for (int k = 0; k < nn; ++k)
            for (int j = 0; j < nn; ++j)
                for (int i = 0; i < nn; ++i) {
                    const std::size_t node = i + nn * (j + nn * k);
                    const double x = i * grid.pitch();
                    CHECK(field.values[3 * node] == Approx(0.001 * x).margin(1e-8 * L));
                    CHECK(field.values[3 * node + 1] == Approx(0.0).margin(1e-8 * L));
                    CHECK(field.values[3 * node + 2] == Approx(0.0).margin(1e-8 * L));
                }
    }

    SECTION("shear case") {
        const auto field = solve_case(grid, steel, {6, 0.001});
        const int nn = 7;
        for (int k = 0; k < nn; ++k)
            for (int j = 0; j < nn; ++j)
                for (int i = 0; i < nn; ++i) {
                    const std::size_t node = i + nn * (j + nn * k);
                    const double x = i * grid.pitch(), y = j * grid.pitch();
                    CHECK(field.values[3 * node] == Approx(0.0005 * y).margin(1e-8 * L));
                    CHECK(field.values[3 * node + 1] == Approx(0.0005 * x).margin(1e-8 * L));
                    CHECK(field.values[3 * node + 2] == Approx(0.0).margin(1e-8 * L));
                }
    }

    SECTION("all-void grid is rejected") {
        CHECK_THROWS_AS(solve_case(uniform_grid(4, 8.75, false), steel, {1, 0.001}), NoSolid);
    }

    SECTION("iteration cap raises NotConverged") {
        CHECK_THROWS_AS(solve_case(laminate_grid(8, 8.75), steel, {1, 0.001}, 1e-10, 2),
                        NotConverged);
    }
}

TEST_CASE("average_stress evaluates the constitutive law") {
    const MaterialSpec steel{193.0, 0.28, 1e-6};
    const auto lame = lame_parameters(steel);
    const auto grid = uniform_grid(4, 8.75, true);

    DisplacementField field;
    field.resolution = 4;
    field.values.assign(3 * 5 * 5 * 5, 0.0);

    SECTION("zero field gives zero stress") {
        for (double s : average_stress(grid, steel, field))
            CHECK(s == Approx(0.0).margin(1e-15));
    }

    SECTION("uniaxial strain gives the constrained modulus column") {
        for (int k = 0; k < 5; ++k)
            for (int j = 0; j < 5; ++j)
                for (int i = 0; i < 5; ++i)
                    field.values[3 * (i + 5 * (j + 5 * k))] = 0.001 * i * grid.pitch();
        const auto sigma = average_stress(grid, steel, field);
        CHECK(sigma[0] == Approx((lame.lambda_gpa + 2 * lame.mu_gpa) * 0.001).epsilon(1e-10));
        CHECK(sigma[1] == Approx(lame.lambda_gpa * 0.001).epsilon(1e-10));
        CHECK(sigma[2] == Approx(lame.lambda_gpa * 0.001).epsilon(1e-10));
        for (int s = 3; s < 6; ++s) CHECK(sigma[s] == Approx(0.0).margin(1e-15));
    }

    SECTION("engineering shear gives mu*gamma") {
        for (int k = 0; k < 5; ++k)
            for (int j = 0; j < 5; ++j)
                for (int i = 0; i < 5; ++i) {
                    const std::size_t node = i + 5 * (j + 5 * k);
                    field.values[3 * node] = 0.0005 * j * grid.pitch();
                    field.values[3 * node + 1] = 0.0005 * i * grid.pitch();
                }
        const auto sigma = average_stress(grid, steel, field);
        CHECK(sigma[5] == Approx(lame.mu_gpa * 0.001).epsilon(1e-10));
        for (int s = 0; s < 5; ++s) CHECK(sigma[s] == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("homogenize recovers the isotropic solid") {
    const MaterialSpec steel{193.0, 0.28, 1e-6};
    const auto lame = lame_parameters(steel);
    const auto c = homogenize(uniform_grid(8, 8.75, true), steel);
    const double c11 = lame.lambda_gpa + 2 * lame.mu_gpa;
    for (int i = 0; i < 3; ++i) {
        CHECK(c.c[i][i] == Approx(c11).epsilon(1e-8));
        CHECK(c.c[(i + 1) % 3][i] == Approx(lame.lambda_gpa).epsilon(1e-8));
        CHECK(c.c[i + 3][i + 3] == Approx(lame.mu_gpa).epsilon(1e-8));
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 3; j < 6; ++j) CHECK(std::abs(c.c[i][j]) <= 1e-10 * c11);
    CHECK(c.asymmetry <= 1e-6);
}

TEST_CASE("laminate columns match series and parallel closed forms") {
    // With nu = 0 the piecewise-uniform fields are exact, so the constrained
    // moduli are the harmonic (series) and arithmetic (parallel) means.
    const MaterialSpec mat{100.0, 0.0, 1e-6};
    const auto grid = laminate_grid(16, 8.75);
    const double m_solid = 100.0, m_void = 100.0 * 1e-6;

    const auto c = homogenize(grid, mat, 0.001, 1e-10);
    const double harmonic = 2.0 / (1.0 / m_solid + 1.0 / m_void);
    const double arithmetic = 0.5 * (m_solid + m_void);
    CHECK(c.c[0][0] == Approx(harmonic).epsilon(0.02));
    CHECK(c.c[1][1] == Approx(arithmetic).epsilon(0.02));
    CHECK(c.c[2][2] == Approx(arithmetic).epsilon(0.02));
}

TEST_CASE("laminate series modulus is exact for nonzero Poisson ratio") {
    const MaterialSpec mat{193.0, 0.28, 1e-4};
    const auto lame = lame_parameters(mat);
    const double m1 = lame.lambda_gpa + 2 * lame.mu_gpa;
    const double m2 = m1 * mat.void_contrast;
    const auto grid = laminate_grid(8, 8.75);
    const auto field = solve_case(grid, mat, {1, 0.001}, 1e-11);
    const auto sigma = average_stress(grid, mat, field);
    const double harmonic = 2.0 / (1.0 / m1 + 1.0 / m2);
    CHECK(sigma[0] / 0.001 == Approx(harmonic).epsilon(0.005));
}

TEST_CASE("homogenized stiffness is linear in strain and material") {
    const MaterialSpec mat{193.0, 0.28, 1e-4};
    const auto grid = random_grid(6, 8.75, 42);

    const auto c_small = homogenize(grid, mat, 0.001, 1e-10);
    const auto c_unit = homogenize(grid, mat, 1.0, 1e-10);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(c_unit.c[i][j] ==
                  Approx(c_small.c[i][j]).epsilon(1e-10).margin(1e-10 * c_small.c[0][0]));

    MaterialSpec doubled = mat;
    doubled.youngs_modulus_gpa *= 2.0;
    const auto c_doubled = homogenize(grid, doubled, 0.001, 1e-10);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(c_doubled.c[i][j] ==
                  Approx(2.0 * c_small.c[i][j]).epsilon(1e-8).margin(1e-9 * c_small.c[0][0]));
}

TEST_CASE("homogenize is deterministic") {
    const MaterialSpec mat{193.0, 0.28, 1e-6};
    const auto grid = random_grid(6, 8.75, 99);
    const auto a = homogenize(grid, mat);
    const auto b = homogenize(grid, mat);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) CHECK(a.c[i][j] == b.c[i][j]);
    CHECK(a.info.iterations == b.info.iterations);
}

TEST_CASE("symmetrized stiffness is positive semidefinite") {
    const MaterialSpec mat{193.0, 0.28, 1e-6};
    const auto c = homogenize(random_grid(6, 8.75, 7, 0.35), mat);
    std::vector<double> m(36);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) m[6 * i + j] = c.c[i][j];
    const auto eig = xnls_test::symmetric_eigenvalues(m, 6);
    for (double e : eig) CHECK(e >= -1e-9 * c.c[0][0]);
}

TEST_CASE("void contrast does not pollute connected designs") {
    const auto folded = t4fas_fold(build_base(catalog_design("XNFS:0:0")));
    const auto grid = voxelize(folded, 16);
    MaterialSpec soft{193.0, 0.28, 1e-6};
    MaterialSpec softer{193.0, 0.28, 1e-8};
    const auto c6 = homogenize(grid, soft);
    const auto c8 = homogenize(grid, softer);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(c8.c[i][j] == Approx(c6.c[i][j]).margin(0.01 * std::abs(c6.c[0][0])));
}
