#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "xnls/sweep.hpp"

using namespace xnls;
using Catch::Approx;

namespace {

NestedLatticeSpec covering_spec() {
    // A mono cross with a huge diameter: its capsules cover the whole cell,
    // so the pipeline sees a solid cube.
    NestedLatticeSpec spec = catalog_design("XNFS:0:0");
    spec.name = "solid-cube-fixture";
    for (auto& o : spec.orders) o.diameter_mm = 40.0;
    return spec;
}

PipelineOptions fast_options(int n = 16) {
    PipelineOptions opt;
    opt.resolution = n;
    return opt;
}

}  // namespace

TEST_CASE("pipeline on the solid-cube fixture reproduces the base material") {
    const auto report = run_pipeline(covering_spec(), fast_options(16));
    CHECK(report.rho_bar == Approx(1.0));
    CHECK(report.zener == Approx(1.0).margin(0.02));
    CHECK(report.e_bar == Approx(1.0).margin(0.02));
    CHECK(report.cls == AnisotropyClass::PerfectlyIsotropic);
    CHECK(report.e_bar == Approx(report.e_gpa / 193.0).epsilon(1e-12));
    CHECK(report.cls == classify(report.zener));
    CHECK(report.bc_family == "kinematic");
    CHECK(report.resolution == 16);
}

TEST_CASE("pipeline failures carry their stage") {
    NestedLatticeSpec empty;
    empty.cell_size_mm = 8.75;
    empty.name = "empty";
    try {
        run_pipeline(empty, fast_options());
        FAIL("expected NoSolid");
    } catch (const Error& e) {
        CHECK(e.family() == ErrorFamily::NoSolid);
        CHECK(std::string(e.what()).find("[homogenize]") != std::string::npos);
    }
}

TEST_CASE("pipeline report fields are mutually consistent on a real design") {
    const auto report = run_pipeline(catalog_design("XNFS:0:0"), fast_options(16));
    CHECK(report.rho_bar > 0.0);
    CHECK(report.rho_bar < 1.0);
    CHECK(report.s_bar > 0.0);
    CHECK(report.s_bar_cell == Approx(report.s_bar * report.rho_bar).epsilon(1e-9));
    CHECK(report.e_bar == Approx(report.e_gpa / 193.0).epsilon(1e-12));
    CHECK(report.cls == classify(report.zener));
    CHECK(report.asymmetry >= 0.0);
}

TEST_CASE("sweeps cover the Cartesian grid in order") {
    SweepPlan plan;
    plan.base_spec = catalog_design("XNFS:0:0");
    plan.options = fast_options(16);
    plan.axes = {{"d0", {0.6, 0.8, 1.0}}, {"resolution", {16, 20}}};
    const auto result = run_sweep(plan);
    REQUIRE(result.rows.size() == 6);
    CHECK(result.failures.empty());

    // First axis outermost.
    CHECK(result.rows[0].parameter_values == std::vector<double>{0.6, 16});
    CHECK(result.rows[1].parameter_values == std::vector<double>{0.6, 20});
    CHECK(result.rows[2].parameter_values == std::vector<double>{0.8, 16});
    CHECK(result.rows[5].parameter_values == std::vector<double>{1.0, 20});
    CHECK(result.rows[2].report.resolution == 16);
    CHECK(result.rows[1].report.resolution == 20);
}

TEST_CASE("sweep density grows with diameter") {
    SweepPlan plan;
    plan.base_spec = catalog_design("XNFS:0:0");
    plan.options = fast_options(32);
    plan.axes = {{"d0", {0.6, 0.8, 1.0}}};
    const auto result = run_sweep(plan);
    REQUIRE(result.rows.size() == 3);
    // Center-sampled occupancy staircases, so adjacent steps may tie; the
    // normative invariant is monotone non-decreasing with overall growth.
    for (std::size_t i = 1; i < result.rows.size(); ++i)
        CHECK(result.rows[i].report.rho_bar >= result.rows[i - 1].report.rho_bar);
    CHECK(result.rows.back().report.rho_bar > result.rows.front().report.rho_bar);
}

TEST_CASE("sweep point failures are recorded, not fatal") {
    SweepPlan plan;
    plan.base_spec = catalog_design("XNFS:0:0");
    plan.options = fast_options(16);
    plan.axes = {{"d0", {0.8, -0.5, 1.0}}};  // middle point is an invalid spec
    const auto result = run_sweep(plan);
    CHECK(result.rows.size() == 2);
    REQUIRE(result.failures.size() == 1);
    CHECK(result.failures[0].parameter_values == std::vector<double>{-0.5});
    CHECK(!result.failures[0].error.empty());
}

TEST_CASE("ratio axes slave one diameter to another") {
    SweepPlan plan;
    plan.base_spec = catalog_design("XNFS:0-1:0-0");
    plan.options = fast_options(16);
    plan.axes = {{"d0/d1", {0.5, 0.75, 1.0, 1.25, 1.5}}, {"d1", {0.6, 0.8, 1.0, 1.2, 1.4}}};
    const auto result = run_sweep(plan);
    CHECK(result.rows.size() + result.failures.size() == 25);

    for (const auto& row : result.rows) {
        const double ratio = row.parameter_values[0];
        const double d1 = row.parameter_values[1];
        REQUIRE(row.realized_spec.orders.size() == 2);
        CHECK(row.realized_spec.orders[1].diameter_mm == Approx(d1).epsilon(1e-12));
        CHECK(row.realized_spec.orders[0].diameter_mm ==
              Approx(ratio * d1).epsilon(1e-12));
        CHECK(row.realized_spec.orders[0].diameter_mm ==
              Approx(ratio * row.realized_spec.orders[1].diameter_mm).epsilon(1e-12));
    }
}

TEST_CASE("cyclic ratio constraints are rejected") {
    SweepPlan plan;
    plan.base_spec = catalog_design("XNFS:0-1:0-0");
    plan.axes = {{"d0/d1", {1.0}}, {"d1/d0", {1.0}}};
    CHECK_THROWS_AS(plan.validate(), InvalidSpec);

    plan.axes = {{"bogus", {1.0}}};
    CHECK_THROWS_AS(plan.validate(), InvalidSpec);

    plan.axes = {{"d2", {0.8}}};  // base spec has orders 0 and 1 only
    CHECK_THROWS_AS(plan.validate(), InvalidSpec);

    plan.axes = {};
    CHECK_THROWS_AS(plan.validate(), InvalidSpec);
}

TEST_CASE("sweep output is byte-identical across runs and worker counts") {
    SweepPlan plan;
    plan.base_spec = catalog_design("XNFS:0:0");
    plan.options = fast_options(16);
    plan.axes = {{"d0", {0.7, 0.9}}, {"theta1", {}}};
    plan.axes[1] = {"resolution", {16, 20}};
    const auto a = sweep_csv(run_sweep(plan, 1));
    const auto b = sweep_csv(run_sweep(plan, 1));
    const auto c = sweep_csv(run_sweep(plan, 2));
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("sweep plan round-trips through its config format") {
    const char* text = R"({
        "design": "XNFS:0-1:0-0",
        "resolution": 12,
        "material": {"youngs_modulus_gpa": 100.0, "poisson_ratio": 0.3},
        "axes": [
            {"param": "d0/d1", "values": [0.5, 1.0]},
            {"param": "d1", "values": [0.6, 0.8]}
        ]
    })";
    const auto plan = plan_from_json(json::parse(text));
    CHECK(plan.base_spec.name == "XNFS:0-1:0-0");
    CHECK(plan.options.resolution == 12);
    CHECK(plan.options.material.youngs_modulus_gpa == Approx(100.0));
    REQUIRE(plan.axes.size() == 2);
    CHECK(plan.axes[0].param == "d0/d1");
    CHECK(plan.axes[1].values == std::vector<double>{0.6, 0.8});
}

TEST_CASE("density targeting inverts the cylinder analytically") {
    // rho(d) for a single through-cylinder is pi d^2 / (4 L^2).
    const double L = 8.75;
    auto rho_of_d = [&](double d) {
        StrutModel m;
        m.cell_size_mm = L;
        m.segments = {{{0, 0, -L / 2}, {0, 0, L / 2}, d / 2}};
        return relative_density(voxelize(m, 256));
    };
    const double target = kPi * 0.8 * 0.8 / (4.0 * L * L);
    const double d = target_density_generic(rho_of_d, target, 0.2, 2.0, 2e-4);
    CHECK(d == Approx(0.8).margin(0.01));
    CHECK(std::abs(rho_of_d(d) - target) <= 2e-4);
}

TEST_CASE("density targeting reports unbracketed targets") {
    auto rho_of_d = [](double d) { return d * d; };
    CHECK_THROWS_AS(target_density_generic(rho_of_d, 0.0, 0.5, 1.0), Unbracketed);
    CHECK_THROWS_AS(target_density_generic(rho_of_d, 2.0, 0.5, 1.0), Unbracketed);
    CHECK_THROWS_AS(target_density_generic(rho_of_d, 0.5, 1.0, 0.5), InvalidSpec);
}

TEST_CASE("density targeting on a catalog design re-verifies") {
    const auto spec = catalog_design("XNFS:0-1:0-15");
    const double d = target_density(spec, 0.08, 0.2, 1.2, 48, 0.003);
    NestedLatticeSpec realized = spec;
    for (auto& o : realized.orders) o.diameter_mm = d;
    const double rho = relative_density(voxelize(t4fas_fold(build_base(realized)), 48));
    // The voxel rho(d) staircase caps the attainable accuracy; acceptance
    // uses the 0.005 re-verification bound.
    CHECK(std::abs(rho - 0.08) <= 0.005);
}
