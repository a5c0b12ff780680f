#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "prandtl/verify.hpp"

using namespace prandtl;

namespace {

GridPtr grid_with(int nz) {
    GridConfig c;
    c.nz = nz;
    return make_grid(c);
}

// composite Simpson on [0, b]
template <class F>
double simpson(F f, double b, int n = 20000) {
    const double h = b / n;
    double acc = f(0.0) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

}  // namespace

TEST(Poincare, ZeroField) {
    const auto r = verify_poincare(Field(grid_with(64), 0.0), 0.5);
    EXPECT_EQ(r.worst_margin, 0.0);
    EXPECT_TRUE(r.passed);
}

TEST(Poincare, GaussianOracle) {
    auto g = grid_with(256);
    const Field f = Field::sample(g, 0.0, [](double, double z) { return std::exp(-z * z); });
    const auto p = poincare_terms(f, 0.5, 0);
    // per unit length in x: (1/2) sqrt(pi/7) and 8 sqrt(pi) / 7^{3/2}
    EXPECT_NEAR(p.lhs[0] / g->lx(), 0.334962292845339386, 1e-9);
    EXPECT_NEAR(p.rhs[0] / g->lx(), 0.765628097932204311, 1e-5);
    const auto r = verify_poincare(f, 0.5);
    EXPECT_TRUE(r.passed);
    EXPECT_NEAR(r.measured_constant, 7.0 / 16.0, 1e-5);
}

TEST(Poincare, HypothesisUnmet) {
    auto g = grid_with(128);
    for (auto f : {Field::sample(g, 0.0, [](double, double z) { return (1.0 + z) * std::exp(-z * z); }),
                   Field::sample(g, 0.0, [](double, double z) { return std::exp(-0.01 * z * z); })}) {
        try {
            verify_poincare(f, 0.5);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), "hypothesis-unmet");
        }
    }
}

TEST(Poincare, RandomAdmissibleFields) {
    SuiteOptions o;
    o.trials = 100;
    for (double alpha : {0.25, alpha_from_epsilon(0.1), 0.5}) {
        o.alpha = alpha;
        const auto r = poincare_suite(o);
        EXPECT_EQ(r.samples, 500);
        EXPECT_TRUE(r.passed) << alpha;
        EXPECT_GT(r.worst_margin, 0.0);
    }
}

TEST(RandomFields, AreEvenAndBandLimited) {
    auto g = grid_with(128);
    std::mt19937_64 rng(3);
    const RandomField f(family_modes(FieldFamily{}, *g), FieldFamily{}, rng);
    EXPECT_EQ(family_modes(FieldFamily{}, *g), 7);
    for (double x : {0.1, 1.0, 4.0})
        for (double z : {0.3, 2.0}) EXPECT_DOUBLE_EQ(f(x, z), f(x, -z));
    const Spectrum s = to_spectrum(f.sample(g, 0.0));
    for (int k = 8; k < s.nk(); ++k)
        for (const auto& c : s.column(k)) EXPECT_LT(std::abs(c), 1e-12);
}

TEST(Diagnostic, ZeroFieldPasses) {
    for (const auto& r : verify_diagnostic_bounds(Field(grid_with(64), 0.0), 0.5, 3)) {
        EXPECT_EQ(r.measured_constant, 0.0);
        EXPECT_TRUE(r.passed);
    }
}

TEST(Diagnostic, SingleModeIsFiniteAndRefinementStable) {
    auto f = [](double x, double z) { return std::cos(x) * std::exp(-z * z); };
    const auto a = diagnostic_ratios(Field::sample(grid_with(128), 0.0, f), 0.5, 4);
    const auto b = diagnostic_ratios(Field::sample(grid_with(255), 0.0, f), 0.5, 4);
    for (std::size_t q = 0; q < 4; ++q) {
        EXPECT_GT(a[q], 0.0);
        EXPECT_LT(a[q], kConstantCeiling);
        EXPECT_LT(std::abs(a[q] - b[q]) / b[q], kDriftTolerance) << diagnostic_names()[q];
    }
}

TEST(Diagnostic, RatiosAreInvariantInSelfSimilarTime) {
    // every bound is homogeneous in <t> once g is a fixed profile in z
    auto g = grid_with(128);
    auto f = [](double x, double z) { return (1.0 + 0.3 * std::sin(2 * x)) * (1.0 - 0.2 * z * z) * std::exp(-0.6 * z * z); };
    const auto a = diagnostic_ratios(Field::sample(g, 0.0, f), 0.45, 2);
    const auto b = diagnostic_ratios(Field::sample(g, 7.0, f), 0.45, 2);
    for (std::size_t q = 0; q < 4; ++q) EXPECT_NEAR(a[q], b[q], 1e-12 * a[q]) << diagnostic_names()[q];
}

TEST(Diagnostic, SuiteOnRandomFields) {
    SuiteOptions o;
    o.trials = 100;
    for (const auto& r : diagnostic_suite(o)) {
        EXPECT_TRUE(r.passed) << r.name;
        EXPECT_LT(r.drift, kDriftTolerance) << r.name;
    }
}

TEST(Products, ZeroFactorGivesZero) {
    auto g = grid_with(128);
    const Field z(g, 0.0);
    const Field f = Field::sample(g, 0.0, [](double x, double y) { return std::cos(x) * std::exp(-y * y / 2); });
    for (double r : product_ratios(z, f, 0.5, 0.5, 40)) EXPECT_EQ(r, 0.0);
}

TEST(Products, SingleModeOracle) {
    // g1 = g2 = cos(x) h(z), h = e^{-z^2/2}, at t = 0 and alpha = 1/2:
    // U(g1) d_x g2 = -(1/2) sin(2x) U1 h with U1 = e^{-z^2/4} sqrt(pi) erf(z/2)
    auto g = grid_with(256);
    const double tau = 0.5, alpha = 0.5, zmax = g->zmax();
    const Field f = Field::sample(g, 0.0, [](double x, double z) { return std::cos(x) * std::exp(-z * z / 2); });
    auto th = [&](double z) { return std::exp(alpha * z * z / 4); };
    auto h = [](double z) { return std::exp(-z * z / 2); };
    auto u1 = [](double z) { return std::exp(-z * z / 4) * std::sqrt(std::numbers::pi) * std::erf(z / 2); };
    const double nh = std::sqrt(simpson([&](double z) { return std::pow(th(z) * h(z), 2); }, zmax));
    const double nzh = std::sqrt(simpson([&](double z) { return std::pow(z * th(z) * h(z), 2); }, zmax));
    const double ndh = std::sqrt(simpson([&](double z) { return std::pow(z * th(z) * h(z), 2); }, zmax));
    const double nuh = std::sqrt(simpson([&](double z) { return std::pow(th(z) * u1(z) * h(z), 2); }, zmax));
    double sx = 0.0, sy = 0.0, sp = 0.0;
    for (int m = 0; m <= 40; ++m) {
        const double w = std::pow(tau, m) * factor_Mm(m);
        sx += w;
        sy += w * m / tau;
        sp += w * std::pow(2.0, m);
    }
    const double rp = std::sqrt(std::numbers::pi);
    const double B = sx * rp * (nh + nzh + ndh), Y = sy * rp * nh, X = sp * 0.5 * rp * nuh;
    const auto r = product_ratios(f, f, tau, alpha, 40);
    EXPECT_NEAR(r[0], std::sqrt(tau) * X / (B * Y), 2e-3 * r[0]);
}

TEST(Products, MeasuredConstantsStableInTrials) {
    FieldFamily fam;
    fam.modes = 1;
    fam.degree = 0;
    fam.mode_decay = 1.0;
    const auto pc = measure_product_constants(grid_with(128), fam, 1000, 7);
    double sum = 0.0;
    for (const auto& r : pc.reports) {
        EXPECT_TRUE(r.passed) << r.name;
        EXPECT_LT(r.drift, kDriftTolerance) << r.name;
        EXPECT_GT(r.measured_constant, 0.0);
        EXPECT_EQ(r.samples, 1000);
        sum += r.measured_constant;
    }
    EXPECT_DOUBLE_EQ(pc.C0, sum);
}

TEST(Products, UnconvergedTrialsAreSkipped) {
    FieldFamily fam;
    fam.modes = 7;
    fam.mode_decay = 1.0;
    ProductOptions po;
    po.tau = 4.0;
    po.m_max = 10;
    const auto pc = measure_product_constants(grid_with(64), fam, 5, 1, po);
    for (const auto& r : pc.reports) {
        EXPECT_EQ(r.skipped, 5);
        EXPECT_EQ(r.samples, 0);
    }
}

TEST(Dawson, BoundSweep) {
    const auto r = dawson_report();
    EXPECT_TRUE(r.passed);
    EXPECT_GT(r.worst_margin, 0.0);
    EXPECT_LT(r.measured_constant, 2.0);
}

TEST(Snapshots, MarginsOnASmallRun) {
    auto g = grid_with(128);
    InitialData init;
    init.normalize = true;
    SolverConfig cfg;
    cfg.t_end = 4.0;
    cfg.snapshot_every = 1.0;
    RunParams p;
    p.m_max = 40;
    p.lift.alpha = alpha_from_epsilon(0.1);
    std::vector<std::pair<Field, double>> snaps;
    RunObserver obs;
    obs.on_snapshot = [&](const Field& f, double tau) { snaps.emplace_back(f, tau); };
    run_simulation(initial_state(g, init, 1.0, 40), cfg, make_radius_state(1.0, 1.0, 1.0, 0.0, 0.1, false), p, obs);
    ASSERT_EQ(snaps.size(), 5u);
    for (const auto& r : snapshot_reports(snaps, p.lift.alpha, 40)) {
        EXPECT_TRUE(r.passed) << r.name;
        EXPECT_GT(r.samples, 0) << r.name;
    }
}

TEST(Consistency, TwoRunDistanceShrinksFourfold) {
    auto g = grid_with(128);
    SolverConfig cfg;
    EXPECT_EQ(two_run_consistency(Spectrum(g, 0.0), cfg, LiftParams{}, 0.05), 0.0);
    InitialData init;
    const Spectrum g0 = initial_state(g, init, 1.0, 40);
    const double d1 = two_run_consistency(g0, cfg, LiftParams{}, 0.05);
    const double d2 = two_run_consistency(g0, cfg, LiftParams{}, 0.025);
    EXPECT_GT(d1, 0.0);
    EXPECT_NEAR(d1 / d2, 4.0, 0.8);
}

TEST(Consistency, CoordinateModesAgree) {
    InitialData init;
    SolverConfig cfg;
    GridConfig c;
    cfg.dt = 0.05;
    const double d1 = coordinate_mode_distance(c, init, cfg, LiftParams{}, 1.0, 0.5);
    c.nz = 255;
    cfg.dt = 0.025;
    const double d2 = coordinate_mode_distance(c, init, cfg, LiftParams{}, 1.0, 0.5);
    EXPECT_LT(d1, 2e-3);
    EXPECT_GT(d1 / d2, 3.0);
}

TEST(Consistency, InterpolationIsExactForCubics) {
    auto g = grid_with(64);
    std::vector<double> f;
    for (double z : g->nodes()) f.push_back(1.0 - z + 0.5 * z * z - 0.01 * z * z * z);
    for (double z : {0.0, 0.05, 3.3, 11.9}) EXPECT_NEAR(interpolate_profile(*g, f, z), 1.0 - z + 0.5 * z * z - 0.01 * z * z * z, 1e-10);
    EXPECT_EQ(interpolate_profile(*g, f, 13.0), 0.0);
}

TEST(CrossCheck, VelocityAndGoodUnknownFormsAgree) {
    InitialData init;
    SolverConfig cfg;
    cfg.dt = 0.05;
    const auto a = crosscheck(grid_with(128), init, cfg, LiftParams{}, 0.5, 0.5);
    cfg.dt = 0.025;
    const auto b = crosscheck(grid_with(255), init, cfg, LiftParams{}, 0.5, 0.5);
    EXPECT_DOUBLE_EQ(a.t, 0.5);
    EXPECT_LE(a.distance, 1e-3);
    EXPECT_GT(a.distance / b.distance, 3.0);
}
