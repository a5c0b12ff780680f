#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "prandtl/good_unknown.hpp"

using namespace prandtl;

namespace {

GridPtr grid_with(int nz, CoordinateMode mode = CoordinateMode::SelfSimilarZ, int nx = 32) {
    GridConfig c;
    c.nx = nx;
    c.nz = nz;
    c.mode = mode;
    return make_grid(c);
}

double rel_l2(const Field& a, const Field& b) {
    return l2_weighted(a - b, 0.0) / l2_weighted(b, 0.0);
}

double roundtrip_profile(double x, double z) {
    return (1.0 + 0.5 * std::cos(x)) * (1.0 + 0.4 * z * z) * std::exp(-0.4 * z * z);
}

double roundtrip_error(int nz, double t) {
    Field g = Field::sample(grid_with(nz), t, roundtrip_profile);
    return rel_l2(g_from_u(recover_u(g)), g);
}

Field random_band_limited(const GridPtr& grid, double t, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    const double a0 = nd(rng), a1 = nd(rng), b1 = nd(rng), a3 = nd(rng), c2 = nd(rng);
    return Field::sample(grid, t, [&](double x, double z) {
        return (a0 + a1 * std::cos(x) + b1 * std::sin(x) + a3 * std::cos(3 * x)) * (1.0 + c2 * z * z) *
               std::exp(-0.5 * z * z);
    });
}

}  // namespace

TEST(GoodUnknown, ZeroMapsToZero) {
    auto g = grid_with(64);
    Field zero(g, 0.0);
    EXPECT_EQ(g_from_u(zero).max_abs(), 0.0);
    EXPECT_EQ(recover_u(zero).max_abs(), 0.0);
    EXPECT_EQ(recover_v(zero).max_abs(), 0.0);
}

TEST(GoodUnknown, ClosedFormPairFromU) {
    // u = y e^{-y^2/4} at t = 0 maps to g = e^{-y^2/4}
    auto err = [](int nz) {
        auto g = grid_with(nz);
        Field u = Field::sample(g, 0.0, [](double, double z) { return z * std::exp(-0.25 * z * z); });
        Field exact = Field::sample(g, 0.0, [](double, double z) { return std::exp(-0.25 * z * z); });
        return (g_from_u(u) - exact).max_abs();
    };
    const double e1 = err(128), e2 = err(256);
    EXPECT_LT(e1, 1e-4);
    // fourth order in the interior, third order from the one-sided top rows
    EXPECT_GT(e1 / e2, 7.0);
}

TEST(GoodUnknown, ClosedFormPairFromG) {
    // the kernel integrand is constant, so the trapezoid rule is exact
    auto g = grid_with(128);
    Field gg = Field::sample(g, 0.0, [](double, double z) { return std::exp(-0.25 * z * z); });
    Field exact = Field::sample(g, 0.0, [](double, double z) { return z * std::exp(-0.25 * z * z); });
    EXPECT_LT((recover_u(gg) - exact).max_abs(), 1e-13);
}

TEST(GoodUnknown, RejectsNonzeroWallRow) {
    auto g = grid_with(64);
    Field u = Field::sample(g, 0.0, [](double, double z) { return 1.0 + z; });
    try {
        g_from_u(u);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "boundary-row");
    }
}

TEST(GoodUnknown, RecoverVClosedForm) {
    // g = cos x e^{-y^2/4}: v = 2 sin x (1 - e^{-y^2/4})
    auto g = grid_with(128);
    Field gg = Field::sample(g, 0.0, [](double x, double z) { return std::cos(x) * std::exp(-0.25 * z * z); });
    Field exact = Field::sample(g, 0.0, [](double x, double z) { return 2.0 * std::sin(x) * (1.0 - std::exp(-0.25 * z * z)); });
    EXPECT_LT((recover_v(gg) - exact).max_abs(), 2e-3);
}

TEST(GoodUnknown, XIndependentGGivesZeroV) {
    auto g = grid_with(64);
    Field gg = Field::sample(g, 0.0, [](double, double z) { return (1 - z * z) * std::exp(-z * z); });
    EXPECT_LT(recover_v(gg).max_abs(), 1e-14);
}

TEST(GoodUnknown, WallRowsExactlyZero) {
    auto g = grid_with(64);
    std::mt19937_64 rng(3);
    Field gg = random_band_limited(g, 0.7, rng);
    const auto st = recover_state(gg);
    for (int i = 0; i < g->nx(); ++i) {
        EXPECT_EQ(recover_u(gg)(i, 0), 0.0);
        EXPECT_EQ(st.u(i, 0), 0.0);
        EXPECT_EQ(st.v(i, 0), 0.0);
    }
}

TEST(GoodUnknown, LinearAndCommuteWithDx) {
    auto g = grid_with(64);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        Field a = random_band_limited(g, 0.3, rng), b = random_band_limited(g, 0.3, rng);
        const Field ua = recover_u(a), ub = recover_u(b);
        const double scale = (ua.max_abs() + ub.max_abs());
        EXPECT_LT((recover_u(a + b) - (ua + ub)).max_abs(), 1e-13 * scale);
        EXPECT_LT((recover_u(dx_power(a, 1)) - dx_power(ua, 1)).max_abs(), 1e-12 * scale);
        const Field va = recover_v(a), vb = recover_v(b);
        EXPECT_LT((recover_v(a + b) - (va + vb)).max_abs(), 1e-13 * (va.max_abs() + vb.max_abs()));
    }
}

TEST(GoodUnknown, DivergenceFree) {
    auto check = [](int nz) {
        auto g = grid_with(nz);
        std::mt19937_64 rng(5);
        Field gg = random_band_limited(g, 0.0, rng);
        const Field u = recover_u(gg), v = recover_v(gg);
        const Field ux = dx_power(u, 1);
        std::vector<double> vy(static_cast<std::size_t>(nz));
        double worst = 0.0;
        for (int i = 0; i < g->nx(); ++i) {
            normal_derivative<double>(*g, v.column(i), Parity::None, vy);
            for (int j = 2; j < nz - 2; ++j) worst = std::max(worst, std::abs(ux(i, j) + vy[static_cast<std::size_t>(j)]));
        }
        return worst / ux.max_abs();
    };
    const double e1 = check(128), e2 = check(256);
    EXPECT_LT(e1, 1e-2);
    EXPECT_NEAR(e1 / e2, 4.0, 0.8);
}

TEST(GoodUnknown, RoundtripSecondOrder) {
    const double e1 = roundtrip_error(128, 0.0), e2 = roundtrip_error(256, 0.0);
    EXPECT_LT(e1, 1e-3);
    EXPECT_NEAR(e1 / e2, 4.0, 0.8);
}

TEST(GoodUnknown, RoundtripLaterTime) {
    EXPECT_LT(roundtrip_error(128, 5.0), 1e-3);
}

TEST(GoodUnknown, PhysicalModeAgreesWithSelfSimilarAtReferenceTime) {
    auto gs = grid_with(128, CoordinateMode::SelfSimilarZ);
    auto gp = grid_with(128, CoordinateMode::PhysicalY);
    std::mt19937_64 r1(9), r2(9);
    Field a = random_band_limited(gs, 0.0, r1), b = random_band_limited(gp, 0.0, r2);
    const Field ua = recover_u(a), ub = recover_u(b);
    for (std::size_t n = 0; n < ua.values().size(); ++n) EXPECT_DOUBLE_EQ(ua.values()[n], ub.values()[n]);
}
