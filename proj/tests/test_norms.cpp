#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "prandtl/norms.hpp"

using namespace prandtl;

namespace {

GridPtr grid64() {
    GridConfig c;
    c.nz = 64;
    return make_grid(c);
}

Field random_field(const GridPtr& g, double t, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    double a[4], b[4];
    for (int k = 0; k < 4; ++k) {
        a[k] = nd(rng) * std::pow(0.5, k);
        b[k] = nd(rng) * std::pow(0.5, k);
    }
    const double c2 = nd(rng);
    return Field::sample(g, t, [&](double x, double z) {
        double s = a[0];
        for (int k = 1; k < 4; ++k) s += a[k] * std::cos(k * x) + b[k] * std::sin(k * x);
        return s * (1.0 + c2 * z * z) * std::exp(-0.5 * z * z);
    });
}

}  // namespace

TEST(FactorMm, Values) {
    EXPECT_EQ(factor_Mm(0), 1.0);
    EXPECT_NEAR(factor_Mm(2), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_NEAR(factor_Mm(5), 0.020412414523193151, 1e-15);
    EXPECT_NEAR(factor_Mm(30) / (std::sqrt(31.0) / std::tgamma(31.0)), 1.0, 1e-12);
    EXPECT_THROW(factor_Mm(65), Error);
}

TEST(Ladder, ZeroField) {
    auto g = grid64();
    const auto p = seminorm_ladder(Field(g, 0.0), 1.0, 0.5);
    EXPECT_EQ(p.sums.X, 0.0);
    EXPECT_EQ(p.sums.tildeB, 0.0);
    EXPECT_EQ(check_B_tildeB(p), 0.0);
    for (double v : p.tildeD) EXPECT_EQ(v, 0.0);
}

TEST(Ladder, SingleModeRatios) {
    auto g = grid64();
    Field f = Field::sample(g, 0.0, [](double x, double z) { return std::cos(2 * x) * std::exp(-0.5 * z * z); });
    const double tau = 0.3;
    const auto p = seminorm_ladder(f, tau, 0.5);
    // d_x^m cos(2x) has norm 2^m times that of cos(2x)
    // (higher orders sit at roundoff level relative to X_0)
    for (int m = 1; m <= 8; ++m) {
        const double expect = std::pow(2 * tau, m) * factor_Mm(m);
        EXPECT_NEAR(p.X[static_cast<std::size_t>(m)] / p.X[0], expect, 1e-10 * expect);
    }
    // ||cos(2x) h|| = sqrt(pi) ||h||_{L^2(0, zmax)}; trapezoid oracle for the normal factor
    EXPECT_NEAR(p.X[0], std::sqrt(std::numbers::pi) * l2_weighted(Field::sample(g, 0.0, [](double, double z) { return std::exp(-0.5 * z * z); }), 0.5) / std::sqrt(2 * std::numbers::pi), 1e-12);
}

TEST(Ladder, SumsAndIdentities) {
    auto g = grid64();
    std::mt19937_64 rng(2);
    Field f = random_field(g, 1.5, rng);
    const auto p = seminorm_ladder(f, 0.4, 0.4);
    double sx = 0.0;
    for (double v : p.X) sx += v;
    EXPECT_NEAR(p.sums.X, sx, 1e-14 * sx);
    const double q = std::pow(2.5, 0.25);
    for (int m = 0; m <= p.m_max; ++m) {
        const auto k = static_cast<std::size_t>(m);
        EXPECT_NEAR(p.B[k], q * p.X[k] + q * p.Z[k] + q * q * q * p.D[k], 1e-14 * p.B[k]);
        if (p.X[k] > 0) {
            EXPECT_NEAR(p.tildeD[k] * p.X[k], p.D[k] * p.D[k], 1e-13 * p.D[k] * p.D[k]);
        }
    }
}

TEST(Ladder, MonotoneInTauAndHomogeneous) {
    auto g = grid64();
    std::mt19937_64 rng(4);
    Field f = random_field(g, 0.0, rng);
    const auto p1 = seminorm_ladder(f, 0.3, 0.45), p2 = seminorm_ladder(f, 0.6, 0.45);
    for (int m = 0; m <= p1.m_max; ++m) EXPECT_LE(p1.X[static_cast<std::size_t>(m)], p2.X[static_cast<std::size_t>(m)]);
    EXPECT_LE(p1.sums.B, p2.sums.B);
    const auto p3 = seminorm_ladder(-3.0 * f, 0.3, 0.45);
    EXPECT_NEAR(p3.sums.X, 3.0 * p1.sums.X, 1e-13 * p3.sums.X);
    EXPECT_NEAR(p3.sums.tildeB, 3.0 * p1.sums.tildeB, 1e-13 * p3.sums.tildeB);
}

TEST(Ladder, DerivativeLaddersAreXLaddersOfDerivedFields) {
    auto g = grid64();
    std::mt19937_64 rng(6);
    Field f = random_field(g, 2.0, rng);
    const Spectrum s = to_spectrum(f);
    const auto p = seminorm_ladder(s, 0.5, 0.4);
    const auto pd = seminorm_ladder(normal_derivative_spectrum(s), 0.5, 0.4, {20, true, false});
    const auto pz = seminorm_ladder(z_times_spectrum(s), 0.5, 0.4, {20, true, false});
    for (int m = 0; m <= p.m_max; ++m) {
        EXPECT_NEAR(p.D[static_cast<std::size_t>(m)], pd.X[static_cast<std::size_t>(m)], 1e-13 * pd.X[0]);
        EXPECT_NEAR(p.Z[static_cast<std::size_t>(m)], pz.X[static_cast<std::size_t>(m)], 1e-13 * pz.X[0]);
    }
}

TEST(Ladder, BTildeBAndYXBoundsOnRandomFields) {
    auto g = grid64();
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        Field f = random_field(g, 0.5 * trial, rng);
        const auto p = seminorm_ladder(f, 0.5, 0.45);
        EXPECT_GE(check_B_tildeB(p), -1e-12);
        const auto m = check_Y_X_bound(to_spectrum(f), 0.5, 0.45);
        ASSERT_TRUE(m.has_value());
        EXPECT_GE(*m, -1e-12);
    }
}

TEST(Ladder, TruncationError) {
    auto g = grid64();
    Field f = Field::sample(g, 0.0, [](double x, double z) { return std::cos(8 * x) * std::exp(-0.5 * z * z); });
    try {
        seminorm_ladder(f, 3.0, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "ladder-truncation");
    }
    LadderOptions opt;
    opt.m_max = 64;
    EXPECT_NO_THROW(seminorm_ladder(f, 0.5, 0.5, opt));
}
