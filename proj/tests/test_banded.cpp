#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "prandtl/banded.hpp"

using namespace prandtl;
using cplx = std::complex<double>;

TEST(Banded, MatchesDenseSolve) {
    const int n = 40;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    BandedLU lu(n);
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            cplx v(ud(rng), ud(rng));
            if (i == j) v += cplx(6.0, 0.0);
            lu.at(i, j) = v;
            dense(i, j) = v;
        }
    std::vector<cplx> b(static_cast<std::size_t>(n));
    Eigen::VectorXcd rhs(n);
    for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = rhs(i) = cplx(ud(rng), ud(rng));
    lu.factor();
    lu.solve(b);
    const Eigen::VectorXcd x = dense.partialPivLu().solve(rhs);
    for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(b[static_cast<std::size_t>(i)] - x(i)), 1e-13);
}

TEST(Banded, ZeroPivotIsReported) {
    BandedLU lu(3);
    lu.at(1, 1) = 1.0;
    lu.at(2, 2) = 1.0;
    EXPECT_THROW(lu.factor(), Error);
}
