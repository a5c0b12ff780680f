#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "prandtl/error.hpp"

namespace prandtl {

/// LU factorisation of a complex pentadiagonal matrix without pivoting.
///
/// Meant for the implicit normal operators, whose real part is a shifted
/// diffusion matrix; no pivoting keeps the fill inside the band.
class BandedLU {
public:
    using cplx = std::complex<double>;
    static constexpr int kHalf = 2;
    static constexpr int kWidth = 2 * kHalf + 1;

    BandedLU() = default;
    explicit BandedLU(int n) : n_(n), a_(static_cast<std::size_t>(n)) {}

    int size() const noexcept { return n_; }

    /// Entry (i, j) with |i - j| <= 2.
    cplx& at(int i, int j) noexcept { return a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i + kHalf)]; }
    cplx at(int i, int j) const noexcept {
        return a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i + kHalf)];
    }

    void clear() noexcept {
        for (auto& r : a_) r.fill(cplx{});
        factored_ = false;
    }

    void factor() {
        for (int k = 0; k < n_; ++k) {
            const cplx pivot = at(k, k);
            if (std::abs(pivot) < 1e-300)
                throw Error(ErrorKind::Numerical, "singular-operator", "banded solve hit a zero pivot");
            for (int i = k + 1; i <= std::min(k + kHalf, n_ - 1); ++i) {
                const cplx l = at(i, k) / pivot;
                at(i, k) = l;
                for (int j = k + 1; j <= std::min(k + kHalf, n_ - 1); ++j) at(i, j) -= l * at(k, j);
            }
        }
        factored_ = true;
    }

    /// Solves in place; factor() must have been called.
    void solve(std::span<cplx> b) const {
        for (int i = 1; i < n_; ++i)
            for (int j = std::max(0, i - kHalf); j < i; ++j) b[static_cast<std::size_t>(i)] -= at(i, j) * b[static_cast<std::size_t>(j)];
        for (int i = n_ - 1; i >= 0; --i) {
            cplx s = b[static_cast<std::size_t>(i)];
            for (int j = i + 1; j <= std::min(i + kHalf, n_ - 1); ++j) s -= at(i, j) * b[static_cast<std::size_t>(j)];
            b[static_cast<std::size_t>(i)] = s / at(i, i);
        }
    }

    bool factored() const noexcept { return factored_; }

private:
    int n_ = 0;
    std::vector<std::array<cplx, kWidth>> a_;
    bool factored_ = false;
};

}  // namespace prandtl
