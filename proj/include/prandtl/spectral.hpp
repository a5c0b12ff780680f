#pragma once

#include <complex>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "prandtl/grid.hpp"

namespace prandtl {

using cplx = std::complex<double>;

/// Tangential Fourier coefficients of a real field, one normal profile per
/// wavenumber index k = 0 .. nx/2. Stored k-outer: c[k * nz + j].
/// Normalised so that f(x) = sum_k c_k e^{i k~ x} (negative k by conjugation).
class Spectrum {
public:
    Spectrum() = default;
    Spectrum(GridPtr grid, double t)
        : grid_(std::move(grid)), t_(t),
          c_(static_cast<std::size_t>(grid_->nx() / 2 + 1) * static_cast<std::size_t>(grid_->nz())) {}

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    double time() const noexcept { return t_; }
    void set_time(double t) noexcept { t_ = t; }
    int nk() const noexcept { return grid_->nx() / 2 + 1; }

    std::span<cplx> column(int k) noexcept {
        return std::span<cplx>(c_).subspan(offset(k), static_cast<std::size_t>(grid_->nz()));
    }
    std::span<const cplx> column(int k) const noexcept {
        return std::span<const cplx>(c_).subspan(offset(k), static_cast<std::size_t>(grid_->nz()));
    }
    cplx& operator()(int k, int j) noexcept { return c_[offset(k) + static_cast<std::size_t>(j)]; }
    cplx operator()(int k, int j) const noexcept { return c_[offset(k) + static_cast<std::size_t>(j)]; }
    std::span<cplx> data() noexcept { return c_; }
    std::span<const cplx> data() const noexcept { return c_; }

    /// Zeroes every wavenumber above `cutoff`.
    void truncate_above(int cutoff) noexcept {
        for (int k = cutoff + 1; k < nk(); ++k)
            for (auto& v : column(k)) v = 0.0;
    }

    Spectrum& operator+=(const Spectrum& o) {
        for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += o.c_[n];
        return *this;
    }
    Spectrum& operator-=(const Spectrum& o) {
        for (std::size_t n = 0; n < c_.size(); ++n) c_[n] -= o.c_[n];
        return *this;
    }
    Spectrum& operator*=(double a) {
        for (auto& v : c_) v *= a;
        return *this;
    }
    friend Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
    friend Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
    friend Spectrum operator*(double a, Spectrum s) { return s *= a; }

    bool all_finite() const noexcept {
        for (const auto& v : c_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

private:
    std::size_t offset(int k) const noexcept {
        return static_cast<std::size_t>(k) * static_cast<std::size_t>(grid_->nz());
    }

    GridPtr grid_;
    double t_ = 0.0;
    std::vector<cplx> c_;
};

/// Parseval multiplicity of index k in the half spectrum.
inline double mode_multiplicity(int k, int nx) noexcept { return (k == 0 || 2 * k == nx) ? 1.0 : 2.0; }

namespace detail {
inline Eigen::FFT<double>& fft_engine() {
    thread_local Eigen::FFT<double> engine = [] {
        Eigen::FFT<double> e;
        e.SetFlag(Eigen::FFT<double>::HalfSpectrum);
        return e;
    }();
    return engine;
}
}  // namespace detail

inline Spectrum to_spectrum(const Field& f) {
    const Grid& g = f.grid();
    Spectrum s(f.grid_ptr(), f.time());
    std::vector<double> row(static_cast<std::size_t>(g.nx()));
    std::vector<cplx> out;
    const double inv_n = 1.0 / g.nx();
    for (int j = 0; j < g.nz(); ++j) {
        for (int i = 0; i < g.nx(); ++i) row[static_cast<std::size_t>(i)] = f(i, j);
        detail::fft_engine().fwd(out, row);
        for (int k = 0; k < s.nk(); ++k) s(k, j) = out[static_cast<std::size_t>(k)] * inv_n;
    }
    return s;
}

inline Field to_field(const Spectrum& s) {
    const Grid& g = s.grid();
    Field f(s.grid_ptr(), s.time());
    std::vector<cplx> row(static_cast<std::size_t>(s.nk()));
    std::vector<double> out;
    const double n = g.nx();
    for (int j = 0; j < g.nz(); ++j) {
        for (int k = 0; k < s.nk(); ++k) row[static_cast<std::size_t>(k)] = s(k, j) * n;
        // a real signal has a real Nyquist coefficient
        row.back() = cplx(row.back().real(), 0.0);
        row.front() = cplx(row.front().real(), 0.0);
        detail::fft_engine().inv(out, row);
        for (int i = 0; i < g.nx(); ++i) f(i, j) = out[static_cast<std::size_t>(i)];
    }
    return f;
}

/// Applies (i k~)^m in place. The Nyquist coefficient is dropped for odd m.
inline void apply_dx_power(Spectrum& s, int m) {
    if (m == 0) return;
    const Grid& g = s.grid();
    for (int k = 0; k < s.nk(); ++k) {
        cplx factor = std::pow(cplx(0.0, g.wavenumber(k)), m);
        if (2 * k == g.nx() && (m % 2 != 0)) factor = 0.0;
        for (auto& v : s.column(k)) v *= factor;
    }
}

/// Spectral d^m/dx^m of a real field.
inline Field dx_power(const Field& f, int m) {
    Spectrum s = to_spectrum(f);
    apply_dx_power(s, m);
    return to_field(s);
}

}  // namespace prandtl
