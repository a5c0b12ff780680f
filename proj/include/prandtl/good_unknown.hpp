#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "prandtl/grid.hpp"
#include "prandtl/spectral.hpp"
#include "prandtl/stencil.hpp"

namespace prandtl {

/// Prognostic g together with the velocity fields recovered from it.
/// The vorticity omega = d_y u is derived on demand and never stored.
struct StateBundle {
    Field g;
    Field u;
    Field v;
    double t = 0.0;
};

namespace detail {

// u(zeta_j) = s * int_0^zeta_j g(q) exp(c (q^2 - zeta_j^2)) dq with c = s^2 / (4<t>),
// by the trapezoid rule. The recurrence only ever multiplies by exp(-c (..)) <= 1.
template <class T>
void cumulative_kernel_integral(const Grid& grid, double t, std::span<const T> g, std::span<T> u) {
    const auto z = grid.nodes();
    const double s = grid.scale(t);
    const double c = s * s / (4.0 * bracket_t(t));
    const int n = grid.nz();
    u[0] = T{};
    for (int j = 0; j + 1 < n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double h = z[jj + 1] - z[jj];
        const double decay = std::exp(c * (z[jj] * z[jj] - z[jj + 1] * z[jj + 1]));
        u[jj + 1] = decay * u[jj] + (0.5 * s * h) * (decay * g[jj] + g[jj + 1]);
    }
}

// int_0^zeta_j f dq by the trapezoid rule.
template <class T>
void cumulative_trapezoid(const Grid& grid, std::span<const T> f, std::span<T> out) {
    const auto z = grid.nodes();
    out[0] = T{};
    for (std::size_t j = 0; j + 1 < f.size(); ++j) out[j + 1] = out[j] + (0.5 * (z[j + 1] - z[j])) * (f[j] + f[j + 1]);
}

}  // namespace detail

/// The recovery operator U: u = exp(-y^2/4<t>) int_0^y g exp(q^2/4<t>) dq.
/// The wall row is exactly zero.
inline Field recover_u(const Field& g) {
    if (!g.all_finite()) throw Error(ErrorKind::Numerical, "non-finite", "recover_u: input has NaN/Inf");
    Field u(g.grid_ptr(), g.time());
    for (int i = 0; i < g.grid().nx(); ++i)
        detail::cumulative_kernel_integral<double>(g.grid(), g.time(), g.column(i), u.column(i));
    return u;
}

/// U applied to every Fourier column.
inline Spectrum recover_u(const Spectrum& g) {
    Spectrum u(g.grid_ptr(), g.time());
    for (int k = 0; k < g.nk(); ++k)
        detail::cumulative_kernel_integral<cplx>(g.grid(), g.time(), g.column(k), u.column(k));
    return u;
}

/// v = -int_0^y d_x u dq, given the spectrum of u. d_x is spectral.
inline Spectrum velocity_v_from_u(const Spectrum& u) {
    const Grid& grid = u.grid();
    const double s = grid.scale(u.time());
    Spectrum v(u.grid_ptr(), u.time());
    for (int k = 0; k < u.nk(); ++k) {
        detail::cumulative_trapezoid<cplx>(grid, u.column(k), v.column(k));
        cplx factor = cplx(0.0, -grid.wavenumber(k) * s);
        if (2 * k == grid.nx()) factor = 0.0;
        for (auto& c : v.column(k)) c *= factor;
    }
    return v;
}

/// The operator V: v = -int_0^y U(d_x g) dq. U and d_x commute, so this is
/// computed as V(g) = velocity_v_from_u(U(g)).
inline Spectrum recover_v(const Spectrum& g) { return velocity_v_from_u(recover_u(g)); }

inline Field recover_v(const Field& g) {
    if (!g.all_finite()) throw Error(ErrorKind::Numerical, "non-finite", "recover_v: input has NaN/Inf");
    return to_field(recover_v(to_spectrum(g)));
}

/// g = d_y u + (y / 2<t>) u, with a fourth-order normal stencil.
/// Rejects fields with u(x, 0) != 0.
inline Field g_from_u(const Field& u) {
    const Grid& grid = u.grid();
    const double t = u.time();
    const double scale_u = std::max(1.0, u.max_abs());
    for (int i = 0; i < grid.nx(); ++i)
        if (std::abs(u(i, 0)) > 1e-10 * scale_u)
            throw Error(ErrorKind::Config, "boundary-row", "g_from_u: u(x, 0) must vanish");
    const double s = grid.scale(t);
    const double bt = bracket_t(t);
    const auto z = grid.nodes();
    Field g(u.grid_ptr(), t);
    std::vector<double> du(static_cast<std::size_t>(grid.nz()));
    for (int i = 0; i < grid.nx(); ++i) {
        normal_derivative<double>(grid, u.column(i), Parity::Odd, du);
        auto gc = g.column(i);
        auto uc = u.column(i);
        for (std::size_t j = 0; j < du.size(); ++j) gc[j] = du[j] / s + (s * z[j] / (2.0 * bt)) * uc[j];
    }
    return g;
}

/// Full diagnostic bundle for a given g.
inline StateBundle recover_state(const Field& g) {
    Spectrum gs = to_spectrum(g);
    Spectrum us = recover_u(gs);
    StateBundle out{g, to_field(us), to_field(velocity_v_from_u(us)), g.time()};
    // the wall rows are exactly zero by construction; keep them so after the FFT
    for (int i = 0; i < g.grid().nx(); ++i) {
        out.u(i, 0) = 0.0;
        out.v(i, 0) = 0.0;
    }
    return out;
}

}  // namespace prandtl
