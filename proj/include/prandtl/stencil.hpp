#pragma once

#include <array>
#include <complex>
#include <span>

#include "prandtl/grid.hpp"

namespace prandtl {

/// Reflection symmetry across the wall used to fill ghost nodes.
/// Even: Neumann data such as g (f(-zeta) = f(zeta)).
/// Odd: Dirichlet data such as u (f(-zeta) = -f(zeta)).
/// None: no symmetry; one-sided closures are used at the wall.
enum class Parity { Even, Odd, None };

/// Normal-direction finite-difference row in the physical coordinate zeta,
/// after folding ghost columns back into the grid.
struct StencilRow {
    std::array<int, 5> col{};
    std::array<double, 5> d1{};  // coefficients of d/dzeta
    std::array<double, 5> d2{};  // coefficients of d^2/dzeta^2
    int size = 0;

    void add(int c, double a1, double a2) {
        for (int n = 0; n < size; ++n)
            if (col[static_cast<std::size_t>(n)] == c) {
                d1[static_cast<std::size_t>(n)] += a1;
                d2[static_cast<std::size_t>(n)] += a2;
                return;
            }
        col[static_cast<std::size_t>(size)] = c;
        d1[static_cast<std::size_t>(size)] = a1;
        d2[static_cast<std::size_t>(size)] = a2;
        ++size;
    }
};

namespace detail {
inline constexpr std::array<double, 5> kCentral1 = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
inline constexpr std::array<double, 5> kCentral2 = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
}  // namespace detail

/// Row j of the implicit normal operator (0 <= j <= nz - 2).
///
/// Fourth-order central differences in xi, with ghost nodes below the wall
/// filled by the parity reflection. Row nz - 2 drops to the second-order
/// three-point stencil so the band stays within the Dirichlet row at z_max.
inline StencilRow normal_stencil_row(const Grid& g, int j, Parity parity) {
    const int n = g.nz();
    const double h = g.dxi();
    const double m1 = g.metric()[static_cast<std::size_t>(j)];
    const double m2 = g.metric2()[static_cast<std::size_t>(j)];
    const double sign = parity == Parity::Odd ? -1.0 : 1.0;
    StencilRow row;
    auto put = [&](int offset, double c1_xi, double c2_xi) {
        int c = j + offset;
        double s = 1.0;
        if (c < 0) {
            c = -c;
            s = sign;
        }
        // d/dzeta = (1/m1) d/dxi ; d^2/dzeta^2 = (d^2/dxi^2 - (m2/m1) d/dxi) / m1^2
        const double a1 = c1_xi / m1;
        const double a2 = (c2_xi - (m2 / m1) * c1_xi) / (m1 * m1);
        row.add(c, s * a1, s * a2);
    };
    if (j <= n - 3) {
        for (int o = -2; o <= 2; ++o)
            put(o, detail::kCentral1[static_cast<std::size_t>(o + 2)] / h,
                detail::kCentral2[static_cast<std::size_t>(o + 2)] / (h * h));
    } else {
        put(-1, -0.5 / h, 1.0 / (h * h));
        put(0, 0.0, -2.0 / (h * h));
        put(1, 0.5 / h, 1.0 / (h * h));
    }
    return row;
}

/// Fourth-order d/dzeta of one normal profile.
///
/// Wall rows use the parity reflection (or one-sided closures for
/// Parity::None); the last two rows always use one-sided fourth-order closures.
template <class T>
void normal_derivative(const Grid& g, std::span<const T> f, Parity parity, std::span<T> out) {
    const int n = g.nz();
    const double h = g.dxi();
    const auto m1 = g.metric();
    auto at = [&](int c) -> T {
        if (c >= 0) return f[static_cast<std::size_t>(c)];
        return parity == Parity::Odd ? -f[static_cast<std::size_t>(-c)] : f[static_cast<std::size_t>(-c)];
    };
    auto fv = [&](int c) { return f[static_cast<std::size_t>(c)]; };
    for (int j = 0; j < n; ++j) {
        T d{};
        if (parity == Parity::None && j == 0) {
            d = (-25.0 * fv(0) + 48.0 * fv(1) - 36.0 * fv(2) + 16.0 * fv(3) - 3.0 * fv(4)) / (12.0 * h);
        } else if (parity == Parity::None && j == 1) {
            d = (-3.0 * fv(0) - 10.0 * fv(1) + 18.0 * fv(2) - 6.0 * fv(3) + fv(4)) / (12.0 * h);
        } else if (j == n - 1) {
            d = (25.0 * fv(j) - 48.0 * fv(j - 1) + 36.0 * fv(j - 2) - 16.0 * fv(j - 3) + 3.0 * fv(j - 4)) /
                (12.0 * h);
        } else if (j == n - 2) {
            d = (3.0 * fv(j + 1) + 10.0 * fv(j) - 18.0 * fv(j - 1) + 6.0 * fv(j - 2) - fv(j - 3)) / (12.0 * h);
        } else {
            d = (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) / (12.0 * h);
        }
        out[static_cast<std::size_t>(j)] = d / m1[static_cast<std::size_t>(j)];
    }
}

/// One-sided fourth-order d/dzeta at the wall, independent of any assumed parity.
inline double wall_derivative_one_sided(const Grid& g, std::span<const double> f) {
    const double h = g.dxi();
    return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h) / g.metric()[0];
}

}  // namespace prandtl
