#pragma once

#include <cmath>
#include <numbers>

#include "prandtl/grid.hpp"

namespace prandtl {

/// Euler trace u^E = kappa (the pressure gradient is zero) and the weight
/// exponent alpha in [1/4, 1/2].
struct LiftParams {
    double kappa = 1.0;
    double alpha = 0.5;
};

/// Gauss error function, exactly odd.
inline double erf_fn(double x) noexcept { return x < 0.0 ? -std::erf(-x) : std::erf(x); }

namespace detail {

// Asymptotic series F(y) ~ 1/(2y) sum_k (2k-1)!! / (2y^2)^k, truncated at the
// smallest term. Accurate to roundoff for y >= 8.
inline double dawson_asymptotic(double y) noexcept {
    const double q = 1.0 / (2.0 * y * y);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * (2.0 * k - 1.0) * q;
        if (next >= term) break;
        term = next;
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum / (2.0 * y);
}

// Taylor step of F' = 1 - 2 x F from (x0, f0) by h. Derivatives follow
// F^{(n+1)} = -2 x F^{(n)} - 2 n F^{(n-1)}; in scaled form
// a_{n+1} = (-2 x0 a_n - 2 a_{n-1}) / (n + 1).
inline double dawson_taylor_step(double x0, double f0, double h) noexcept {
    double a_prev = f0;
    double a = 1.0 - 2.0 * x0 * f0;
    double hp = h;
    double sum = f0 + a * h;
    // single coefficients can vanish (a_2 = 0 at x0 = 0), so stop on two small terms in a row
    int small = 0;
    for (int n = 1; n < 80; ++n) {
        const double a_next = (-2.0 * x0 * a - 2.0 * a_prev) / (n + 1);
        hp *= h;
        const double term = a_next * hp;
        sum += term;
        a_prev = a;
        a = a_next;
        small = std::abs(term) < 1e-19 ? small + 1 : 0;
        if (small >= 2) break;
    }
    return sum;
}

}  // namespace detail

/// Dawson function F(y) = exp(-y^2) int_0^y exp(s^2) ds.
///
/// Marches the linear ODE F' = 1 - 2yF from F(0) = 0 with high-order Taylor
/// steps (the homogeneous solution exp(-y^2) decays, so errors do not grow)
/// and switches to the asymptotic series for y >= 8.
inline double dawson_fn(double y) noexcept {
    if (y < 0.0) return -dawson_fn(-y);
    if (y == 0.0) return 0.0;
    if (y >= 8.0) return detail::dawson_asymptotic(y);
    constexpr double kStep = 0.25;
    double x = 0.0, f = 0.0;
    while (x + kStep < y) {
        f = detail::dawson_taylor_step(x, f, kStep);
        x += kStep;
    }
    return detail::dawson_taylor_step(x, f, y - x);
}

/// Upper bound F(y) <= 2 / (1 + y) used by the recovery estimates.
inline double dawson_bound(double y) noexcept { return 2.0 / (1.0 + y); }

/// Phi(z) = erf(z / 2), the self-similar lift profile.
inline double phi_profile(double z) noexcept { return erf_fn(0.5 * z); }

/// Phi'(z) = exp(-z^2 / 4) / sqrt(pi).
inline double phi_profile_derivative(double z) noexcept {
    return std::exp(-0.25 * z * z) / std::sqrt(std::numbers::pi);
}

/// phi(t, y) = erf(y / sqrt(4 <t>)).
inline double lift_phi(double t, double y) noexcept { return phi_profile(y / std::sqrt(bracket_t(t))); }

/// d phi / dy = exp(-y^2 / (4 <t>)) / sqrt(pi <t>).
inline double lift_phi_dy(double t, double y) noexcept {
    const double bt = bracket_t(t);
    return std::exp(-y * y / (4.0 * bt)) / std::sqrt(std::numbers::pi * bt);
}

/// a(t, y) = phi_yy / phi_y = -y / (2 <t>).
inline double coeff_a(double t, double y) noexcept { return -y / (2.0 * bracket_t(t)); }

}  // namespace prandtl
