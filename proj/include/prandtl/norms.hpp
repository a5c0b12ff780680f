#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "prandtl/grid.hpp"
#include "prandtl/spectral.hpp"
#include "prandtl/stencil.hpp"

namespace prandtl {

inline constexpr int kMaxLadderOrder = 64;

/// log(tau^m M_m) with M_m = sqrt(m + 1) / m!.
inline double log_tau_factor(int m, double tau) {
    return m * std::log(tau) + 0.5 * std::log(m + 1.0) - std::lgamma(m + 1.0);
}

/// M_m = sqrt(m + 1) / m!.
inline double factor_Mm(int m) {
    if (m < 0 || m > kMaxLadderOrder)
        throw Error(ErrorKind::Config, "ladder-order", "ladder order must lie in [0, 64]");
    if (m <= 20) {
        double f = 1.0;
        for (int n = 2; n <= m; ++n) f *= n;
        return std::sqrt(m + 1.0) / f;
    }
    return std::exp(0.5 * std::log(m + 1.0) - std::lgamma(m + 1.0));
}

struct NormSums {
    double X = 0.0, Y = 0.0, D = 0.0, Z = 0.0, B = 0.0, tildeB = 0.0;
};

/// Per-order seminorms and their sums at one radius.
struct NormProfile {
    int m_max = 0;
    double tau = 0.0;
    double alpha = 0.0;
    double t = 0.0;
    std::vector<double> X, D, Z, Y, B, tildeD, tildeZ, tildeB;
    NormSums sums;
    /// Largest share of a sum carried by its m_max entry (X, D and Z ladders).
    double tail_ratio = 0.0;
};

struct LadderOptions {
    int m_max = 20;
    /// Zero modes above nx/3 before differentiating.
    bool dealias = true;
    /// Throw "ladder-truncation" when tail_ratio exceeds the tolerance.
    bool check_truncation = true;
    double truncation_tol = 1e-3;
};

namespace detail {

// A_k = sum_j w_j s theta_j^2 * l_x * mult_k * |c_k(j)|^2, so that
// ||theta d_x^m f||^2 = sum_k A_k k~^{2m}.
inline std::vector<double> weighted_mode_energy(const Spectrum& s, double alpha) {
    const Grid& g = s.grid();
    const double t = s.time();
    const auto w = g.trapezoid_weights();
    std::vector<double> a(static_cast<std::size_t>(s.nk()), 0.0);
    const double scale = g.scale(t) * g.lx();
    for (int k = 0; k < s.nk(); ++k) {
        double acc = 0.0;
        const auto col = s.column(k);
        for (int j = 0; j < g.nz(); ++j) {
            const double lt = log_weight_theta(alpha, t, g.y(t, j));
            acc += w[static_cast<std::size_t>(j)] * weighted_square(lt, std::abs(col[static_cast<std::size_t>(j)]));
        }
        a[static_cast<std::size_t>(k)] = acc * scale * mode_multiplicity(k, g.nx());
    }
    return a;
}

// ||theta d_x^m f|| for m = 0..m_max from the mode energies.
inline std::vector<double> derivative_norms(const Grid& g, const std::vector<double>& a, int m_max, int k_last) {
    std::vector<double> out(static_cast<std::size_t>(m_max + 1), 0.0);
    for (int m = 0; m <= m_max; ++m) {
        double acc = 0.0;
        for (int k = 0; k <= k_last; ++k) {
            const double ak = a[static_cast<std::size_t>(k)];
            if (ak == 0.0) continue;
            if (m == 0) {
                acc += ak;
            } else if (k > 0) {
                acc += ak * std::pow(g.wavenumber(k), 2.0 * m);
            }
        }
        out[static_cast<std::size_t>(m)] = std::sqrt(acc);
    }
    return out;
}

}  // namespace detail

/// Derived spectra used by the ladder: d_y g and z g.
inline Spectrum normal_derivative_spectrum(const Spectrum& g) {
    const Grid& grid = g.grid();
    const double s = grid.scale(g.time());
    Spectrum out(g.grid_ptr(), g.time());
    for (int k = 0; k < g.nk(); ++k) {
        normal_derivative<cplx>(grid, g.column(k), Parity::Even, out.column(k));
        for (auto& c : out.column(k)) c /= s;
    }
    return out;
}

inline Spectrum z_times_spectrum(const Spectrum& g) {
    const Grid& grid = g.grid();
    Spectrum out = g;
    for (int k = 0; k < g.nk(); ++k) {
        auto col = out.column(k);
        for (int j = 0; j < grid.nz(); ++j) col[static_cast<std::size_t>(j)] *= grid.z(g.time(), j);
    }
    return out;
}

/// The analytic ladder of g at radius tau and weight alpha.
inline NormProfile seminorm_ladder(const Spectrum& g, double tau, double alpha, const LadderOptions& opt = {}) {
    if (!(tau > 0.0)) throw Error(ErrorKind::Config, "radius", "seminorm_ladder needs tau > 0");
    if (opt.m_max < 0 || opt.m_max > kMaxLadderOrder)
        throw Error(ErrorKind::Config, "ladder-order", "m_max must lie in [0, 64]");
    const Grid& grid = g.grid();
    const int k_last = opt.dealias ? grid.dealias_cutoff() : g.nk() - 1;
    const double t = g.time();
    const double bt = bracket_t(t);

    const auto nx = detail::derivative_norms(grid, detail::weighted_mode_energy(g, alpha), opt.m_max, k_last);
    const auto nd = detail::derivative_norms(
        grid, detail::weighted_mode_energy(normal_derivative_spectrum(g), alpha), opt.m_max, k_last);
    const auto nzg =
        detail::derivative_norms(grid, detail::weighted_mode_energy(z_times_spectrum(g), alpha), opt.m_max, k_last);

    NormProfile p;
    p.m_max = opt.m_max;
    p.tau = tau;
    p.alpha = alpha;
    p.t = t;
    const auto n = static_cast<std::size_t>(opt.m_max + 1);
    for (auto* v : {&p.X, &p.D, &p.Z, &p.Y, &p.B, &p.tildeD, &p.tildeZ, &p.tildeB}) v->assign(n, 0.0);
    const double q = std::pow(bt, 0.25);
    for (std::size_t m = 0; m < n; ++m) {
        const double f = std::exp(log_tau_factor(static_cast<int>(m), tau));
        p.X[m] = nx[m] * f;
        p.D[m] = nd[m] * f;
        p.Z[m] = nzg[m] * f;
        p.Y[m] = p.X[m] * static_cast<double>(m) / tau;
        p.B[m] = q * p.X[m] + q * p.Z[m] + q * q * q * p.D[m];
        if (p.X[m] > 0.0) {
            p.tildeD[m] = p.D[m] * p.D[m] / p.X[m];
            p.tildeZ[m] = p.Z[m] * p.Z[m] / p.X[m];
        }
        p.tildeB[m] = q * p.X[m] + q * p.tildeZ[m] + q * q * q * q * q * p.tildeD[m];
    }
    for (std::size_t m = 0; m < n; ++m) {
        p.sums.X += p.X[m];
        p.sums.Y += p.Y[m];
        p.sums.D += p.D[m];
        p.sums.Z += p.Z[m];
        p.sums.B += p.B[m];
        p.sums.tildeB += p.tildeB[m];
    }
    auto ratio = [](double last, double sum) { return sum > 0.0 ? last / sum : 0.0; };
    p.tail_ratio = std::max({ratio(p.X.back(), p.sums.X), ratio(p.D.back(), p.sums.D), ratio(p.Z.back(), p.sums.Z)});
    if (opt.check_truncation && p.tail_ratio > opt.truncation_tol)
        throw Error(ErrorKind::Numerical, "ladder-truncation",
                    "norm ladder not converged at tau = " + std::to_string(tau) +
                        " (tail ratio " + std::to_string(p.tail_ratio) + ")");
    return p;
}

inline NormProfile seminorm_ladder(const Field& g, double tau, double alpha, const LadderOptions& opt = {}) {
    return seminorm_ladder(to_spectrum(g), tau, alpha, opt);
}

/// Margin of ||g||_B <= 2 <t>^{1/8} ||g||_X^{1/2} ||g||_tildeB^{1/2}; nonnegative when it holds.
inline double check_B_tildeB(const NormProfile& p) {
    const double rhs = 2.0 * std::pow(bracket_t(p.t), 0.125) * std::sqrt(p.sums.X) * std::sqrt(p.sums.tildeB);
    return rhs - p.sums.B;
}

/// Margin of ||g||_{Y_tau} <= ||g||_{X_{2 tau}} / tau. Empty when the ladder at
/// 2 tau does not converge, in which case the check is skipped.
inline std::optional<double> check_Y_X_bound(const Spectrum& g, double tau, double alpha, LadderOptions opt = {}) {
    opt.check_truncation = false;
    const NormProfile at_tau = seminorm_ladder(g, tau, alpha, opt);
    const NormProfile at_2tau = seminorm_ladder(g, 2.0 * tau, alpha, opt);
    if (at_2tau.tail_ratio > opt.truncation_tol) return std::nullopt;
    return at_2tau.sums.X / tau - at_tau.sums.Y;
}

}  // namespace prandtl
