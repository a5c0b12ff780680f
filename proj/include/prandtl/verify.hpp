#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "prandtl/solver.hpp"

namespace prandtl {

/// Outcome of one numerically checked inequality.
///
/// For inequalities without a free constant, worst_margin is the smallest
/// relative slack (RHS - LHS) / RHS over all samples. For constant-bearing
/// ones, measured_constant is the largest LHS / RHS ratio and worst_margin is
/// kConstantCeiling - measured_constant.
struct InequalityReport {
    std::string name;
    long samples = 0;
    double worst_margin = 0.0;
    double measured_constant = 0.0;
    bool passed = false;
    /// Relative change of measured_constant under refinement (or more trials); NaN if not checked.
    double drift = std::numeric_limits<double>::quiet_NaN();
    long skipped = 0;
};

/// Measured constants above this are treated as unbounded.
inline constexpr double kConstantCeiling = 1e3;
/// Quadrature slack for the constant-free inequalities.
inline constexpr double kMarginTolerance = 1e-10;
/// Allowed relative drift of a measured constant.
inline constexpr double kDriftTolerance = 0.05;

// ---------------------------------------------------------------------------
// Random admissible fields

/// Shape of the random test fields: sum over k <= modes of trigonometric
/// coefficients times even polynomials in z (degree 2 * degree) under
/// exp(-envelope z^2). Even in z, so the Neumann wall condition holds exactly.
struct FieldFamily {
    /// Highest Fourier index; negative means nx/4 - 1.
    int modes = -1;
    int degree = 2;
    double envelope = 0.5;
    /// Coefficient of index k is scaled by mode_decay^k.
    double mode_decay = 0.6;
};

/// A random admissible field held analytically so it can be sampled on any grid.
class RandomField {
public:
    RandomField(int modes, const FieldFamily& fam, std::mt19937_64& rng) : fam_(fam), modes_(modes) {
        std::normal_distribution<double> nd;
        const auto n = static_cast<std::size_t>((modes + 1) * (fam.degree + 1));
        a_.resize(n);
        b_.resize(n);
        for (int k = 0; k <= modes; ++k)
            for (int p = 0; p <= fam.degree; ++p) {
                const double w = std::pow(fam.mode_decay, k);
                a_[idx(k, p)] = w * nd(rng);
                b_[idx(k, p)] = k == 0 ? 0.0 : w * nd(rng);
            }
    }

    double operator()(double kx_unit, double z) const {
        const double z2 = z * z;
        const double env = std::exp(-fam_.envelope * z2);
        double acc = 0.0;
        for (int k = 0; k <= modes_; ++k) {
            double pa = 0.0, pb = 0.0, zp = 1.0;
            for (int p = 0; p <= fam_.degree; ++p) {
                pa += a_[idx(k, p)] * zp;
                pb += b_[idx(k, p)] * zp;
                zp *= z2;
            }
            acc += pa * std::cos(k * kx_unit) + pb * std::sin(k * kx_unit);
        }
        return acc * env;
    }

    Field sample(const GridPtr& grid, double t) const {
        const double unit = grid->wavenumber(1);
        return Field::sample(grid, t, [&](double x, double z) { return (*this)(unit * x, z); });
    }

private:
    std::size_t idx(int k, int p) const { return static_cast<std::size_t>(k * (fam_.degree + 1) + p); }

    FieldFamily fam_;
    int modes_;
    std::vector<double> a_, b_;
};

inline int family_modes(const FieldFamily& fam, const Grid& grid) {
    return fam.modes >= 0 ? fam.modes : std::max(0, grid.nx() / 4 - 1);
}

// ---------------------------------------------------------------------------
// Weighted Poincare inequality

namespace detail {

inline double report_margin(double lhs, double rhs) {
    if (rhs <= 0.0) return lhs <= 0.0 ? 0.0 : -1.0;
    return (rhs - lhs) / rhs;
}

// Hypotheses of the Poincare inequality: Neumann wall, vanishing at z_max.
// The wall slope is a parity-free one-sided estimate of d_z g, so it carries
// the discretisation error of solver states; 2% of max |g| separates those
// from fields with a genuine O(1) wall slope.
inline void check_poincare_hypotheses(const Field& g) {
    const Grid& grid = g.grid();
    const double scale = g.max_abs();
    if (scale == 0.0) return;
    const double to_z = grid.scale(g.time()) / std::sqrt(bracket_t(g.time()));
    for (int i = 0; i < grid.nx(); ++i) {
        const auto col = g.column(i);
        if (std::abs(wall_derivative_one_sided(grid, col)) / to_z > 2e-2 * scale)
            throw Error(ErrorKind::Config, "hypothesis-unmet", "field does not satisfy d_y g = 0 at the wall");
        if (std::abs(col.back()) > 1e-8 * scale)
            throw Error(ErrorKind::Config, "hypothesis-unmet", "field does not vanish at z_max");
    }
}

}  // namespace detail

struct PoincareTerms {
    /// (alpha / <t>) ||theta d_x^m g||^2 and ||theta d_y d_x^m g||^2 for m = 0..m_check.
    std::vector<double> lhs, rhs;
};

inline PoincareTerms poincare_terms(const Field& g, double alpha, int m_check) {
    const Grid& grid = g.grid();
    const Spectrum s = to_spectrum(g);
    const auto k_last = s.nk() - 1;
    const auto a = detail::derivative_norms(grid, detail::weighted_mode_energy(s, alpha), m_check, k_last);
    const auto ad =
        detail::derivative_norms(grid, detail::weighted_mode_energy(normal_derivative_spectrum(s), alpha), m_check, k_last);
    PoincareTerms out;
    const double c = alpha / bracket_t(g.time());
    for (int m = 0; m <= m_check; ++m) {
        const auto um = static_cast<std::size_t>(m);
        out.lhs.push_back(c * a[um] * a[um]);
        out.rhs.push_back(ad[um] * ad[um]);
    }
    return out;
}

/// (alpha / <t>) ||theta d_x^m g||^2 <= ||theta d_y d_x^m g||^2 for m = 0..m_check.
/// Throws "hypothesis-unmet" when g violates the wall or far-field condition.
inline InequalityReport verify_poincare(const Field& g, double alpha, int m_check = 4) {
    detail::check_poincare_hypotheses(g);
    const PoincareTerms p = poincare_terms(g, alpha, m_check);
    InequalityReport r;
    r.name = "poincare";
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < p.lhs.size(); ++m) {
        r.worst_margin = std::min(r.worst_margin, detail::report_margin(p.lhs[m], p.rhs[m]));
        if (p.rhs[m] > 0.0) r.measured_constant = std::max(r.measured_constant, p.lhs[m] / p.rhs[m]);
        ++r.samples;
    }
    r.passed = r.worst_margin >= -kMarginTolerance;
    return r;
}

// ---------------------------------------------------------------------------
// Diagnostic bounds for u and v

inline const std::array<std::string, 4>& diagnostic_names() {
    static const std::array<std::string, 4> n = {"u_L2x_Linfy", "g_L1y", "u_L2", "v_L2x_Linfy"};
    return n;
}

namespace detail {

// ||f||_{L^2_x L^inf_y} on the nodes.
inline double l2x_linfy(const Field& f) {
    const Grid& g = f.grid();
    double acc = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
        double m = 0.0;
        for (double v : f.column(i)) m = std::max(m, std::abs(v));
        acc += m * m;
    }
    return std::sqrt(acc * g.dx());
}

inline Field dx_field(const Spectrum& s, int m) {
    Spectrum c = s;
    apply_dx_power(c, m);
    return to_field(c);
}

// largest L^1_y / (<t>^{1/4} ||.||_{L^2_y}^{1/2} ||z .||_{L^2_y}^{1/2}) over x nodes
inline double column_l1_ratio(const Field& f, double alpha) {
    const Grid& g = f.grid();
    const double t = f.time();
    const auto w = g.trapezoid_weights();
    const double s = g.scale(t);
    std::vector<double> l1(static_cast<std::size_t>(g.nx())), l2(l1.size()), zl2(l1.size());
    double l2max = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
        double a = 0.0, b = 0.0, c = 0.0;
        for (int j = 0; j < g.nz(); ++j) {
            const double lt = log_weight_theta(alpha, t, g.y(t, j));
            const double v = f(i, j), z = g.z(t, j), wj = w[static_cast<std::size_t>(j)];
            a += wj * std::exp(lt) * std::abs(v);
            b += wj * weighted_square(lt, v);
            c += wj * weighted_square(lt, z * v);
        }
        const auto ui = static_cast<std::size_t>(i);
        l1[ui] = s * a;
        l2[ui] = std::sqrt(s * b);
        zl2[ui] = std::sqrt(s * c);
        l2max = std::max(l2max, l2[ui]);
    }
    double r = 0.0;
    for (std::size_t i = 0; i < l1.size(); ++i) {
        // columns at roundoff level carry no information
        if (l2[i] <= 1e-10 * l2max || zl2[i] == 0.0) continue;
        r = std::max(r, l1[i] / (std::pow(bracket_t(t), 0.25) * std::sqrt(l2[i] * zl2[i])));
    }
    return r;
}

inline double safe_ratio(double num, double den) {
    if (den <= 0.0) return num <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

}  // namespace detail

/// LHS / (RHS without C) of the four diagnostic bounds for orders 0..m,
/// maximised over the orders. Order: u in L^2_x L^inf_y, g in L^1_y, u in
/// weighted L^2, v in L^2_x L^inf_y.
inline std::array<double, 4> diagnostic_ratios(const Field& g, double alpha, int m) {
    const double t = g.time();
    const double bt = bracket_t(t);
    const Spectrum gs = to_spectrum(g);
    const Spectrum us = recover_u(gs);
    const Spectrum vs = velocity_v_from_u(us);
    const Spectrum gy = normal_derivative_spectrum(gs);
    std::array<double, 4> out{};
    for (int k = 0; k <= m; ++k) {
        const Field gm = detail::dx_field(gs, k);
        const Field gm1 = detail::dx_field(gs, k + 1);
        const Field um = detail::dx_field(us, k);
        const Field vm = detail::dx_field(vs, k);
        const Field gym = detail::dx_field(gy, k);
        Field zg = gm;
        for (int i = 0; i < g.grid().nx(); ++i)
            for (int j = 0; j < g.grid().nz(); ++j) zg(i, j) *= g.grid().z(t, j);
        const double ng = l2_weighted(gm, alpha);
        const double ngy = l2_weighted(gym, alpha);
        const double nzg = l2_weighted(zg, alpha);
        out[0] = std::max(out[0], detail::safe_ratio(detail::l2x_linfy(um), std::pow(bt, 0.25) * ng));
        out[1] = std::max(out[1], detail::column_l1_ratio(gm, alpha));
        const double rhs2 = std::pow(bt, 0.75) * std::sqrt(ng * ngy) + std::sqrt(bt) * std::sqrt(ng * nzg);
        out[2] = std::max(out[2], detail::safe_ratio(l2_weighted(um, alpha), rhs2));
        out[3] = std::max(out[3], detail::safe_ratio(detail::l2x_linfy(vm), std::pow(bt, 0.75) * l2_weighted(gm1, alpha)));
    }
    return out;
}

namespace detail {

inline InequalityReport constant_report(const std::string& name, double c, long samples) {
    InequalityReport r;
    r.name = name;
    r.samples = samples;
    r.measured_constant = c;
    r.worst_margin = kConstantCeiling - c;
    r.passed = std::isfinite(c) && c < kConstantCeiling;
    return r;
}

inline double relative_drift(double a, double b) {
    const double d = std::max(std::abs(a), std::abs(b));
    return d > 0.0 ? std::abs(a - b) / d : 0.0;
}

}  // namespace detail

/// Measured constants of the four diagnostic bounds for a single field.
inline std::vector<InequalityReport> verify_diagnostic_bounds(const Field& g, double alpha, int m) {
    const auto c = diagnostic_ratios(g, alpha, m);
    std::vector<InequalityReport> out;
    for (std::size_t n = 0; n < c.size(); ++n) out.push_back(detail::constant_report(diagnostic_names()[n], c[n], m + 1));
    return out;
}

// ---------------------------------------------------------------------------
// Analytic product estimates

inline const std::array<std::string, 3>& product_names() {
    static const std::array<std::string, 3> n = {"product_U_dx", "product_V_dy", "product_VU"};
    return n;
}

/// tau^{1/2} ||N||_X / (||.||_B ||.||_Y) for the three products
///   U(g1) d_x g2  against ||g1||_B ||g2||_Y,
///   V(g1) d_y g2  against ||g2||_B ||g1||_Y,
///   V(g1) U(g2) / (2<t>) against ||g2||_B ||g1||_Y.
/// Both inputs must share grid and time; 0/0 counts as 0.
inline std::array<double, 3> product_ratios(const Field& g1, const Field& g2, double tau, double alpha, int m_max) {
    const double t = g1.time();
    LadderOptions opt;
    opt.m_max = m_max;
    opt.dealias = false;
    const Spectrum s1 = to_spectrum(g1), s2 = to_spectrum(g2);
    const NormProfile p1 = seminorm_ladder(s1, tau, alpha, opt);
    const NormProfile p2 = seminorm_ladder(s2, tau, alpha, opt);

    const Field u1 = to_field(recover_u(s1)), u2 = to_field(recover_u(s2));
    const Field v1 = to_field(recover_v(s1));
    const Field g2x = detail::dx_field(s2, 1);
    const Field g2y = to_field(normal_derivative_spectrum(s2));
    Field n1(g1.grid_ptr(), t), n2(g1.grid_ptr(), t), n3(g1.grid_ptr(), t);
    const double h = 0.5 / bracket_t(t);
    for (std::size_t n = 0; n < n1.values().size(); ++n) {
        n1.values()[n] = u1.values()[n] * g2x.values()[n];
        n2.values()[n] = v1.values()[n] * g2y.values()[n];
        n3.values()[n] = h * v1.values()[n] * u2.values()[n];
    }
    const double rt = std::sqrt(tau);
    const double x1 = seminorm_ladder(n1, tau, alpha, opt).sums.X;
    const double x2 = seminorm_ladder(n2, tau, alpha, opt).sums.X;
    const double x3 = seminorm_ladder(n3, tau, alpha, opt).sums.X;
    return {detail::safe_ratio(rt * x1, p1.sums.B * p2.sums.Y), detail::safe_ratio(rt * x2, p2.sums.B * p1.sums.Y),
            detail::safe_ratio(rt * x3, p2.sums.B * p1.sums.Y)};
}

struct ProductConstants {
    std::vector<InequalityReport> reports;
    /// C0 = sum of the three measured constants.
    double C0 = 0.0;
};

struct ProductOptions {
    double tau = 0.5;
    double alpha = 0.5;
    double t = 0.0;
    int m_max = 40;
};

/// Largest product ratios over `trials` random pairs. Trials whose ladder does
/// not converge are skipped and counted. drift compares the first tenth of the
/// trials against all of them.
inline ProductConstants measure_product_constants(const GridPtr& grid, const FieldFamily& fam, int trials,
                                                  std::uint64_t seed, const ProductOptions& po = {}) {
    std::mt19937_64 rng(seed);
    const int modes = family_modes(fam, *grid);
    std::array<double, 3> best{}, early{};
    long skipped = 0, used = 0;
    const int first = std::max(1, trials / 10);
    for (int n = 0; n < trials; ++n) {
        const RandomField f1(modes, fam, rng), f2(modes, fam, rng);
        try {
            const auto r = product_ratios(f1.sample(grid, po.t), f2.sample(grid, po.t), po.tau, po.alpha, po.m_max);
            for (std::size_t q = 0; q < 3; ++q) best[q] = std::max(best[q], r[q]);
            ++used;
        } catch (const Error& e) {
            if (e.code() != "ladder-truncation") throw;
            ++skipped;
        }
        if (n + 1 == first) early = best;
    }
    ProductConstants out;
    for (std::size_t q = 0; q < 3; ++q) {
        auto r = detail::constant_report(product_names()[q], best[q], used);
        r.skipped = skipped;
        if (trials >= 10) {
            r.drift = detail::relative_drift(early[q], best[q]);
            r.passed = r.passed && r.drift < kDriftTolerance;
        }
        out.reports.push_back(r);
        out.C0 += best[q];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dawson bound

/// Sweeps D(y) <= 2 / (1 + y) on [0, y_max]; measured_constant is max (1 + y) D(y).
inline InequalityReport dawson_report(double y_max = 50.0, int samples = 50001) {
    InequalityReport r;
    r.name = "dawson_bound";
    r.samples = samples;
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (int n = 0; n < samples; ++n) {
        const double y = y_max * n / (samples - 1);
        const double d = dawson_fn(y);
        r.worst_margin = std::min(r.worst_margin, dawson_bound(y) - d);
        r.measured_constant = std::max(r.measured_constant, (1.0 + y) * d);
    }
    r.passed = r.worst_margin > 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Suites over random fields

struct SuiteOptions {
    GridConfig grid;
    FieldFamily family;
    int trials = 100;
    std::uint64_t seed = 1;
    double alpha = 0.5;
    /// Fields are placed at times drawn uniformly from [0, t_max].
    double t_max = 10.0;
    int m_check = 4;
    double tau = 0.5;
    int m_max = 40;
};

/// Poincare inequality on random admissible fields at random times.
inline InequalityReport poincare_suite(const SuiteOptions& o) {
    const GridPtr grid = make_grid(o.grid);
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> ut(0.0, o.t_max);
    InequalityReport all;
    all.name = "poincare";
    all.worst_margin = std::numeric_limits<double>::infinity();
    const int modes = family_modes(o.family, *grid);
    for (int n = 0; n < o.trials; ++n) {
        const RandomField f(modes, o.family, rng);
        const auto r = verify_poincare(f.sample(grid, ut(rng)), o.alpha, o.m_check);
        all.samples += r.samples;
        all.worst_margin = std::min(all.worst_margin, r.worst_margin);
        all.measured_constant = std::max(all.measured_constant, r.measured_constant);
    }
    all.passed = all.worst_margin >= -kMarginTolerance;
    return all;
}

/// Diagnostic bounds on random fields, evaluated on the configured grid and on
/// one with twice the normal resolution; passes when the constants are finite,
/// below the ceiling, and drift less than 5% between the two grids.
inline std::vector<InequalityReport> diagnostic_suite(const SuiteOptions& o) {
    GridConfig fine_cfg = o.grid;
    fine_cfg.nz = 2 * o.grid.nz - 1;
    const GridPtr coarse = make_grid(o.grid), fine = make_grid(fine_cfg);
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> ut(0.0, o.t_max);
    std::array<double, 4> cc{}, cf{};
    const int modes = family_modes(o.family, *coarse);
    for (int n = 0; n < o.trials; ++n) {
        const RandomField f(modes, o.family, rng);
        const double t = ut(rng);
        const auto a = diagnostic_ratios(f.sample(coarse, t), o.alpha, o.m_check);
        const auto b = diagnostic_ratios(f.sample(fine, t), o.alpha, o.m_check);
        for (std::size_t q = 0; q < 4; ++q) {
            cc[q] = std::max(cc[q], a[q]);
            cf[q] = std::max(cf[q], b[q]);
        }
    }
    std::vector<InequalityReport> out;
    for (std::size_t q = 0; q < 4; ++q) {
        auto r = detail::constant_report(diagnostic_names()[q], cc[q], static_cast<long>(o.trials) * (o.m_check + 1));
        r.drift = detail::relative_drift(cc[q], cf[q]);
        r.passed = r.passed && r.drift < kDriftTolerance;
        out.push_back(r);
    }
    return out;
}

inline ProductConstants products_suite(const SuiteOptions& o) {
    ProductOptions po;
    po.tau = o.tau;
    po.alpha = o.alpha;
    po.m_max = o.m_max;
    return measure_product_constants(make_grid(o.grid), o.family, o.trials, o.seed, po);
}

/// Poincare, B / tilde B and Y / X margins over stored snapshots (g, tau).
inline std::vector<InequalityReport> snapshot_reports(const std::vector<std::pair<Field, double>>& snaps, double alpha,
                                                      int m_max) {
    InequalityReport poin, btb, yx;
    poin.name = "poincare_snapshots";
    btb.name = "B_tildeB";
    yx.name = "Y_X";
    for (auto* r : {&poin, &btb, &yx}) r->worst_margin = std::numeric_limits<double>::infinity();
    LadderOptions opt;
    opt.m_max = m_max;
    for (const auto& [g, tau] : snaps) {
        const auto p = verify_poincare(g, alpha);
        poin.samples += p.samples;
        poin.worst_margin = std::min(poin.worst_margin, p.worst_margin);
        poin.measured_constant = std::max(poin.measured_constant, p.measured_constant);

        const NormProfile prof = seminorm_ladder(g, tau, alpha, opt);
        const double rhs = prof.sums.B + check_B_tildeB(prof);
        btb.worst_margin = std::min(btb.worst_margin, detail::report_margin(prof.sums.B, rhs));
        ++btb.samples;
        if (const auto m = check_Y_X_bound(to_spectrum(g), tau, alpha, opt)) {
            const double r = prof.sums.Y + *m;
            yx.worst_margin = std::min(yx.worst_margin, detail::report_margin(prof.sums.Y, r));
            ++yx.samples;
        } else {
            ++yx.skipped;
        }
    }
    for (auto* r : {&poin, &btb, &yx}) {
        if (r->samples == 0) r->worst_margin = 0.0;
        r->passed = r->worst_margin >= -kMarginTolerance;
    }
    return {poin, btb, yx};
}

// ---------------------------------------------------------------------------
// Consistency checks between runs

namespace detail {

inline double relative_x_distance(const Spectrum& a, const Spectrum& b, double tau, double alpha, int m_max) {
    LadderOptions opt;
    opt.m_max = m_max;
    opt.check_truncation = false;
    const double d = seminorm_ladder(a - b, tau, alpha, opt).sums.X;
    const double n = seminorm_ladder(b, tau, alpha, opt).sums.X;
    return safe_ratio(d, n);
}

}  // namespace detail

struct ConsistencyOptions {
    double t_end = 1.0;
    double tau = 1.0;
    double alpha = 0.5;
    int m_max = 40;
};

/// Fixed-step runs at dt and dt/2 from the same datum. Returns the largest
/// relative X_tau distance over the coarse time levels.
inline double two_run_consistency(const Spectrum& g0, const SolverConfig& scfg, const LiftParams& lift, double dt,
                                  const ConsistencyOptions& o = {}) {
    const int n = std::max(1, static_cast<int>(std::lround(o.t_end / dt)));
    const double h = o.t_end / n;
    Integrator a(g0.grid_ptr(), scfg.mode, lift, scfg), b(g0.grid_ptr(), scfg.mode, lift, scfg);
    const auto ta = integrate_trajectory(a, g0, h, n);
    const auto tb = integrate_trajectory(b, g0, 0.5 * h, 2 * n);
    double d = 0.0;
    for (int k = 0; k <= n; ++k)
        d = std::max(d, detail::relative_x_distance(ta[static_cast<std::size_t>(k)], tb[static_cast<std::size_t>(2 * k)],
                                                    o.tau, o.alpha, o.m_max));
    return d;
}

/// Cubic Lagrange interpolation of a normal profile at zeta; zero beyond the last node.
inline double interpolate_profile(const Grid& g, std::span<const double> f, double zeta) {
    const auto z = g.nodes();
    if (zeta >= z.back()) return 0.0;
    const auto it = std::upper_bound(z.begin(), z.end(), zeta);
    int j = static_cast<int>(it - z.begin()) - 1;
    j = std::clamp(j - 1, 0, g.nz() - 4);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        double l = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) l *= (zeta - z[static_cast<std::size_t>(j + b)]) / (z[static_cast<std::size_t>(j + a)] - z[static_cast<std::size_t>(j + b)]);
        acc += l * f[static_cast<std::size_t>(j + a)];
    }
    return acc;
}

/// Runs the same datum in SelfSimilarZ and PhysicalY coordinates with the same
/// dt and compares at t_end on the self-similar nodes (relative weighted L^2).
inline double coordinate_mode_distance(GridConfig cfg, const InitialData& init, const SolverConfig& scfg,
                                       const LiftParams& lift, double t_end, double alpha) {
    cfg.mode = CoordinateMode::SelfSimilarZ;
    const GridPtr gs = make_grid(cfg);
    cfg.mode = CoordinateMode::PhysicalY;
    const GridPtr gp = make_grid(cfg);
    const int n = std::max(1, static_cast<int>(std::lround(t_end / scfg.dt)));
    const double h = t_end / n;
    Integrator is(gs, scfg.mode, lift, scfg), ip(gp, scfg.mode, lift, scfg);
    const Field a = to_field(integrate_trajectory(is, initial_state(gs, init, 1.0, 40), h, n).back());
    const Field b = to_field(integrate_trajectory(ip, initial_state(gp, init, 1.0, 40), h, n).back());
    Field bi(gs, a.time());
    const double s = gs->scale(a.time());
    for (int i = 0; i < gs->nx(); ++i)
        for (int j = 0; j < gs->nz(); ++j) bi(i, j) = interpolate_profile(*gp, b.column(i), s * gs->nodes()[static_cast<std::size_t>(j)]);
    return detail::safe_ratio(l2_weighted(a - bi, alpha), l2_weighted(a, alpha));
}

struct CrossCheck {
    double t = 0.0;
    /// Relative weighted L^2 distance between g_from_u(u(t)) and g(t).
    double distance = 0.0;
    double norm_g = 0.0;
};

/// Twin runs from one velocity datum: the velocity form evolves u, the good
/// unknown form evolves g = g_from_u(u0). Both use fixed steps of scfg.dt.
inline CrossCheck crosscheck(const GridPtr& grid, const InitialData& init, const SolverConfig& scfg, const LiftParams& lift,
                             double t_end, double alpha) {
    Spectrum u0 = to_spectrum(initial_velocity(grid, init));
    u0 = project_state(u0);
    for (int k = 0; k < u0.nk(); ++k) u0(k, 0) = 0.0;
    const Spectrum g0 = project_state(to_spectrum(g_from_u(to_field(u0))));
    const int n = std::max(1, static_cast<int>(std::lround(t_end / scfg.dt)));
    const double h = t_end / n;
    SolverConfig c = scfg;
    c.mode = SolverMode::VelocityForm;
    c.nu = 0.0;
    Integrator iu(grid, SolverMode::VelocityForm, lift, c);
    c.mode = SolverMode::GoodUnknown;
    Integrator ig(grid, SolverMode::GoodUnknown, lift, c);
    Field u = to_field(integrate_trajectory(iu, u0, h, n).back());
    for (int i = 0; i < grid->nx(); ++i) u(i, 0) = 0.0;
    const Field g = to_field(integrate_trajectory(ig, g0, h, n).back());
    CrossCheck out;
    out.t = g.time();
    out.norm_g = l2_weighted(g, alpha);
    out.distance = detail::safe_ratio(l2_weighted(g_from_u(u) - g, alpha), out.norm_g);
    return out;
}

}  // namespace prandtl
