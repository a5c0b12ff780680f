#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "prandtl/banded.hpp"
#include "prandtl/fit.hpp"
#include "prandtl/good_unknown.hpp"
#include "prandtl/lift.hpp"
#include "prandtl/norms.hpp"
#include "prandtl/radius.hpp"
#include "prandtl/spectral.hpp"
#include "prandtl/stencil.hpp"

namespace prandtl {

enum class SolverMode { GoodUnknown, GoodUnknownNu, PicardTwoStep, VelocityForm };

inline std::string to_string(SolverMode m) {
    switch (m) {
        case SolverMode::GoodUnknown: return "good_unknown";
        case SolverMode::GoodUnknownNu: return "good_unknown_nu";
        case SolverMode::PicardTwoStep: return "picard_two_step";
        case SolverMode::VelocityForm: return "velocity_form";
    }
    return "?";
}

inline SolverMode solver_mode_from_string(const std::string& s) {
    for (auto m : {SolverMode::GoodUnknown, SolverMode::GoodUnknownNu, SolverMode::PicardTwoStep, SolverMode::VelocityForm})
        if (s == to_string(m)) return m;
    throw Error(ErrorKind::Config, "type-mismatch",
                "solver.mode must be good_unknown, good_unknown_nu, picard_two_step or velocity_form, got '" + s + "'");
}

struct SolverConfig {
    SolverMode mode = SolverMode::GoodUnknown;
    /// Tangential dissipation; required > 0 for GoodUnknownNu and PicardTwoStep.
    double nu = 0.0;
    double dt = 0.05;
    double t_end = 100.0;
    /// Advective safety factor.
    double cfl = 0.4;
    double snapshot_every = 10.0;
    double csv_every = 0.5;
    int picard_iters = 8;
    /// Extra explicit-stage re-evaluations; 1 is Heun, many converge to the trapezoid rule.
    int corrector_iters = 1;
    int max_halvings = 8;
    /// Window of the decay fit; a non-positive fit_t1 means t_end.
    double fit_t0 = 10.0;
    double fit_t1 = 0.0;
};

inline void validate_solver_config(const SolverConfig& c, const Grid& g) {
    auto fail = [](const std::string& code, const std::string& what) { throw Error(ErrorKind::Config, code, what); };
    if (!(c.dt > 0.0)) fail("solver-dt", "solver.dt must be positive");
    if (!(c.t_end > 0.0)) fail("solver-t-end", "solver.t_end must be positive");
    if (!(c.cfl > 0.0)) fail("solver-cfl", "solver.cfl must be positive");
    if (!(c.snapshot_every > 0.0) || !(c.csv_every > 0.0)) fail("solver-output", "output intervals must be positive");
    if (c.corrector_iters < 1) fail("solver-corrector", "solver.corrector_iters must be >= 1");
    if (c.max_halvings < 0) fail("solver-halvings", "solver.max_halvings must be >= 0");
    if (!(c.nu >= 0.0)) fail("solver-nu", "solver.nu must be >= 0");
    const bool needs_nu = c.mode == SolverMode::GoodUnknownNu || c.mode == SolverMode::PicardTwoStep;
    if (needs_nu && !(c.nu > 0.0)) fail("solver-nu", "solver.nu must be > 0 in the dissipative modes");
    if (!needs_nu && c.nu != 0.0) fail("solver-nu", "solver.nu is only used by the dissipative modes");
    if (needs_nu && g.dealias_cutoff() * c.nu < 1.0)
        fail("solver-nu", "the dissipative modes need n_x / 3 >= 1 / nu; refine grid.nx or raise solver.nu");
    if (c.mode == SolverMode::PicardTwoStep) {
        if (c.picard_iters < 3) fail("solver-picard", "solver.picard_iters must be >= 3");
        if (c.t_end > 1.0) fail("solver-picard", "the Picard iteration is a short-time scheme; use t_end <= 1");
    }
}

// ---------------------------------------------------------------------------
// Initial data

enum class InitFamily { GaussianBump, SignChanging, Custom };

inline std::string to_string(InitFamily f) {
    switch (f) {
        case InitFamily::GaussianBump: return "gaussian_bump";
        case InitFamily::SignChanging: return "sign_changing";
        case InitFamily::Custom: return "custom";
    }
    return "?";
}

inline InitFamily init_family_from_string(const std::string& s) {
    for (auto f : {InitFamily::GaussianBump, InitFamily::SignChanging, InitFamily::Custom})
        if (s == to_string(f)) return f;
    throw Error(ErrorKind::Config, "type-mismatch", "init.family must be gaussian_bump, sign_changing or custom");
}

/// u0 = amplitude * b(x) * eta(z) with the periodised bump
/// b(x) = exp(-((l_x/pi) sin(pi x / l_x))^2 / width^2).
/// GaussianBump: eta = z e^{-z^2/4}, so g0 = amplitude * b * e^{-z^2/4}.
/// SignChanging: eta = z (1 - z^2/c) e^{-z^2/4}, whose vorticity changes sign.
struct InitialData {
    InitFamily family = InitFamily::GaussianBump;
    double amplitude = 0.1;
    double x_width = 1.0;
    double profile_c = 2.0;
    /// Rescale g0 so that ||g0||_{X_{2 tau0, 1/2}} equals the amplitude.
    bool normalize = false;
    /// g0 for the Custom family.
    std::optional<Field> custom;
};

inline double periodic_bump(double x, double lx, double width) {
    const double s = (lx / std::numbers::pi) * std::sin(std::numbers::pi * x / lx);
    return std::exp(-s * s / (width * width));
}

/// Perturbation velocity u0 at t = 0.
inline Field initial_velocity(const GridPtr& grid, const InitialData& init) {
    if (init.family == InitFamily::Custom) return recover_u(*init.custom);
    const double lx = grid->lx();
    return Field::sample(grid, 0.0, [&](double x, double z) {
        double eta = z * std::exp(-0.25 * z * z);
        if (init.family == InitFamily::SignChanging) eta *= 1.0 - z * z / init.profile_c;
        return init.amplitude * periodic_bump(x, lx, init.x_width) * eta;
    });
}

/// Drops modes above the dealiasing cutoff and pins the Dirichlet row.
inline Spectrum project_state(Spectrum s) {
    s.truncate_above(s.grid().dealias_cutoff());
    const int top = s.grid().nz() - 1;
    for (int k = 0; k < s.nk(); ++k) s(k, top) = 0.0;
    return s;
}

/// g0 = g_from_u(u0), projected onto the resolved modes and optionally normalised.
inline Spectrum initial_state(const GridPtr& grid, const InitialData& init, double tau0, int m_max) {
    if (init.family == InitFamily::Custom && !init.custom)
        throw Error(ErrorKind::Config, "init-snapshot", "init.family = custom needs init.snapshot");
    if (init.family != InitFamily::Custom && !(init.x_width > 0.0))
        throw Error(ErrorKind::Config, "init-width", "init.x_width must be positive");
    if (init.family == InitFamily::SignChanging && !(init.profile_c > 0.0))
        throw Error(ErrorKind::Config, "init-profile", "init.profile_c must be positive");
    Field g0 = init.family == InitFamily::Custom ? *init.custom : g_from_u(initial_velocity(grid, init));
    if (!(*g0.grid_ptr() == *grid))
        throw Error(ErrorKind::Config, "init-snapshot", "initial snapshot grid differs from the configured grid");
    g0.set_time(0.0);
    Spectrum s = project_state(to_spectrum(g0));
    if (init.normalize) {
        LadderOptions opt;
        opt.m_max = m_max;
        const double x2 = seminorm_ladder(s, 2.0 * tau0, 0.5, opt).sums.X;
        if (x2 > 0.0) s *= init.amplitude / x2;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Implicit normal operator

/// Per-mode linear operator
///   L_k f = s^{-2} f'' + (s'/s) zeta f' - c f - i k kappa phi f - nu k^2 f
/// in the stored coordinate zeta (y = s(t) zeta), with c = 1/<t> for g and 0
/// for the velocity. Rows are fourth order with parity ghosts at the wall;
/// the z_max row is homogeneous Dirichlet and, for odd parity, so is the wall row.
class NormalOperator {
public:
    NormalOperator(GridPtr grid, double kappa, double nu, Parity parity, bool reaction)
        : grid_(std::move(grid)), kappa_(kappa), nu_(nu), parity_(parity), reaction_(reaction) {
        for (int j = 0; j + 1 < grid_->nz(); ++j) rows_.push_back(normal_stencil_row(*grid_, j, parity_));
        lu_.assign(static_cast<std::size_t>(grid_->dealias_cutoff() + 1), BandedLU(grid_->nz() - 1));
    }

    const Grid& grid() const noexcept { return *grid_; }
    Parity parity() const noexcept { return parity_; }

    Spectrum apply(const Spectrum& f) const {
        const double t = f.time();
        const Coefficients c = coefficients(t);
        Spectrum out(f.grid_ptr(), t);
        const int n = grid_->nz() - 1;
        for (int k = 0; k <= grid_->dealias_cutoff(); ++k) {
            const auto in = f.column(k);
            auto o = out.column(k);
            const cplx shift = shift_for(k, c);
            for (int j = first_row(); j < n; ++j) {
                const auto& r = rows_[static_cast<std::size_t>(j)];
                cplx acc = shift_at(shift, k, c, j) * in[static_cast<std::size_t>(j)];
                for (int e = 0; e < r.size; ++e) {
                    const int col = r.col[static_cast<std::size_t>(e)];
                    if (col >= n) continue;
                    acc += entry(r, e, j, c) * in[static_cast<std::size_t>(col)];
                }
                o[static_cast<std::size_t>(j)] = acc;
            }
        }
        return out;
    }

    /// Overwrites rhs with (I - dt/2 L(t_new))^{-1} rhs.
    void solve(Spectrum& rhs, double t_new, double dt) {
        if (!(t_new == t_key_ && dt == dt_key_)) factor(t_new, dt);
        const int n = grid_->nz() - 1;
        for (int k = 0; k < rhs.nk(); ++k) {
            auto col = rhs.column(k);
            if (k > grid_->dealias_cutoff()) {
                for (auto& v : col) v = 0.0;
                continue;
            }
            if (parity_ == Parity::Odd) col[0] = 0.0;
            lu_[static_cast<std::size_t>(k)].solve(col.first(static_cast<std::size_t>(n)));
            col[static_cast<std::size_t>(n)] = 0.0;
        }
        rhs.set_time(t_new);
    }

private:
    struct Coefficients {
        double a = 1.0, b = 0.0, c = 0.0;
        std::vector<double> phi;
    };

    Coefficients coefficients(double t) const {
        Coefficients c;
        const double s = grid_->scale(t);
        c.a = 1.0 / (s * s);
        c.b = grid_->scale_rate(t);
        c.c = reaction_ ? 1.0 / bracket_t(t) : 0.0;
        c.phi.resize(static_cast<std::size_t>(grid_->nz()));
        for (int j = 0; j < grid_->nz(); ++j) c.phi[static_cast<std::size_t>(j)] = lift_phi(t, grid_->y(t, j));
        return c;
    }

    int first_row() const noexcept { return parity_ == Parity::Odd ? 1 : 0; }

    cplx shift_for(int k, const Coefficients& c) const {
        const double kk = grid_->wavenumber(k);
        return cplx(-c.c - nu_ * kk * kk, 0.0);
    }
    cplx shift_at(cplx shift, int k, const Coefficients& c, int j) const {
        return shift - cplx(0.0, grid_->wavenumber(k) * kappa_ * c.phi[static_cast<std::size_t>(j)]);
    }
    double entry(const StencilRow& r, int e, int j, const Coefficients& c) const {
        const auto ue = static_cast<std::size_t>(e);
        return c.a * r.d2[ue] + c.b * grid_->nodes()[static_cast<std::size_t>(j)] * r.d1[ue];
    }

    void factor(double t_new, double dt) {
        const Coefficients c = coefficients(t_new);
        const int n = grid_->nz() - 1;
        for (int k = 0; k <= grid_->dealias_cutoff(); ++k) {
            BandedLU& lu = lu_[static_cast<std::size_t>(k)];
            lu.clear();
            const cplx shift = shift_for(k, c);
            if (parity_ == Parity::Odd) lu.at(0, 0) = 1.0;
            for (int j = first_row(); j < n; ++j) {
                const auto& r = rows_[static_cast<std::size_t>(j)];
                lu.at(j, j) += 1.0 - 0.5 * dt * shift_at(shift, k, c, j);
                for (int e = 0; e < r.size; ++e) {
                    const int col = r.col[static_cast<std::size_t>(e)];
                    if (col >= n || (parity_ == Parity::Odd && col == 0)) continue;
                    lu.at(j, col) -= 0.5 * dt * entry(r, e, j, c);
                }
            }
            lu.factor();
        }
        t_key_ = t_new;
        dt_key_ = dt;
    }

    GridPtr grid_;
    double kappa_, nu_;
    Parity parity_;
    bool reaction_;
    std::vector<StencilRow> rows_;
    std::vector<BandedLU> lu_;
    double t_key_ = std::numeric_limits<double>::quiet_NaN();
    double dt_key_ = std::numeric_limits<double>::quiet_NaN();
};

// ---------------------------------------------------------------------------
// Explicit terms

namespace detail {

inline Field multiply(const Field& a, const Field& b) {
    Field out = a;
    auto o = out.values();
    const auto bv = b.values();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] *= bv[n];
    return out;
}

inline Spectrum dx_spectrum(Spectrum s) {
    apply_dx_power(s, 1);
    return s;
}

}  // namespace detail

/// -U(a) d_x b - V(b) d_y a + V(b) U(a) / (2<t>), dealiased, with the z_max row
/// pinned. With a = b = g this is the nonlinear part of the g equation.
inline Spectrum nonlinear_pair(const Spectrum& a, const Spectrum& b) {
    const double t = a.time();
    const Spectrum ua = recover_u(a);
    const Field u = to_field(ua);
    const Field v = to_field(recover_v(b));
    const Field bx = to_field(detail::dx_spectrum(b));
    const Field ay = to_field(normal_derivative_spectrum(a));
    Field n(a.grid_ptr(), t);
    auto o = n.values();
    const auto uu = u.values(), vv = v.values(), bxv = bx.values(), ayv = ay.values();
    const double h = 0.5 / bracket_t(t);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = -uu[i] * bxv[i] - vv[i] * ayv[i] + h * vv[i] * uu[i];
    return project_state(to_spectrum(n));
}

inline Spectrum nonlinear_good_unknown(const Spectrum& g) { return nonlinear_pair(g, g); }

/// Explicit tendency of the velocity form: -u d_x u - v d_y u - kappa v d_y phi.
inline Spectrum nonlinear_velocity(const Spectrum& u_hat, double kappa) {
    const Grid& grid = u_hat.grid();
    const double t = u_hat.time();
    const double s = grid.scale(t);
    const Field u = to_field(u_hat);
    const Field v = to_field(velocity_v_from_u(u_hat));
    const Field ux = to_field(detail::dx_spectrum(u_hat));
    Spectrum uy_hat(u_hat.grid_ptr(), t);
    for (int k = 0; k < u_hat.nk(); ++k) {
        normal_derivative<cplx>(grid, u_hat.column(k), Parity::Odd, uy_hat.column(k));
        for (auto& c : uy_hat.column(k)) c /= s;
    }
    const Field uy = to_field(uy_hat);
    Field n(u_hat.grid_ptr(), t);
    for (int i = 0; i < grid.nx(); ++i)
        for (int j = 0; j < grid.nz(); ++j) {
            const double phy = lift_phi_dy(t, grid.y(t, j));
            n(i, j) = -u(i, j) * ux(i, j) - v(i, j) * uy(i, j) - kappa * v(i, j) * phy;
        }
    Spectrum out = project_state(to_spectrum(n));
    for (int k = 0; k < out.nk(); ++k) out(k, 0) = 0.0;
    return out;
}

/// The non-diffusive part of the g equation in physical variables,
/// -(u + kappa phi) d_x g - v d_y g - g/<t> + v u / (2<t>), with u, v recovered from g.
/// The stepper splits this differently (the lift advection and the damping are
/// treated implicitly); this form is exposed for inspection and tests.
inline Field rhs_good_unknown(const Field& g, const LiftParams& params) {
    if (!g.all_finite()) throw Error(ErrorKind::Numerical, "non-finite", "rhs_good_unknown: input has NaN/Inf");
    const Grid& grid = g.grid();
    const double t = g.time();
    const Spectrum gs = to_spectrum(g);
    Field out = to_field(nonlinear_good_unknown(project_state(gs)));
    const Field gx = to_field(detail::dx_spectrum(gs));
    for (int i = 0; i < grid.nx(); ++i)
        for (int j = 0; j < grid.nz(); ++j)
            out(i, j) += -params.kappa * lift_phi(t, grid.y(t, j)) * gx(i, j) - g(i, j) / bracket_t(t);
    if (!out.all_finite()) throw Error(ErrorKind::Numerical, "non-finite", "rhs_good_unknown produced NaN/Inf");
    return out;
}

/// Explicit tendency of the velocity form in physical variables,
/// -kappa phi d_x u - kappa v d_y phi - u d_x u - v d_y u.
inline Field rhs_velocity_form(const Field& u, const LiftParams& params) {
    const Grid& grid = u.grid();
    const double t = u.time();
    const double scale_u = std::max(1.0, u.max_abs());
    for (int i = 0; i < grid.nx(); ++i)
        if (std::abs(u(i, 0)) > 1e-10 * scale_u)
            throw Error(ErrorKind::Config, "boundary-row", "rhs_velocity_form: u(x, 0) must vanish");
    const Spectrum us = to_spectrum(u);
    Field out = to_field(nonlinear_velocity(project_state(us), params.kappa));
    const Field ux = to_field(detail::dx_spectrum(us));
    for (int i = 0; i < grid.nx(); ++i)
        for (int j = 0; j < grid.nz(); ++j) out(i, j) -= params.kappa * lift_phi(t, grid.y(t, j)) * ux(i, j);
    if (!out.all_finite()) throw Error(ErrorKind::Numerical, "non-finite", "rhs_velocity_form produced NaN/Inf");
    return out;
}

// ---------------------------------------------------------------------------
// Time stepping

/// Optional source term added to the explicit part, evaluated at time t.
using ForcingFn = std::function<Spectrum(double t)>;

struct StepResult {
    double dt = 0.0;
    int halvings = 0;
};

/// One IMEX step: Crank-Nicolson for the per-mode linear operator and Heun
/// (optionally iterated) for the explicit terms, sharing one factorisation:
///   (I - dt/2 L1) g* = (I + dt/2 L0) g + dt N(g)
///   (I - dt/2 L1) g1 = (I + dt/2 L0) g + dt/2 (N(g) + N(g*)).
class Integrator {
public:
    Integrator(GridPtr grid, SolverMode mode, LiftParams lift, const SolverConfig& cfg, ForcingFn forcing = {})
        : grid_(grid), mode_(mode), lift_(lift), cfg_(cfg), forcing_(std::move(forcing)),
          op_(grid, lift.kappa, mode == SolverMode::VelocityForm ? 0.0 : cfg.nu,
              mode == SolverMode::VelocityForm ? Parity::Odd : Parity::Even, mode != SolverMode::VelocityForm) {}

    SolverMode mode() const noexcept { return mode_; }

    Spectrum explicit_part(const Spectrum& s) const {
        Spectrum n = mode_ == SolverMode::VelocityForm ? nonlinear_velocity(s, lift_.kappa) : nonlinear_good_unknown(s);
        if (forcing_) n += project_state(forcing_(s.time()));
        return n;
    }

    /// Largest dt allowed by the advective CFL condition at the current state.
    double cfl_limit(const Spectrum& s) const {
        const double t = s.time();
        const Grid& g = *grid_;
        const Spectrum u_hat = mode_ == SolverMode::VelocityForm ? s : recover_u(s);
        const Field u = to_field(u_hat);
        const Field v = to_field(velocity_v_from_u(u_hat));
        double hmin = std::numeric_limits<double>::infinity();
        for (int j = 0; j + 1 < g.nz(); ++j)
            hmin = std::min(hmin, g.nodes()[static_cast<std::size_t>(j + 1)] - g.nodes()[static_cast<std::size_t>(j)]);
        hmin *= g.scale(t);
        double rate = 0.0;
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.nz(); ++j) {
                const double horiz = std::abs(u(i, j) + lift_.kappa * lift_phi(t, g.y(t, j))) / g.dx();
                rate = std::max(rate, horiz + std::abs(v(i, j)) / hmin);
            }
        return rate > 0.0 ? cfg_.cfl / rate : std::numeric_limits<double>::infinity();
    }

    /// Plain step of size dt without CFL control.
    Spectrum step_fixed(const Spectrum& s, double dt) {
        const double t = s.time();
        Spectrum base = s;
        {
            Spectrum l0 = op_.apply(s);
            l0 *= 0.5 * dt;
            base += l0;
        }
        const Spectrum n0 = explicit_part(s);
        Spectrum next = base + dt * n0;
        op_.solve(next, t + dt, dt);
        for (int it = 0; it < cfg_.corrector_iters; ++it) {
            Spectrum rhs = base + (0.5 * dt) * (n0 + explicit_part(next));
            op_.solve(rhs, t + dt, dt);
            next = std::move(rhs);
        }
        if (!next.all_finite())
            throw Error(ErrorKind::Numerical, "non-finite", "step produced NaN/Inf at t = " + std::to_string(t + dt));
        return next;
    }

    /// Step with CFL control: dt is halved until admissible, at most max_halvings times.
    StepResult step(Spectrum& s, double dt) {
        const double limit = cfl_limit(s);
        StepResult r;
        r.dt = dt;
        while (r.dt > limit) {
            if (r.halvings == cfg_.max_halvings)
                throw Error(ErrorKind::Numerical, "cfl-abort",
                            "CFL limit " + std::to_string(limit) + " not met after " + std::to_string(r.halvings) + " halvings");
            r.dt *= 0.5;
            ++r.halvings;
        }
        s = step_fixed(s, r.dt);
        return r;
    }

    /// Linear part only (the semigroup S(t) of the dissipative system).
    Spectrum step_linear(const Spectrum& s, double dt, const Spectrum* f0 = nullptr, const Spectrum* f1 = nullptr) {
        Spectrum rhs = s;
        Spectrum l0 = op_.apply(s);
        l0 *= 0.5 * dt;
        rhs += l0;
        if (f0 && f1) rhs += (0.5 * dt) * (*f0 + *f1);
        op_.solve(rhs, s.time() + dt, dt);
        return rhs;
    }

private:
    GridPtr grid_;
    SolverMode mode_;
    LiftParams lift_;
    SolverConfig cfg_;
    ForcingFn forcing_;
    NormalOperator op_;
};

/// One CFL-controlled step of the g equation on a physical-space field.
inline Field step_imex(const Field& g, double dt, const SolverConfig& cfg, const LiftParams& lift) {
    Integrator integ(g.grid_ptr(), cfg.mode, lift, cfg);
    Spectrum s = project_state(to_spectrum(g));
    integ.step(s, dt);
    return to_field(s);
}

// ---------------------------------------------------------------------------
// Simulation driver

enum class Termination { TEnd, RadiusCollapse, NaN, CFLAbort };

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::TEnd: return "t_end";
        case Termination::RadiusCollapse: return "radius_collapse";
        case Termination::NaN: return "nan";
        case Termination::CFLAbort: return "cfl_abort";
    }
    return "?";
}

struct NormRow {
    double t = 0, tau = 0, X = 0, Y = 0, D = 0, Z = 0, B = 0, tildeB = 0, tail_ratio = 0, decay_compensated = 0;
};

struct RadiusRow {
    double t = 0, tau = 0, tau_lower_bound = 0, B_norm = 0, holder = 0;
    bool bound_crossed = false;
};

struct RunReport {
    Termination termination = Termination::TEnd;
    std::string message;
    std::vector<NormRow> norms;
    std::vector<RadiusRow> radius;
    std::vector<double> snapshot_times;
    double t_final = 0.0;
    double tau_final = 0.0;
    long steps = 0;
    long halvings = 0;
    double max_tail_ratio = 0.0;
    double max_compensated = 0.0;
    std::optional<DecayFit> decay;
    std::string decay_note;
    bool radius_floor_ok = true;
    double radius_floor_first_violation = -1.0;
    bool half_radius_ok = true;
    double holder_modulus = 0.0;
    double C0 = 0.0, C2 = 0.0, alpha = 0.0, delta = 0.0;
    Spectrum final_state;
};

struct RunParams {
    LiftParams lift;
    int m_max = 20;
};

struct RunObserver {
    std::function<void(const Field& g, double tau)> on_snapshot;
    std::function<void(const NormRow&, const RadiusRow&)> on_row;
};

/// Advances g and tau jointly from g0 (a projected spectrum at t = 0).
///
/// The radius uses a trapezoid average of ||g||_B at the start of the step and at
/// the step's end (evaluated at the Euler-predicted radius). Runs end at t_end,
/// on radius collapse, on NaN, or when the CFL control gives up; the report is
/// complete in every case.
inline RunReport run_simulation(const Spectrum& g0, const SolverConfig& scfg, RadiusState radius, const RunParams& params,
                                const RunObserver& observer = {}) {
    const GridPtr grid = g0.grid_ptr();
    validate_solver_config(scfg, *grid);
    if (scfg.mode != SolverMode::GoodUnknown && scfg.mode != SolverMode::GoodUnknownNu)
        throw Error(ErrorKind::Config, "solver-mode", "run_simulation evolves g; use good_unknown or good_unknown_nu");
    LadderOptions lad;
    lad.m_max = params.m_max;
    // initial data must be analytic with radius 2 tau0
    seminorm_ladder(g0, 2.0 * radius.tau0, 0.5, lad);
    lad.check_truncation = false;

    const double alpha = params.lift.alpha;
    RunReport rep;
    rep.C0 = radius.C0;
    rep.C2 = radius.C2;
    rep.alpha = alpha;
    rep.delta = radius.delta;
    HolderModulus holder;
    Integrator integ(grid, scfg.mode, params.lift, scfg);

    Spectrum g = g0;
    double t = 0.0;
    NormProfile prof = seminorm_ladder(g, radius.tau, alpha, lad);

    auto emit_row = [&]() {
        NormRow n;
        n.t = t;
        n.tau = radius.tau;
        n.X = prof.sums.X;
        n.Y = prof.sums.Y;
        n.D = prof.sums.D;
        n.Z = prof.sums.Z;
        n.B = prof.sums.B;
        n.tildeB = prof.sums.tildeB;
        n.tail_ratio = prof.tail_ratio;
        n.decay_compensated = std::pow(bracket_t(t), 1.25 - radius.delta) * prof.sums.X;
        RadiusRow r;
        r.t = t;
        r.tau = radius.tau;
        const LowerBound lb = tau_lower_bound(t, radius);
        r.tau_lower_bound = lb.value;
        r.bound_crossed = lb.crossed;
        r.B_norm = prof.sums.B;
        r.holder = holder.add(t, radius.tau);
        if (radius.tau < lb.value) {
            if (rep.radius_floor_ok) rep.radius_floor_first_violation = t;
            rep.radius_floor_ok = false;
        }
        if (radius.tau < 0.5 * radius.tau0) rep.half_radius_ok = false;
        rep.max_compensated = std::max(rep.max_compensated, n.decay_compensated);
        rep.norms.push_back(n);
        rep.radius.push_back(r);
        if (observer.on_row) observer.on_row(n, r);
    };
    auto emit_snapshot = [&]() {
        rep.snapshot_times.push_back(t);
        if (observer.on_snapshot) observer.on_snapshot(to_field(g), radius.tau);
    };

    emit_row();
    emit_snapshot();
    long csv_index = 1, snap_index = 1;
    const double eps_t = 1e-9 * scfg.dt;
    try {
        while (t < scfg.t_end - eps_t) {
            const double next_csv = std::min(scfg.t_end, csv_index * scfg.csv_every);
            const double next_snap = std::min(scfg.t_end, snap_index * scfg.snapshot_every);
            const double target = std::min(next_csv, next_snap);
            double dt = std::min(scfg.dt, target - t);
            if (target - (t + dt) < eps_t) dt = target - t;

            const double B0 = prof.sums.B;
            const RadiusState before = radius;
            const StepResult sr = integ.step(g, dt);
            rep.halvings += sr.halvings;
            const double t_new = (sr.dt == dt && dt == target - t) ? target : t + sr.dt;
            g.set_time(t_new);
            const RadiusState predicted = step_tau(before, B0, sr.dt);
            const double B1 = seminorm_ladder(g, predicted.tau, alpha, lad).sums.B;
            radius = step_tau(before, 0.5 * (B0 + B1), sr.dt);
            t = t_new;
            ++rep.steps;
            prof = seminorm_ladder(g, radius.tau, alpha, lad);
            rep.max_tail_ratio = std::max(rep.max_tail_ratio, prof.tail_ratio);
            radius.history.push_back({t, radius.tau, prof.sums.B});

            if (std::abs(t - next_csv) <= eps_t) {
                emit_row();
                ++csv_index;
            }
            if (std::abs(t - next_snap) <= eps_t) {
                emit_snapshot();
                ++snap_index;
            }
        }
        rep.termination = Termination::TEnd;
    } catch (const Error& e) {
        if (e.code() == "radius-collapse") rep.termination = Termination::RadiusCollapse;
        else if (e.code() == "non-finite") rep.termination = Termination::NaN;
        else if (e.code() == "cfl-abort") rep.termination = Termination::CFLAbort;
        else throw;
        rep.message = e.what();
        if (rep.norms.empty() || rep.norms.back().t != t) emit_row();
    }
    if (rep.snapshot_times.empty() || rep.snapshot_times.back() != t) emit_snapshot();
    rep.t_final = t;
    rep.tau_final = radius.tau;
    rep.holder_modulus = holder.value();
    rep.final_state = g;

    const double t1 = scfg.fit_t1 > 0.0 ? scfg.fit_t1 : scfg.t_end;
    std::vector<double> ts, xs;
    for (const auto& n : rep.norms) {
        ts.push_back(n.t);
        xs.push_back(n.X);
    }
    try {
        rep.decay = fit_decay(ts, xs, scfg.fit_t0, t1);
    } catch (const Error& e) {
        rep.decay_note = e.what();
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Fixed-step trajectories (no radius coupling), used by the cross-checks

/// States at t = 0, dt, 2 dt, ..., n_steps dt.
inline std::vector<Spectrum> integrate_trajectory(Integrator& integ, Spectrum s, double dt, int n_steps) {
    std::vector<Spectrum> out;
    out.reserve(static_cast<std::size_t>(n_steps + 1));
    out.push_back(s);
    for (int n = 0; n < n_steps; ++n) {
        const double t_next = (n + 1) * dt;
        s = integ.step_fixed(s, dt);
        s.set_time(t_next);
        out.push_back(s);
    }
    return out;
}

/// sup_t <t>^{5/4 - delta} ||a(t) - b(t)||_{X_tau} over two trajectories on the same time levels.
inline double weighted_trajectory_distance(const std::vector<Spectrum>& a, const std::vector<Spectrum>& b, double tau,
                                           double alpha, double delta, int m_max) {
    LadderOptions lad;
    lad.m_max = m_max;
    lad.check_truncation = false;
    double d = 0.0;
    for (std::size_t n = 0; n < std::min(a.size(), b.size()); ++n) {
        const double x = seminorm_ladder(a[n] - b[n], tau, alpha, lad).sums.X;
        d = std::max(d, std::pow(bracket_t(a[n].time()), 1.25 - delta) * x);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Two-step Picard iteration

struct PicardReport {
    /// A[n] = sup_t <t>^{5/4-delta} ||g^(n) - g^(n-1)||_{X_tau}; A[0] = 0 and A[1] = 0.
    std::vector<double> A;
    /// A[n] / (A[n-1] + A[n-2]) for n >= 2 (NaN when the denominator vanishes).
    std::vector<double> pair_ratio;
    /// A[n] / A[n-1].
    std::vector<double> step_ratio;
    bool diverged = false;
    std::string note;
    /// Distance of the last iterate to the IMEX solution with converged corrector.
    double reference_distance = std::numeric_limits<double>::quiet_NaN();
    std::vector<Spectrum> last;
};

/// Iterates the two-step scheme on [0, t_end]. g^(0) = g^(1) = S(t) g0 and
/// g^(n) solves the linear dissipative problem forced by
/// -U(g^(n-2)) d_x g^(n-1) - V(g^(n-1)) d_y g^(n-2) + V(g^(n-1)) U(g^(n-2)) / (2<t>).
inline PicardReport run_picard(const Spectrum& g0, const SolverConfig& scfg, const RunParams& params, double tau,
                               double delta, bool with_reference = true) {
    const GridPtr grid = g0.grid_ptr();
    validate_solver_config(scfg, *grid);
    if (scfg.mode != SolverMode::PicardTwoStep)
        throw Error(ErrorKind::Config, "solver-mode", "run_picard needs solver.mode = picard_two_step");
    const int n_steps = std::max(1, static_cast<int>(std::lround(scfg.t_end / scfg.dt)));
    const double dt = scfg.t_end / n_steps;
    SolverConfig lin = scfg;
    lin.mode = SolverMode::GoodUnknownNu;
    Integrator integ(grid, SolverMode::GoodUnknownNu, params.lift, lin);

    auto linear_run = [&](const std::vector<Spectrum>* a, const std::vector<Spectrum>* b) {
        std::vector<Spectrum> out;
        out.reserve(static_cast<std::size_t>(n_steps + 1));
        out.push_back(g0);
        std::optional<Spectrum> f_prev;
        if (a) f_prev = nonlinear_pair((*a)[0], (*b)[0]);
        for (int n = 0; n < n_steps; ++n) {
            Spectrum next;
            if (a) {
                Spectrum f_next = nonlinear_pair((*a)[static_cast<std::size_t>(n + 1)], (*b)[static_cast<std::size_t>(n + 1)]);
                next = integ.step_linear(out.back(), dt, &*f_prev, &f_next);
                f_prev = std::move(f_next);
            } else {
                next = integ.step_linear(out.back(), dt);
            }
            next.set_time((n + 1) * dt);
            if (!next.all_finite()) throw Error(ErrorKind::Numerical, "non-finite", "Picard iterate produced NaN/Inf");
            out.push_back(std::move(next));
        }
        return out;
    };

    PicardReport rep;
    std::vector<Spectrum> older = linear_run(nullptr, nullptr);  // g^(0)
    std::vector<Spectrum> old = older;                            // g^(1)
    rep.A = {0.0, 0.0};
    rep.pair_ratio = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    rep.step_ratio = rep.pair_ratio;
    int growth = 0;
    for (int n = 2; n <= scfg.picard_iters; ++n) {
        std::vector<Spectrum> cur = linear_run(&older, &old);
        const double a = weighted_trajectory_distance(cur, old, tau, params.lift.alpha, delta, params.m_max);
        const auto un = static_cast<std::size_t>(n);
        rep.A.push_back(a);
        const double den = rep.A[un - 1] + rep.A[un - 2];
        rep.pair_ratio.push_back(den > 0.0 ? a / den : std::numeric_limits<double>::quiet_NaN());
        rep.step_ratio.push_back(rep.A[un - 1] > 0.0 ? a / rep.A[un - 1] : std::numeric_limits<double>::quiet_NaN());
        growth = rep.step_ratio.back() > 1.0 ? growth + 1 : 0;
        if (growth >= 2 && !rep.diverged) {
            rep.diverged = true;
            rep.note = "successive differences grew twice in a row at n = " + std::to_string(n);
        }
        older = std::move(old);
        old = std::move(cur);
    }
    if (with_reference) {
        SolverConfig ref = lin;
        ref.corrector_iters = 12;
        Integrator rint(grid, SolverMode::GoodUnknownNu, params.lift, ref);
        const auto traj = integrate_trajectory(rint, g0, dt, n_steps);
        rep.reference_distance = weighted_trajectory_distance(old, traj, tau, params.lift.alpha, delta, params.m_max);
    }
    rep.last = std::move(old);
    return rep;
}

}  // namespace prandtl
