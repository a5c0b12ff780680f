#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "prandtl/error.hpp"
#include "prandtl/grid.hpp"

namespace prandtl {

/// delta = eps log(1/eps).
inline double delta_from_epsilon(double eps) { return eps * std::log(1.0 / eps); }

/// alpha = (1 - delta) / 2, frozen at run start.
inline double alpha_from_epsilon(double eps) { return 0.5 * (1.0 - delta_from_epsilon(eps)); }

struct RadiusSample {
    double t = 0.0;
    double tau = 0.0;
    double B = 0.0;
};

/// Analyticity radius and the constants driving it.
/// C2 defaults to 6 C0 C1 and acts as the regime constant C*.
struct RadiusState {
    double tau = 1.0;
    double tau0 = 1.0;
    double C0 = 1.0;
    double C1 = 1.0;
    double C2 = 6.0;
    double epsilon = 0.1;
    double delta = delta_from_epsilon(0.1);
    bool strict = false;
    std::vector<RadiusSample> history;
};

/// Throws "parameter-regime" when (eps, tau0) leave the small-data regime:
/// eps <= 1/200, delta in (eps, 1/10), C2 / log(1/eps) <= tau0^{3/2} <= 1 / (C2 eps^3).
inline void check_regime(const RadiusState& s) {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::Regime, "parameter-regime", what); };
    if (!(s.epsilon <= 1.0 / 200.0)) fail("epsilon must be <= 1/200 in strict mode");
    if (!(s.delta > s.epsilon && s.delta < 0.1)) fail("delta must lie in (epsilon, 1/10) in strict mode");
    const double p = std::pow(s.tau0, 1.5);
    if (!(s.C2 / std::log(1.0 / s.epsilon) <= p)) fail("tau0^{3/2} is below C2 / log(1/epsilon)");
    if (!(p <= 1.0 / (s.C2 * s.epsilon * s.epsilon * s.epsilon))) fail("tau0^{3/2} exceeds 1 / (C2 epsilon^3)");
}

/// Builds a validated state. A non-positive c2 selects the default 6 C0 C1.
inline RadiusState make_radius_state(double tau0, double c0, double c1, double c2, double epsilon, bool strict) {
    if (!(tau0 > 0.0) || !std::isfinite(tau0))
        throw Error(ErrorKind::Config, "radius-tau0", "radius.tau0 must be positive");
    if (!(c0 > 0.0) || !(c1 > 0.0))
        throw Error(ErrorKind::Config, "radius-constant", "radius.c0 and radius.c1 must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw Error(ErrorKind::Config, "run-epsilon", "run.epsilon must lie in (0, 1)");
    RadiusState s;
    s.tau = s.tau0 = tau0;
    s.C0 = c0;
    s.C1 = c1;
    s.C2 = c2 > 0.0 ? c2 : 6.0 * c0 * c1;
    s.epsilon = epsilon;
    s.delta = delta_from_epsilon(epsilon);
    s.strict = strict;
    if (strict) check_regime(s);
    return s;
}

/// Advances d(tau^{3/2})/dt = -3 C0 B over dt with B held fixed, which is
/// exact in the tau^{3/2} variable.
inline RadiusState step_tau(RadiusState s, double B_norm, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorKind::Numerical, "radius-step", "step_tau needs dt > 0");
    if (!(B_norm >= 0.0)) throw Error(ErrorKind::Numerical, "non-finite", "step_tau: B norm must be finite and >= 0");
    const double w = std::pow(s.tau, 1.5) - 3.0 * s.C0 * B_norm * dt;
    if (!(w > 0.0))
        throw Error(ErrorKind::Numerical, "radius-collapse", "tau^{3/2} reached zero; the run left the small-data regime");
    s.tau = std::min(s.tau, std::pow(w, 2.0 / 3.0));
    return s;
}

struct LowerBound {
    double value = 0.0;
    /// True once tau0^{3/2} - eps C2 <t>^delta / (2 delta) <= 0.
    bool crossed = false;
};

/// (tau0^{3/2} - eps C2 <t>^delta / (2 delta))^{2/3}.
inline LowerBound tau_lower_bound(double t, const RadiusState& s) {
    const double w = std::pow(s.tau0, 1.5) - s.epsilon * s.C2 * std::pow(bracket_t(t), s.delta) / (2.0 * s.delta);
    if (w <= 0.0) return {0.0, true};
    return {std::pow(w, 2.0 / 3.0), false};
}

/// T_eps = (delta tau0^{3/2} / (eps C2))^{1/delta} - 1, clamped at 0 when the
/// window is empty. Strict mode checks the regime first.
inline double lifespan_T_eps(const RadiusState& s) {
    if (s.strict) check_regime(s);
    const double r = s.delta * std::pow(s.tau0, 1.5) / (s.epsilon * s.C2);
    return std::max(0.0, std::exp(std::log(r) / s.delta) - 1.0);
}

/// exp(1 / (eps log(1/eps))), the guaranteed lifespan floor.
inline double lifespan_floor(double eps) { return std::exp(1.0 / delta_from_epsilon(eps)); }

/// True when tau0^{3/2} log(1/eps) >= C2 e^2, the case in which T_eps >= lifespan_floor(eps).
inline bool lifespan_floor_applies(const RadiusState& s) {
    return std::pow(s.tau0, 1.5) * std::log(1.0 / s.epsilon) >= s.C2 * std::numbers::e * std::numbers::e;
}

/// Tracks max |tau(t1) - tau(t2)| / |t1 - t2|^{1/2} over every pair of samples added.
class HolderModulus {
public:
    double add(double t, double tau) {
        for (std::size_t n = 0; n < t_.size(); ++n) {
            const double dt = std::abs(t - t_[n]);
            if (dt > 0.0) value_ = std::max(value_, std::abs(tau - tau_[n]) / std::sqrt(dt));
        }
        t_.push_back(t);
        tau_.push_back(tau);
        return value_;
    }
    double value() const noexcept { return value_; }

private:
    std::vector<double> t_, tau_;
    double value_ = 0.0;
};

}  // namespace prandtl
