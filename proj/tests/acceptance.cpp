// Acceptance run: one PASS/FAIL line per criterion A1..A10, exit status 1 if
// any criterion fails. Uses the configs shipped in configs/.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "prandtl/prandtl.hpp"

#ifndef PRANDTL_CONFIG_DIR
#define PRANDTL_CONFIG_DIR "configs"
#endif

using namespace prandtl;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = PRANDTL_CONFIG_DIR;
const fs::path kRuns = "acceptance_runs";

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// The standard run feeds A2 to A5; it is run once and shared.
struct Standard {
    LabConfig cfg;
    SimulateOutput out;
    double seconds = 0.0;
};

const Standard& standard_run() {
    static const Standard s = [] {
        Standard st;
        st.cfg = parse_config((kConfigs / "standard.cfg").string());
        const auto t0 = std::chrono::steady_clock::now();
        st.out = simulate(st.cfg, kRuns, true);
        st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return st;
    }();
    return s;
}

// ---------------------------------------------------------------------------

Outcome a1_roundtrip() {
    auto grid = [](int nz) {
        GridConfig c;
        c.nz = nz;
        return make_grid(c);
    };
    auto rel = [](const Field& a, const Field& b) { return l2_weighted(a - b, 0.0) / l2_weighted(b, 0.0); };
    auto roundtrip = [&](int nz) {
        const Field g = Field::sample(grid(nz), 0.0, [](double x, double z) {
            return (1.0 + 0.5 * std::cos(x)) * (1.0 + 0.4 * z * z) * std::exp(-0.4 * z * z);
        });
        return rel(g_from_u(recover_u(g)), g);
    };
    const double e1 = roundtrip(128), e2 = roundtrip(256);

    // u = y e^{-y^2/4} and g = e^{-y^2/4} at t = 0
    auto pair_error = [&](int nz) {
        const GridPtr g = grid(nz);
        const Field u = Field::sample(g, 0.0, [](double, double z) { return z * std::exp(-0.25 * z * z); });
        const Field gx = Field::sample(g, 0.0, [](double, double z) { return std::exp(-0.25 * z * z); });
        return std::pair{(g_from_u(u) - gx).max_abs(), (recover_u(gx) - u).max_abs()};
    };
    const auto [p1, q1] = pair_error(128);
    const auto [p2, q2] = pair_error(256);
    const double ratio = e1 / e2, pair_ratio = p1 / p2;
    Outcome o;
    o.pass = e1 <= 1e-3 && std::abs(ratio - 4.0) <= 0.8 && p1 < 1e-4 && pair_ratio > 7.0 && q1 < 1e-12 && q2 < 1e-12;
    o.detail = fmt("roundtrip err %.3e (nz=128), ratio %.3f under nz doubling; closed pair g err %.2e, ratio %.1f, u err %.1e",
                   e1, ratio, p1, pair_ratio, std::max(q1, q2));
    return o;
}

Outcome a2_poincare() {
    const Standard& st = standard_run();
    const auto t0 = std::chrono::steady_clock::now();
    SuiteOptions so;
    so.grid = st.cfg.grid;
    so.trials = 100;
    so.alpha = st.cfg.lift.alpha;
    const InequalityReport random = poincare_suite(so);
    double worst_snap = std::numeric_limits<double>::infinity();
    long snaps = 0;
    bool snap_ok = true;
    for (const auto& [g, tau] : st.out.snapshots) {
        const InequalityReport r = verify_poincare(g, st.cfg.lift.alpha);
        worst_snap = std::min(worst_snap, r.worst_margin);
        snap_ok = snap_ok && r.passed;
        ++snaps;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome o;
    o.pass = random.passed && snap_ok && snaps > 0 && secs < 30.0;
    o.detail = fmt("100 random fields (%ld samples) worst margin %.3e; %ld snapshots worst margin %.3e; %.1f s", random.samples,
                   random.worst_margin, snaps, worst_snap, secs);
    return o;
}

Outcome a3_decay() {
    const Standard& st = standard_run();
    const auto& r = st.out.report;
    Outcome o;
    if (!r.decay) {
        o.detail = "no decay fit: " + r.decay_note;
        return o;
    }
    const double predicted = -1.25 + r.delta;
    o.pass = r.termination == Termination::TEnd && r.decay->slope <= -1.0 && r.decay->r2 >= 0.98 && st.seconds < 600.0;
    o.detail = fmt("slope %.4f over t in [10,100] (r2 %.4f, %zu samples; rate -5/4+delta = %.4f); run took %.1f s",
                   r.decay->slope, r.decay->r2, r.decay->samples, predicted, st.seconds);
    return o;
}

Outcome a4_compensated() {
    const Standard& st = standard_run();
    double running = 0.0, worst = 0.0, worst_t = 0.0;
    for (const auto& n : st.out.report.norms) {
        if (n.t < 1.0) continue;
        if (running > 0.0 && n.decay_compensated > running) {
            const double rise = n.decay_compensated / running - 1.0;
            if (rise > worst) {
                worst = rise;
                worst_t = n.t;
            }
        }
        running = std::max(running, n.decay_compensated);
    }
    Outcome o;
    o.pass = worst <= 0.01 && !st.out.report.norms.empty();
    o.detail = worst > 0.0 ? fmt("largest rise above the running max after t=1: %.3e at t=%.2f", worst, worst_t)
                           : std::string("non-increasing on every stored row after t=1");
    return o;
}

Outcome a5_radius() {
    const Standard& st = standard_run();
    const auto& rr = st.out.report;
    double min_gap = std::numeric_limits<double>::infinity(), min_tau = std::numeric_limits<double>::infinity();
    for (const auto& r : rr.radius) {
        min_gap = std::min(min_gap, r.tau - r.tau_lower_bound);
        min_tau = std::min(min_tau, r.tau);
    }
    const double tau0 = st.cfg.radius.tau0;
    Outcome o;
    o.pass = st.out.C0_source == "calibrated" && rr.termination == Termination::TEnd && min_gap >= 0.0 &&
             min_tau >= 0.5 * tau0 && rr.radius_floor_ok && rr.half_radius_ok && std::isfinite(rr.holder_modulus);
    o.detail = fmt("calibrated C0 %.4f, C2 %.4f; min tau %.6f (tau0/2 = %.3f); min tau - bound %.4f; final bound %.4f; "
                   "Holder-1/2 modulus %.3e",
                   rr.C0, rr.C2, min_tau, 0.5 * tau0, min_gap, rr.radius.back().tau_lower_bound, rr.holder_modulus);
    return o;
}

Outcome a6_crosscheck() {
    const auto t0 = std::chrono::steady_clock::now();
    const LabConfig cfg = parse_config((kConfigs / "crosscheck.cfg").string());
    const auto coarse = crosscheck_run(cfg, kRuns);
    LabConfig fine = cfg;
    fine.grid.nz = 2 * cfg.grid.nz - 1;
    fine.solver.dt = 0.5 * cfg.solver.dt;
    const auto refined = crosscheck_run(fine, kRuns);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double d1 = coarse.velocity_vs_g.distance, d2 = refined.velocity_vs_g.distance;
    const double ratio = d1 / d2;
    Outcome o;
    // second order in (dt, dz): the ideal ratio is 4
    o.pass = coarse.velocity_vs_g.t == 0.5 && d1 <= 1e-3 && ratio >= 3.0 && secs < 120.0;
    o.detail = fmt("relative distance %.3e at t=0.5, %.3e after halving (dt, dz), ratio %.2f; %.1f s", d1, d2, ratio, secs);
    return o;
}

Outcome a7_picard() {
    const auto t0 = std::chrono::steady_clock::now();
    const LabConfig cfg = parse_config((kConfigs / "picard.cfg").string());
    const auto out = picard(cfg, kRuns);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& pr = out.report;
    bool ok = !pr.diverged && cfg.solver.picard_iters >= 8 && pr.pair_ratio.size() == 9;
    std::string ratios;
    for (std::size_t n = 3; n < pr.pair_ratio.size(); ++n) {
        ok = ok && std::isfinite(pr.pair_ratio[n]) && pr.pair_ratio[n] <= 0.5;
        ratios += fmt("%s%.2e", n == 3 ? "" : " ", pr.pair_ratio[n]);
    }
    Outcome o;
    o.pass = ok && cfg.solver.nu == 0.05 && secs < 300.0;
    o.detail = fmt("nu=%.2f, A_2=%.3e, A_8=%.3e, ratios n=3..8: %s; %.1f s", cfg.solver.nu, pr.A[2], pr.A.back(),
                   ratios.c_str(), secs);
    return o;
}

Outcome a8_instability() {
    const LabConfig cfg = parse_config((kConfigs / "blowup.cfg").string());
    const auto out = simulate(cfg, kRuns);
    const auto& r = out.report;
    const double x0 = r.norms.front().X;
    double xmax = x0;
    for (const auto& n : r.norms)
        if (n.t < 10.0) xmax = std::max(xmax, n.X);
    const bool collapse = r.termination == Termination::RadiusCollapse;
    Outcome o;
    o.pass = cfg.init.amplitude == 1.0 && (collapse || xmax >= 10.0 * x0);
    o.detail = fmt("termination %s at t=%.3f (initial X %.3e, largest X before t=10 is %.2fx initial)",
                   to_string(r.termination).c_str(), r.t_final, x0, xmax / x0);
    return o;
}

Outcome a9_inequalities() {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteOptions so;
    so.trials = 100;
    so.alpha = alpha_from_epsilon(0.1);
    bool ok = true;
    std::string detail;
    for (const auto& r : diagnostic_suite(so)) {
        ok = ok && r.passed && std::isfinite(r.measured_constant);
        detail += fmt("%s %.3f (drift %.1e); ", r.name.c_str(), r.measured_constant, r.drift);
    }
    // the product maxima settle slowly in the trial count; 1000 pairs keep the
    // first-tenth against all comparison meaningful
    SuiteOptions po = so;
    po.trials = 1000;
    po.family = calibration_family();
    const ProductConstants coarse = products_suite(po);
    po.grid.nz = 2 * so.grid.nz - 1;
    const ProductConstants fine = products_suite(po);
    for (std::size_t q = 0; q < coarse.reports.size(); ++q) {
        const auto& r = coarse.reports[q];
        const double refine = std::abs(r.measured_constant - fine.reports[q].measured_constant) / fine.reports[q].measured_constant;
        ok = ok && r.passed && fine.reports[q].passed && refine < kDriftTolerance;
        detail += fmt("%s %.4f (trial drift %.1e, refinement %.1e); ", r.name.c_str(), r.measured_constant, r.drift, refine);
    }
    const InequalityReport d = dawson_report(50.0);
    ok = ok && d.passed && d.worst_margin > 0.0;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail += fmt("dawson worst margin %.4f, max (1+y)D %.4f; %.1f s", d.worst_margin, d.measured_constant, secs);
    return {ok && secs < 60.0, detail};
}

Outcome a10_determinism() {
    const LabConfig cfg = parse_config((kConfigs / "quick.cfg").string());
    const auto a = simulate(cfg, kRuns / "det_a");
    const auto b = simulate(cfg, kRuns / "det_b");
    bool same = a.run_id == b.run_id;
    for (const char* f : {"norms.csv", "radius.csv"}) {
        const std::string x = slurp(a.dir / f), y = slurp(b.dir / f);
        same = same && !x.empty() && x == y;
    }
    const GridPtr grid = make_grid(cfg);
    const Spectrum g0 = initial_state(grid, cfg.init, cfg.radius.tau0, cfg.m_max);
    ConsistencyOptions co;
    co.alpha = cfg.lift.alpha;
    co.tau = cfg.radius.tau0;
    const double d1 = two_run_consistency(g0, cfg.solver, cfg.lift, 0.05, co);
    const double d2 = two_run_consistency(g0, cfg.solver, cfg.lift, 0.025, co);
    Outcome o;
    o.pass = same && std::abs(d1 / d2 - 4.0) <= 0.8;
    o.detail = fmt("CSV outputs %s; dt-halving distances %.3e -> %.3e, ratio %.3f", same ? "bitwise identical" : "DIFFER", d1,
                   d2, d1 / d2);
    return o;
}

}  // namespace

int main() {
    std::error_code ec;
    fs::remove_all(kRuns, ec);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"A1 roundtrip", a1_roundtrip},
        {"A2 weighted Poincare", a2_poincare},
        {"A3 decay exponent", a3_decay},
        {"A4 compensated monotonicity", a4_compensated},
        {"A5 radius floor", a5_radius},
        {"A6 cross-formulation", a6_crosscheck},
        {"A7 Picard contraction", a7_picard},
        {"A8 instability sanity", a8_instability},
        {"A9 inequality suite", a9_inequalities},
        {"A10 determinism and consistency", a10_determinism},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        failed += o.pass ? 0 : 1;
        std::printf("%-4s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
