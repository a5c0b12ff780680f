#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "prandtl/config.hpp"
#include "prandtl/io.hpp"
#include "prandtl/solver.hpp"
#include "prandtl/verify.hpp"

// Commands behind the CLI: each reads a validated LabConfig, writes one run
// directory and returns what it wrote.

namespace prandtl {

/// Family used to calibrate C0: a single tangential mode times a Gaussian.
/// Among the random families tried it gives the largest product ratios and the
/// most stable maximum in the trial count.
inline FieldFamily calibration_family() {
    FieldFamily fam;
    fam.modes = 1;
    fam.degree = 0;
    fam.mode_decay = 1.0;
    fam.envelope = 0.5;
    return fam;
}

/// Measured product constant for the run's grid, alpha and initial radius.
inline ProductConstants calibrate_c0(const LabConfig& cfg, const GridPtr& grid) {
    ProductOptions po;
    po.tau = cfg.radius.tau0;
    po.alpha = cfg.lift.alpha;
    po.m_max = cfg.m_max;
    return measure_product_constants(grid, calibration_family(), cfg.calibrate_trials, cfg.calibrate_seed, po);
}

inline InitialData resolved_init(const LabConfig& cfg, const GridPtr& grid) {
    InitialData init = cfg.init;
    if (init.family == InitFamily::Custom) init.custom = load_snapshot(cfg.init_snapshot, grid).field;
    return init;
}

namespace detail {

inline void report_config(Report& r, const LabConfig& cfg, const std::string& id, const std::string& command) {
    r.set("run_id", id);
    r.set("command", command);
    r.set("grid_nx", cfg.grid.nx);
    r.set("grid_nz", cfg.grid.nz);
    r.set("grid_mode", to_string(cfg.grid.mode));
    r.set("solver_mode", to_string(cfg.solver.mode));
    r.set("epsilon", cfg.epsilon);
    r.set("delta", delta_from_epsilon(cfg.epsilon));
    r.set("alpha", cfg.lift.alpha);
}

inline std::string exit_status_name(int code) {
    switch (code) {
        case 0: return "ok";
        case 2: return "config_error";
        case 3: return "numerical_abort";
        case 4: return "regime_violation";
    }
    return "error";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate

struct SimulateOutput {
    RunReport report;
    std::string run_id;
    std::filesystem::path dir;
    double C0 = 0.0;
    std::string C0_source;
    std::vector<InequalityReport> calibration;
    /// (g, tau) at every snapshot, kept only when requested.
    std::vector<std::pair<Field, double>> snapshots;
    int exit_code = 0;
};

/// Runs the coupled (g, tau) evolution and writes norms.csv, radius.csv,
/// snapshots and report.txt. Exit code 3 for collapse, NaN, CFL failure or a
/// radius-floor violation.
inline SimulateOutput simulate(const LabConfig& cfg, const std::filesystem::path& root, bool keep_snapshots = false) {
    const GridPtr grid = make_grid(cfg);
    const InitialData init = resolved_init(cfg, grid);
    SimulateOutput out;
    if (cfg.radius.calibrate_c0) {
        const ProductConstants pc = calibrate_c0(cfg, grid);
        out.C0 = pc.C0;
        out.C0_source = "calibrated";
        out.calibration = pc.reports;
    } else {
        out.C0 = cfg.radius.c0;
        out.C0_source = "config";
    }
    const RadiusState radius = make_radius_state(cfg, out.C0);
    const Spectrum g0 = initial_state(grid, init, cfg.radius.tau0, cfg.m_max);

    RunDirectory dir(root, cfg);
    out.run_id = dir.id();
    out.dir = dir.path();
    CsvWriter norms(dir.norms_csv(), norms_csv_columns());
    CsvWriter rad(dir.radius_csv(), radius_csv_columns());
    RunObserver obs;
    obs.on_row = [&](const NormRow& n, const RadiusRow& r) {
        write_norm_row(norms, n);
        write_radius_row(rad, r);
    };
    obs.on_snapshot = [&](const Field& g, double tau) {
        dir.add_snapshot(g, {"g", tau});
        if (keep_snapshots) out.snapshots.emplace_back(g, tau);
    };
    out.report = run_simulation(g0, cfg.solver, radius, run_params(cfg), obs);
    norms.flush();
    rad.flush();
    const RunReport& rr = out.report;

    out.exit_code = rr.termination == Termination::TEnd && rr.radius_floor_ok ? 0 : 3;
    Report r;
    detail::report_config(r, cfg, out.run_id, "simulate");
    r.set("status", detail::exit_status_name(out.exit_code));
    r.set("exit_code", out.exit_code);
    r.set("termination", to_string(rr.termination));
    if (!rr.message.empty()) r.set("message", rr.message);
    r.set("t_final", rr.t_final);
    r.set("tau0", cfg.radius.tau0);
    r.set("tau_final", rr.tau_final);
    r.set("steps", rr.steps);
    r.set("cfl_halvings", rr.halvings);
    if (rr.decay) {
        r.set("decay_slope", rr.decay->slope);
        r.set("decay_r2", rr.decay->r2);
        r.set("decay_samples", static_cast<long>(rr.decay->samples));
    } else {
        r.set("decay_slope", std::numeric_limits<double>::quiet_NaN());
        r.set("decay_note", rr.decay_note);
    }
    r.set("decay_window_t0", cfg.solver.fit_t0);
    r.set("decay_window_t1", cfg.solver.fit_t1 > 0.0 ? cfg.solver.fit_t1 : cfg.solver.t_end);
    r.set("max_compensated_norm", rr.max_compensated);
    r.set("max_tail_ratio", rr.max_tail_ratio);
    r.set("C0", rr.C0);
    r.set("C0_source", out.C0_source);
    for (const auto& c : out.calibration) r.set("C0_part_" + c.name, c.measured_constant);
    r.set("C1", cfg.radius.c1);
    r.set("C2", rr.C2);
    r.set("radius_floor_ok", rr.radius_floor_ok);
    if (!rr.radius_floor_ok) r.set("radius_floor_first_violation", rr.radius_floor_first_violation);
    r.set("half_radius_ok", rr.half_radius_ok);
    r.set("holder_modulus", rr.holder_modulus);
    r.set("csv_paths", std::string("norms.csv,radius.csv"));
    r.set("snapshot_count", static_cast<long>(dir.snapshots().size()));
    for (std::size_t n = 0; n < dir.snapshots().size(); ++n)
        r.set("snapshot_" + std::to_string(n), CsvWriter::fmt_cell(dir.snapshots()[n].first) + " " + dir.snapshots()[n].second);
    dir.write_report(r);
    return out;
}

// ---------------------------------------------------------------------------
// picard

struct PicardOutput {
    PicardReport report;
    std::string run_id;
    std::filesystem::path dir;
    /// Largest A_n / (A_{n-1} + A_{n-2}) over n >= 3.
    double max_pair_ratio = 0.0;
    int exit_code = 0;
};

inline PicardOutput picard(const LabConfig& cfg, const std::filesystem::path& root) {
    const GridPtr grid = make_grid(cfg);
    const InitialData init = resolved_init(cfg, grid);
    const Spectrum g0 = initial_state(grid, init, cfg.radius.tau0, cfg.m_max);
    PicardOutput out;
    out.report = run_picard(g0, cfg.solver, run_params(cfg), cfg.radius.tau0, delta_from_epsilon(cfg.epsilon));

    RunDirectory dir(root, cfg);
    out.run_id = dir.id();
    out.dir = dir.path();
    const PicardReport& pr = out.report;
    {
        CsvWriter w(dir.path() / "picard.csv", {"n", "A", "pair_ratio", "step_ratio"});
        for (std::size_t n = 2; n < pr.A.size(); ++n)
            w.row({static_cast<double>(n), pr.A[n], pr.pair_ratio[n], pr.step_ratio[n]});
    }
    for (std::size_t n = 3; n < pr.pair_ratio.size(); ++n) out.max_pair_ratio = std::max(out.max_pair_ratio, pr.pair_ratio[n]);
    out.exit_code = pr.diverged ? 3 : 0;

    Report r;
    detail::report_config(r, cfg, out.run_id, "picard");
    r.set("status", detail::exit_status_name(out.exit_code));
    r.set("exit_code", out.exit_code);
    r.set("nu", cfg.solver.nu);
    r.set("iterations", cfg.solver.picard_iters);
    r.set("tau", cfg.radius.tau0);
    r.set("diverged", pr.diverged);
    if (!pr.note.empty()) r.set("note", pr.note);
    r.set("max_pair_ratio", out.max_pair_ratio);
    r.set("contraction_half", out.max_pair_ratio <= 0.5);
    r.set("final_difference", pr.A.back());
    r.set("reference_distance", pr.reference_distance);
    r.set("csv_paths", std::string("picard.csv"));
    dir.write_report(r);
    return out;
}

// ---------------------------------------------------------------------------
// crosscheck

struct CrosscheckOutput {
    CrossCheck velocity_vs_g;
    double coordinate_distance = 0.0;
    std::string run_id;
    std::filesystem::path dir;
    int exit_code = 0;
};

/// Velocity form against good-unknown form, and self-similar against physical
/// coordinates, both at crosscheck.t_end.
inline CrosscheckOutput crosscheck_run(const LabConfig& cfg, const std::filesystem::path& root) {
    const GridPtr grid = make_grid(cfg);
    const InitialData init = resolved_init(cfg, grid);
    CrosscheckOutput out;
    out.velocity_vs_g = crosscheck(grid, init, cfg.solver, cfg.lift, cfg.crosscheck_t_end, cfg.lift.alpha);
    out.coordinate_distance =
        coordinate_mode_distance(cfg.grid, init, cfg.solver, cfg.lift, cfg.crosscheck_t_end, cfg.lift.alpha);

    RunDirectory dir(root, cfg);
    out.run_id = dir.id();
    out.dir = dir.path();
    out.exit_code = std::isfinite(out.velocity_vs_g.distance) && std::isfinite(out.coordinate_distance) ? 0 : 3;
    Report r;
    detail::report_config(r, cfg, out.run_id, "crosscheck");
    r.set("status", detail::exit_status_name(out.exit_code));
    r.set("exit_code", out.exit_code);
    r.set("t", out.velocity_vs_g.t);
    r.set("dt", cfg.solver.dt);
    r.set("norm_g", out.velocity_vs_g.norm_g);
    r.set("velocity_vs_good_unknown", out.velocity_vs_g.distance);
    r.set("self_similar_vs_physical", out.coordinate_distance);
    dir.write_report(r);
    return out;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOutput {
    std::vector<InequalityReport> reports;
    double C0 = std::numeric_limits<double>::quiet_NaN();
    bool passed = true;
};

/// Runs one suite ("poincare", "diagnostic", "products", "dawson") or "all"
/// on the config's grid and alpha.
inline VerifyOutput verify_suite(const LabConfig& cfg, const std::string& suite, int trials, std::uint64_t seed) {
    SuiteOptions o;
    o.grid = cfg.grid;
    o.trials = trials;
    o.seed = seed;
    o.alpha = cfg.lift.alpha;
    o.m_max = cfg.m_max;
    o.tau = cfg.radius.tau0;
    VerifyOutput out;
    const bool all = suite == "all";
    bool known = all;
    if (all || suite == "poincare") {
        known = true;
        out.reports.push_back(poincare_suite(o));
    }
    if (all || suite == "diagnostic") {
        known = true;
        for (auto& r : diagnostic_suite(o)) out.reports.push_back(r);
    }
    if (all || suite == "products") {
        known = true;
        SuiteOptions p = o;
        p.family = calibration_family();
        const ProductConstants pc = products_suite(p);
        for (auto& r : pc.reports) out.reports.push_back(r);
        out.C0 = pc.C0;
    }
    if (all || suite == "dawson") {
        known = true;
        out.reports.push_back(dawson_report());
    }
    if (!known)
        throw Error(ErrorKind::Config, "verify-suite", "suite must be poincare, diagnostic, products, dawson or all");
    for (const auto& r : out.reports) out.passed = out.passed && r.passed;
    return out;
}

inline Report verify_report(const VerifyOutput& v) {
    Report r;
    for (const auto& x : v.reports) {
        r.set(x.name + ".passed", x.passed);
        r.set(x.name + ".samples", x.samples);
        r.set(x.name + ".worst_margin", x.worst_margin);
        r.set(x.name + ".measured_constant", x.measured_constant);
        if (std::isfinite(x.drift)) r.set(x.name + ".drift", x.drift);
        if (x.skipped) r.set(x.name + ".skipped", x.skipped);
    }
    if (std::isfinite(v.C0)) r.set("C0", v.C0);
    r.set("passed", v.passed);
    return r;
}

}  // namespace prandtl
