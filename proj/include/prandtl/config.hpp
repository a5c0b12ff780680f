#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "prandtl/error.hpp"
#include "prandtl/grid.hpp"
#include "prandtl/lift.hpp"
#include "prandtl/radius.hpp"
#include "prandtl/solver.hpp"

namespace prandtl {

struct RadiusConfig {
    double tau0 = 1.0;
    double c0 = 1.0;
    double c1 = 1.0;
    /// Non-positive selects 6 C0 C1.
    double c2 = 0.0;
    /// Replace c0 by the measured product constant before the run.
    bool calibrate_c0 = false;
};

/// Everything a run needs, populated from a flat `section.key = value` file.
struct LabConfig {
    GridConfig grid;
    LiftParams lift;
    /// True when weight.alpha was given; otherwise alpha follows run.epsilon.
    bool alpha_explicit = false;
    RadiusConfig radius;
    double epsilon = 0.1;
    bool strict_regime = false;
    SolverConfig solver;
    int m_max = 40;
    InitialData init;
    std::string init_snapshot;
    int calibrate_trials = 100;
    std::uint64_t calibrate_seed = 1;
    double crosscheck_t_end = 0.5;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out))
        throw Error(ErrorKind::Config, "type-mismatch", key + " expects a real number, got '" + v + "'");
    return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
    Int out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw Error(ErrorKind::Config, "type-mismatch", key + " expects an integer, got '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorKind::Config, "type-mismatch", key + " expects true or false, got '" + v + "'");
}

/// One settable key: how to read it and how to print the current value.
struct KeyBinding {
    std::function<void(LabConfig&, const std::string&)> set;
    std::function<std::string(const LabConfig&)> get;
};

template <class T>
KeyBinding real_key(const std::string& name, T LabConfig::*group, double T::*field) {
    return {[=](LabConfig& c, const std::string& v) { c.*group.*field = parse_double(name, v); },
            [=](const LabConfig& c) { return fmt_double(c.*group.*field); }};
}

inline KeyBinding real_top(const std::string& name, double LabConfig::*field) {
    return {[=](LabConfig& c, const std::string& v) { c.*field = parse_double(name, v); },
            [=](const LabConfig& c) { return fmt_double(c.*field); }};
}

inline const std::map<std::string, KeyBinding>& key_table() {
    static const std::map<std::string, KeyBinding> table = [] {
        std::map<std::string, KeyBinding> t;
        t["grid.nx"] = {[](LabConfig& c, const std::string& v) { c.grid.nx = parse_int<int>("grid.nx", v); },
                        [](const LabConfig& c) { return std::to_string(c.grid.nx); }};
        t["grid.nz"] = {[](LabConfig& c, const std::string& v) { c.grid.nz = parse_int<int>("grid.nz", v); },
                        [](const LabConfig& c) { return std::to_string(c.grid.nz); }};
        t["grid.lx"] = real_key("grid.lx", &LabConfig::grid, &GridConfig::lx);
        t["grid.zmax"] = real_key("grid.zmax", &LabConfig::grid, &GridConfig::zmax);
        t["grid.stretch"] = real_key("grid.stretch", &LabConfig::grid, &GridConfig::stretch);
        t["grid.mode"] = {[](LabConfig& c, const std::string& v) { c.grid.mode = coordinate_mode_from_string(v); },
                          [](const LabConfig& c) { return to_string(c.grid.mode); }};

        t["lift.kappa"] = real_key("lift.kappa", &LabConfig::lift, &LiftParams::kappa);
        t["weight.alpha"] = {[](LabConfig& c, const std::string& v) {
                                 c.lift.alpha = parse_double("weight.alpha", v);
                                 c.alpha_explicit = true;
                             },
                             [](const LabConfig& c) { return fmt_double(c.lift.alpha); }};

        t["radius.tau0"] = real_key("radius.tau0", &LabConfig::radius, &RadiusConfig::tau0);
        t["radius.c0"] = real_key("radius.c0", &LabConfig::radius, &RadiusConfig::c0);
        t["radius.c1"] = real_key("radius.c1", &LabConfig::radius, &RadiusConfig::c1);
        t["radius.c2"] = real_key("radius.c2", &LabConfig::radius, &RadiusConfig::c2);
        t["radius.calibrate_c0"] = {
            [](LabConfig& c, const std::string& v) { c.radius.calibrate_c0 = parse_bool("radius.calibrate_c0", v); },
            [](const LabConfig& c) { return std::string(c.radius.calibrate_c0 ? "true" : "false"); }};

        t["run.epsilon"] = real_top("run.epsilon", &LabConfig::epsilon);
        t["run.strict_regime"] = {
            [](LabConfig& c, const std::string& v) { c.strict_regime = parse_bool("run.strict_regime", v); },
            [](const LabConfig& c) { return std::string(c.strict_regime ? "true" : "false"); }};

        t["solver.mode"] = {[](LabConfig& c, const std::string& v) { c.solver.mode = solver_mode_from_string(v); },
                            [](const LabConfig& c) { return to_string(c.solver.mode); }};
        for (auto [name, field] : {std::pair{"solver.nu", &SolverConfig::nu}, {"solver.dt", &SolverConfig::dt},
                                   {"solver.t_end", &SolverConfig::t_end}, {"solver.cfl", &SolverConfig::cfl},
                                   {"solver.snapshot_every", &SolverConfig::snapshot_every},
                                   {"solver.csv_every", &SolverConfig::csv_every},
                                   {"solver.fit_t0", &SolverConfig::fit_t0}, {"solver.fit_t1", &SolverConfig::fit_t1}})
            t[name] = real_key(name, &LabConfig::solver, field);
        for (auto [name, field] : {std::pair{"solver.picard_iters", &SolverConfig::picard_iters},
                                   {"solver.corrector_iters", &SolverConfig::corrector_iters},
                                   {"solver.max_halvings", &SolverConfig::max_halvings}}) {
            const std::string key = name;
            t[key] = {[key, field](LabConfig& c, const std::string& v) { c.solver.*field = parse_int<int>(key, v); },
                      [field](const LabConfig& c) { return std::to_string(c.solver.*field); }};
        }

        t["norms.m_max"] = {[](LabConfig& c, const std::string& v) { c.m_max = parse_int<int>("norms.m_max", v); },
                            [](const LabConfig& c) { return std::to_string(c.m_max); }};

        t["init.family"] = {[](LabConfig& c, const std::string& v) { c.init.family = init_family_from_string(v); },
                            [](const LabConfig& c) { return to_string(c.init.family); }};
        t["init.amplitude"] = real_key("init.amplitude", &LabConfig::init, &InitialData::amplitude);
        t["init.x_width"] = real_key("init.x_width", &LabConfig::init, &InitialData::x_width);
        t["init.profile_c"] = real_key("init.profile_c", &LabConfig::init, &InitialData::profile_c);
        t["init.normalize"] = {[](LabConfig& c, const std::string& v) { c.init.normalize = parse_bool("init.normalize", v); },
                               [](const LabConfig& c) { return std::string(c.init.normalize ? "true" : "false"); }};
        t["init.snapshot"] = {[](LabConfig& c, const std::string& v) { c.init_snapshot = v; },
                              [](const LabConfig& c) { return c.init_snapshot; }};

        t["calibrate.trials"] = {
            [](LabConfig& c, const std::string& v) { c.calibrate_trials = parse_int<int>("calibrate.trials", v); },
            [](const LabConfig& c) { return std::to_string(c.calibrate_trials); }};
        t["calibrate.seed"] = {
            [](LabConfig& c, const std::string& v) { c.calibrate_seed = parse_int<std::uint64_t>("calibrate.seed", v); },
            [](const LabConfig& c) { return std::to_string(c.calibrate_seed); }};
        t["crosscheck.t_end"] = real_top("crosscheck.t_end", &LabConfig::crosscheck_t_end);
        return t;
    }();
    return table;
}

}  // namespace detail

/// Names of all accepted keys, sorted.
inline std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& [k, b] : detail::key_table()) out.push_back(k);
    return out;
}

/// Sets one key. Unknown keys are errors.
inline void set_config_value(LabConfig& c, const std::string& key, const std::string& value) {
    const auto& table = detail::key_table();
    auto it = table.find(key);
    if (it == table.end()) {
        // C* is another name for C2
        if (key == "radius.c_star") it = table.find("radius.c2");
        else throw Error(ErrorKind::Config, "unknown-key", "unknown config key '" + key + "'");
    }
    it->second.set(c, value);
}

/// Cross-field checks. Grid and solver ranges are delegated to their modules.
inline void validate_config(LabConfig& c) {
    const GridPtr grid = make_grid(c.grid);
    if (!(c.epsilon > 0.0 && c.epsilon < 1.0))
        throw Error(ErrorKind::Config, "run-epsilon", "run.epsilon must lie in (0, 1)");
    if (!c.alpha_explicit) c.lift.alpha = alpha_from_epsilon(c.epsilon);
    if (!(c.lift.alpha > 0.0 && c.lift.alpha <= 0.5))
        throw Error(ErrorKind::Config, "weight-alpha", "weight.alpha must lie in (0, 1/2]");
    if (!std::isfinite(c.lift.kappa)) throw Error(ErrorKind::Config, "lift-kappa", "lift.kappa must be finite");
    if (c.m_max < 1 || c.m_max > 64) throw Error(ErrorKind::Config, "norms-m-max", "norms.m_max must lie in [1, 64]");
    if (c.calibrate_trials < 1) throw Error(ErrorKind::Config, "calibrate-trials", "calibrate.trials must be >= 1");
    if (!(c.crosscheck_t_end > 0.0))
        throw Error(ErrorKind::Config, "crosscheck-t-end", "crosscheck.t_end must be positive");
    if (c.init.family == InitFamily::Custom && c.init_snapshot.empty())
        throw Error(ErrorKind::Config, "init-snapshot", "init.family = custom needs init.snapshot");
    validate_solver_config(c.solver, *grid);
    make_radius_state(c.radius.tau0, c.radius.c0, c.radius.c1, c.radius.c2, c.epsilon, c.strict_regime);
}

/// Parses config text. Lines are `section.key = value`; `#` starts a comment.
/// `overrides` are `key=value` strings applied after the file, before validation.
inline LabConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {}) {
    LabConfig c;
    std::istringstream in(text);
    std::string line;
    std::map<std::string, int> seen;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos)
            throw Error(ErrorKind::Config, "syntax", where + "expected 'section.key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.find('.') == std::string::npos)
            throw Error(ErrorKind::Config, "syntax", where + "keys have the form section.key");
        if (seen.count(key))
            throw Error(ErrorKind::Config, "duplicate-key",
                        where + key + " already set on line " + std::to_string(seen[key]));
        seen[key] = lineno;
        try {
            set_config_value(c, key, value);
        } catch (const Error& e) {
            throw Error(e.kind(), e.code(), where + e.what());
        }
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Config, "syntax", "override '" + o + "' is not key=value");
        set_config_value(c, detail::trim(o.substr(0, eq)), detail::trim(o.substr(eq + 1)));
    }
    validate_config(c);
    return c;
}

inline LabConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "config-open", "cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

/// Canonical `key = value` listing of every setting, sorted by key. Two configs
/// with the same effective values produce the same text.
inline std::string config_echo(const LabConfig& c) {
    std::string out;
    for (const auto& [k, b] : detail::key_table()) out += k + " = " + b.get(c) + "\n";
    return out;
}

/// 64-bit FNV-1a of the canonical echo, as 16 hex digits.
inline std::string run_id(const LabConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config_echo(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline GridPtr make_grid(const LabConfig& c) { return make_grid(c.grid); }

inline RadiusState make_radius_state(const LabConfig& c, double c0) {
    return make_radius_state(c.radius.tau0, c0, c.radius.c1, c.radius.c2, c.epsilon, c.strict_regime);
}

inline RunParams run_params(const LabConfig& c) {
    RunParams p;
    p.lift = c.lift;
    p.m_max = c.m_max;
    return p;
}

}  // namespace prandtl
