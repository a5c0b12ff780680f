// prandtl: command-line front end.
//
//   prandtl simulate   --config run.cfg [--out runs] [--set key=value ...]
//   prandtl picard     --config run.cfg
//   prandtl crosscheck --config run.cfg
//   prandtl verify     --suite all --trials 100 --seed 1 [--config run.cfg]
//
// Exit codes: 0 success, 1 I/O failure, 2 config error, 3 numerical abort or
// failed check, 4 regime violation.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prandtl/app.hpp"

namespace {

struct Common {
    std::string config;
    std::string out = "runs";
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
    auto* opt = sub->add_option("--config,-c", c.config, "flat key = value config file");
    if (config_required) opt->required();
    opt->check(CLI::ExistingFile);
    sub->add_option("--out,-o", c.out, "directory that receives run-<id>/");
    sub->add_option("--set", c.overrides, "override a config key, e.g. --set solver.t_end=10");
}

prandtl::LabConfig load(const Common& c) {
    if (c.config.empty()) return prandtl::parse_config_text("", c.overrides);
    return prandtl::parse_config(c.config, c.overrides);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for the 2D Prandtl equations in good-unknown form"};
    app.require_subcommand(1);

    Common sim, pic, xc, ver;
    auto* s = app.add_subcommand("simulate", "coupled (g, tau) run with norms, radius and snapshots");
    add_common(s, sim, true);
    auto* p = app.add_subcommand("picard", "two-step Picard iteration with tangential dissipation");
    add_common(p, pic, true);
    auto* x = app.add_subcommand("crosscheck", "velocity form vs good unknown, and coordinate modes");
    add_common(x, xc, true);
    auto* v = app.add_subcommand("verify", "inequality suites on random admissible fields");
    add_common(v, ver, false);
    std::string suite = "all";
    int trials = 100;
    std::uint64_t seed = 1;
    v->add_option("--suite", suite, "poincare | diagnostic | products | dawson | all")
        ->check(CLI::IsMember({"poincare", "diagnostic", "products", "dawson", "all"}));
    v->add_option("--trials", trials, "random fields per suite")->check(CLI::PositiveNumber);
    v->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*s) {
            const auto out = prandtl::simulate(load(sim), sim.out);
            const auto& r = out.report;
            std::cout << "run: " << out.dir.string() << "\n"
                      << "termination: " << prandtl::to_string(r.termination) << "\n"
                      << "tau_final: " << r.tau_final << "\n";
            if (r.decay) std::cout << "decay_slope: " << r.decay->slope << " (r2 " << r.decay->r2 << ")\n";
            if (!r.message.empty()) std::cerr << r.message << "\n";
            return out.exit_code;
        }
        if (*p) {
            const auto out = prandtl::picard(load(pic), pic.out);
            std::cout << "run: " << out.dir.string() << "\n";
            for (std::size_t n = 2; n < out.report.A.size(); ++n)
                std::cout << "A_" << n << ": " << out.report.A[n] << "  ratio " << out.report.pair_ratio[n] << "\n";
            if (out.report.diverged) std::cerr << out.report.note << "\n";
            return out.exit_code;
        }
        if (*x) {
            const auto out = prandtl::crosscheck_run(load(xc), xc.out);
            std::cout << "run: " << out.dir.string() << "\n"
                      << "velocity_vs_good_unknown: " << out.velocity_vs_g.distance << "\n"
                      << "self_similar_vs_physical: " << out.coordinate_distance << "\n";
            return out.exit_code;
        }
        const auto out = prandtl::verify_suite(load(ver), suite, trials, seed);
        std::cout << prandtl::verify_report(out).text();
        return out.passed ? 0 : 3;
    } catch (const prandtl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return prandtl::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
