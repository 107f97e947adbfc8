// Scenario runner: one subcommand per scenario kind, CSV output.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "jbac/experiments.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::uint64_t trials = 0;  // 0 = keep scenario value
    bool quiet = false;
};

int run(const std::string& kind_name, const CliOptions& opt) {
    jbac::Scenario sc;
    try {
        sc = jbac::load_scenario(opt.config_path);
        const jbac::ScenarioKind cli_kind = jbac::scenario_kind_from_string(kind_name);
        if (sc.kind != cli_kind)
            throw std::invalid_argument("scenario file kind '" +
                                        std::string(jbac::to_string(sc.kind)) +
                                        "' does not match subcommand '" + kind_name + "'");
        sc.root_seed = opt.seed;
        sc.jobs = opt.jobs;
        sc.quiet = opt.quiet;
        if (opt.trials > 0) sc.trials = opt.trials;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        const std::vector<jbac::ResultRow> rows = jbac::run_scenario(sc);
        jbac::emit_csv(rows, opt.out_path);
        if (!opt.quiet)
            std::fprintf(stderr, "wrote %zu rows to %s\n", rows.size(), opt.out_path.c_str());
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS joint backscattering-and-communication simulator"};
    app.require_subcommand(1);

    CliOptions opt;
    const char* kinds[] = {"convergence",    "lambda_sweep",  "snr_sweep", "es_compare",
                           "discrete_phase", "imperfect_csi", "baseline_compare"};
    std::string chosen;
    for (const char* kind : kinds) {
        CLI::App* sub = app.add_subcommand(kind, std::string("run a ") + kind + " scenario");
        sub->add_option("--config", opt.config_path, "scenario file")->required();
        sub->add_option("--out", opt.out_path, "output CSV path")->required();
        sub->add_option("--seed", opt.seed, "root seed");
        sub->add_option("--jobs", opt.jobs, "parallel workers (0 = all hardware threads)");
        sub->add_option("--trials", opt.trials, "override Monte Carlo trials per point");
        sub->add_flag("--quiet", opt.quiet, "suppress progress output");
        sub->callback([kind, &chosen]() { chosen = kind; });
    }

    CLI11_PARSE(app, argc, argv);
    return run(chosen, opt);
}
