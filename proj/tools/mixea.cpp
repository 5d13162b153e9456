// mixea: exact analysis and simulation of pure and mixed (1+1) EAs.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mixea/cli/commands.hpp"
#include "mixea/errors.hpp"
#include "mixea/simd.hpp"

using namespace mixea;
using namespace mixea::cli;

namespace {

struct Common {
    std::string config;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Markov-chain analysis and Monte Carlo simulation of (1+1) EAs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", MIXEA_VERSION);

    bool quiet = false;
    std::string simd = "auto";
    app.add_flag("-q,--quiet", quiet, "no summary line");
    app.add_option("--simd", simd, "kernel backend")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    Common analyze_opts, simulate_opts, design_opts, curve_opts;
    auto* analyze = app.add_subcommand("analyze", "spectral radius, rates and hitting times per strategy");
    add_common(analyze, analyze_opts);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs with optional exact cross-validation");
    add_common(simulate, simulate_opts);
    std::optional<std::uint64_t> runs, seed, max_gens;
    unsigned threads = 0;
    simulate->add_option("--runs", runs, "override simulation.runs");
    simulate->add_option("--seed", seed, "override simulation.seed");
    simulate->add_option("--max-gens", max_gens, "override simulation.max_generations");
    simulate->add_option("--threads", threads, "worker threads, 0 = all cores (results do not depend on it)");

    auto* design = app.add_subcommand("design", "complementarity certificate and designed mixed strategy");
    add_common(design, design_opts);

    auto* curve = app.add_subcommand("curve", "R, T and R*T over a range of spectral radii");
    add_common(curve, curve_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (simd == "scalar") {
        simd::set_backend(simd::Backend::scalar);
    } else if (simd == "avx2" && !simd::set_backend(simd::Backend::avx2)) {
        std::cerr << "error: avx2 kernels are not available on this CPU\n";
        return kExitConfig;
    }

    const Common& common = analyze->parsed()    ? analyze_opts
                           : simulate->parsed() ? simulate_opts
                           : design->parsed()   ? design_opts
                                                : curve_opts;
    try {
        ExperimentConfig config = load_config(common.config);
        CommandResult result;
        if (analyze->parsed()) {
            result = cmd_analyze(config);
        } else if (simulate->parsed()) {
            if (runs) config.simulation.runs = *runs;
            if (seed) config.simulation.seed = *seed;
            if (max_gens) config.simulation.max_generations = *max_gens;
            validate(config);
            result = cmd_simulate(config, threads);
        } else if (design->parsed()) {
            result = cmd_design(config);
        } else {
            result = cmd_curve(config);
        }
        write_outputs(result, common.out);
        if (!quiet) (result.exit_code == kExitOk ? std::cout : std::cerr) << result.summary << "\n";
        return result.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InfeasibleSizeError& e) {
        std::cerr << "infeasible size: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const NotComplementaryError& e) {
        std::cerr << "certificate failed: " << e.what() << "\n";
        return kExitCertificate;
    } catch (const TheoremViolation& e) {
        std::cerr << "theorem violation: " << e.what() << "\n";
        return kExitTheorem;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
