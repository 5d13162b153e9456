#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixea/cli/config.hpp"

namespace mixea::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitInfeasible = 3,
    kExitCertificate = 4,
    kExitTheorem = 5,
};

struct CommandResult {
    int exit_code = kExitOk;
    std::string summary;
    nlohmann::json report;
    std::string report_csv;
    std::optional<std::string> runs_csv;
    std::optional<std::string> curve_csv;
};

inline constexpr const char* kAnalyzeCsvHeader = "strategy,rho_T,rate_R,hitting_T,m_min,m_max,m_mean,traps";

/// A config strategy turned into operators plus an optional strategy table.
struct ResolvedStrategy {
    std::string name;
    std::vector<OperatorSpec> operators;
    std::vector<std::string> operator_names;
    std::optional<StrategyDistribution> q;
    std::optional<DesignedMixedStrategy> design;
};

FitnessLandscape make_landscape(const ExperimentConfig& config);

/// Designed strategies are built on chains of the resolved `mode`.
ResolvedStrategy resolve_strategy(const ExperimentConfig& config, const StrategyConfig& strategy,
                                  const FitnessLandscape& landscape, ChainMode mode);

InitSpec make_init(const ExperimentConfig& config);

/// p_0 from the configured init, mapped onto the chain's states or levels.
std::vector<double> initial_over_chain(const ElitistChain& chain, const ExperimentConfig& config,
                                       const FitnessLandscape& landscape);

CommandResult cmd_analyze(const ExperimentConfig& config);
/// threads = 0 uses every hardware thread; the report does not depend on it.
CommandResult cmd_simulate(const ExperimentConfig& config, unsigned threads = 0);
CommandResult cmd_design(const ExperimentConfig& config);
CommandResult cmd_curve(const ExperimentConfig& config);

/// report.json, report.csv and, when present, runs.csv and curve.csv.
void write_outputs(const CommandResult& result, const std::filesystem::path& dir);

}  // namespace mixea::cli
