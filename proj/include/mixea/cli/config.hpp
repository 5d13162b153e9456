#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixea/montecarlo.hpp"
#include "mixea/space.hpp"
#include "mixea/strategy.hpp"

namespace mixea::cli {

struct LandscapeConfig {
    LandscapeKind kind = LandscapeKind::onemax;
    int n = 1;
    std::optional<KnapsackParams> knapsack;
    std::vector<double> table;

    friend bool operator==(const LandscapeConfig&, const LandscapeConfig&) = default;
};

struct OperatorConfig {
    std::string name;
    OperatorSpec spec;

    friend bool operator==(const OperatorConfig&, const OperatorConfig&) = default;
};

enum class StrategyType { pure, mixed_uniform, mixed_table, designed };

struct StrategyConfig {
    std::string name;
    StrategyType type = StrategyType::pure;
    std::vector<std::string> operators;  // pure: exactly one
    Domain domain = Domain::states;      // mixed_table
    std::vector<std::vector<double>> table;
    FreeStateRule free_rule = FreeStateRule::uniform;  // designed
    DesignMode design_mode = DesignMode::automatic;    // designed

    friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

struct InitConfig {
    InitSpec::Kind kind = InitSpec::Kind::uniform;
    StateIndex state = 0;
    std::vector<double> distribution;

    friend bool operator==(const InitConfig&, const InitConfig&) = default;
};

struct AnalysisConfig {
    ChainMode mode = ChainMode::automatic;
    bool verify_power_iteration = true;

    friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

struct SimulationConfig {
    std::uint64_t runs = 100;
    std::uint64_t seed = 0;
    std::uint64_t max_generations = kDefaultMaxGenerations;
    InitConfig init;
    bool cross_validate = true;

    friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

struct DesignConfig {
    std::vector<std::string> operators;  // empty: all declared operators
    FreeStateRule free_rule = FreeStateRule::uniform;
    DesignMode mode = DesignMode::mutual;

    friend bool operator==(const DesignConfig&, const DesignConfig&) = default;
};

struct CurveConfig {
    double rho_min = 0.5;
    double rho_max = 0.99;
    double step = 0.01;

    friend bool operator==(const CurveConfig&, const CurveConfig&) = default;
};

struct ExperimentConfig {
    std::string name;
    std::optional<LandscapeConfig> landscape;
    std::vector<OperatorConfig> operators;
    std::vector<StrategyConfig> strategies;
    AnalysisConfig analysis;
    SimulationConfig simulation;
    DesignConfig design;
    CurveConfig curve;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

    /// Index into `operators`; throws ConfigError for unknown names.
    std::size_t operator_index(const std::string& name) const;
};

/// Throws ConfigError with the offending key on any schema or value problem.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical form with every default spelled out.
nlohmann::json to_json(const ExperimentConfig& config);

/// "fnv1a64:<16 hex digits>" over the canonical serialization.
std::string config_hash(const ExperimentConfig& config);

/// Checks cross-references (operator names, table shapes) and the curve range.
void validate(const ExperimentConfig& config);

std::string_view to_string(StrategyType t);
std::string_view to_string(ChainMode m);
std::string_view to_string(FreeStateRule r);
std::string_view to_string(DesignMode m);
std::string_view to_string(Domain d);

}  // namespace mixea::cli
