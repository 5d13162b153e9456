#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mixea/chain.hpp"
#include "mixea/mutate.hpp"
#include "mixea/space.hpp"

namespace mixea {

/// Recorded in every report so a run can be replayed.
inline constexpr std::string_view kRngName = "mt19937_64/splitmix64";

inline constexpr std::uint64_t kDefaultMaxGenerations = 10'000'000;

using Rng = std::mt19937_64;

/// Independent stream for replica `run_index`: mt19937_64 seeded with
/// splitmix64(master_seed ^ splitmix64(run_index)).
Rng stream_for(std::uint64_t master_seed, std::uint64_t run_index);

/// Uniform double in [0, 1) from the top 53 bits.
double uniform01(Rng& g);

/// Bit-level mutation procedure (never the dense kernel). per_bit_flip walks
/// the string with geometric gaps between flipped bits, single_bit_flip draws
/// one uniform position.
class BitMutator {
public:
    BitMutator(const OperatorSpec& op, int n);
    StateIndex operator()(StateIndex x, Rng& g) const;

private:
    OperatorKind kind_;
    int n_;
    bool complement_ = false;
    std::vector<double> survival_;  // (1 - rate)^k, k = 0..n
};

/// One application of the operator, building the mutator on the fly.
StateIndex mutate(const OperatorSpec& op, StateIndex x, int n, Rng& g);

struct InitSpec {
    enum class Kind { uniform, fixed, distribution };

    Kind kind = Kind::uniform;
    StateIndex state = 0;              // fixed
    std::vector<double> distribution;  // over all 2^n states

    static InitSpec uniform() { return {}; }
    static InitSpec fixed(StateIndex s) { return {Kind::fixed, s, {}}; }
    static InitSpec custom(std::vector<double> p) { return {Kind::distribution, 0, std::move(p)}; }
};

/// Pure when `q` is empty (operators[0] every generation). `q` may be indexed by
/// bitstring or by level |x|.
struct SimStrategy {
    std::vector<OperatorSpec> operators;
    std::optional<StrategyDistribution> q;
    std::string label;
};

struct RunConfig {
    std::shared_ptr<const FitnessLandscape> landscape;
    SimStrategy strategy;
    std::uint64_t runs = 1;
    std::uint64_t master_seed = 0;
    std::uint64_t max_generations = kDefaultMaxGenerations;
    InitSpec init;
    unsigned threads = 1;  // 0 = hardware concurrency

    /// Throws ConfigError on any violated precondition.
    void validate() const;
};

/// p_0 over all 2^n bitstrings.
std::vector<double> initial_distribution(const RunConfig& config);

struct RunRecord {
    std::uint64_t run_index = 0;
    StateIndex initial = 0;
    std::optional<std::uint64_t> hitting;  // empty when censored at the cap

    bool censored() const { return !hitting.has_value(); }
};

struct RunOutcome {
    std::vector<RunRecord> runs;
    std::uint64_t censored = 0;
    std::optional<double> mean;    // uncensored runs only
    std::optional<double> stderr_;  // needs two or more uncensored runs
    double penalized_mean = 0.0;   // censored runs counted at the cap
    std::uint64_t max_generations = 0;
    std::string rng{kRngName};

    bool no_uncensored_data() const { return !mean.has_value(); }
};

/// Called once per generation with (t, parent, f(parent)), starting at t = 0.
using Observer = std::function<void(std::uint64_t, StateIndex, double)>;

/// Validated config plus per-run lookup tables, shared by all replicas.
class Simulator {
public:
    explicit Simulator(const RunConfig& config);
    RunRecord run(std::uint64_t run_index, const Observer* observer = nullptr) const;

private:
    RunConfig config_;
    double best_ = 0.0;
    std::vector<BitMutator> mutators_;
};

RunRecord run_once(const RunConfig& config, std::uint64_t run_index, const Observer* observer = nullptr);

/// All replicas; the result does not depend on `config.threads`.
RunOutcome estimate(const RunConfig& config);

/// Aggregates records already sorted by run index.
RunOutcome summarize(std::vector<RunRecord> runs, std::uint64_t max_generations);

struct CrossValidation {
    double exact = 0.0;  // p_0 . m, +inf when reachable traps carry mass
    RunOutcome outcome;
    std::optional<double> z;
    bool flagged = false;
    std::string note;
};

/// Compares the empirical mean against the exact p_0 . m of `chain`, which must
/// describe the same landscape and strategy. Flags |z| > 3, an infinite exact
/// value with no censored runs, and censoring under a finite exact value.
CrossValidation cross_validate(const ElitistChain& chain, const RunConfig& config);

/// Same comparison against a precomputed outcome.
CrossValidation cross_validate(const ElitistChain& chain, const RunConfig& config, RunOutcome outcome);

}  // namespace mixea
