#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixea/chain.hpp"
#include "mixea/mutate.hpp"

namespace mixea {

/// Equality with rho(T) and strict-inequality margins on self-loop probabilities.
inline constexpr double kComplementTol = 1e-12;

inline constexpr std::size_t kNoOperator = std::numeric_limits<std::size_t>::max();

enum class ComplementarityMode { pairwise, mutual };

/// One (state, triggering operator) pair from a complementarity check.
struct ComplementarityWitness {
    StateIndex state = 0;
    std::size_t trigger = 0;          // operator whose self-loop met the hypothesis
    std::size_t chosen = kNoOperator;  // operator meeting the conclusion, kNoOperator for a violation
    double trigger_self_loop = 0.0;
    double chosen_self_loop = 0.0;  // best (smallest) available value for violations
    double threshold = 0.0;
};

struct ComplementarityCertificate {
    ComplementarityMode mode = ComplementarityMode::mutual;
    bool holds = false;
    double threshold = 0.0;           // rho(T_base) for pairwise, min_k rho(T_k) for mutual
    std::size_t base = kNoOperator;   // pairwise only: operator whose worst states are examined
    std::size_t helper = kNoOperator; // pairwise only
    std::vector<double> radii;        // rho(T_k) per operator
    std::vector<ComplementarityWitness> witnesses;
    std::vector<ComplementarityWitness> violations;
};

/// Pairwise check with the hypothesis on `base`: at every non-optimal x with
/// P_base(x, x) = rho(T_base), require P_helper(x, x) < rho(T_base).
/// When this holds, a mixture that switches to `helper` on those states beats
/// EA(base). Both orientations are obtained by swapping the indices.
ComplementarityCertificate check_pairwise(std::span<const ElitistChain> chains, std::size_t base,
                                          std::size_t helper);

/// Mutual check: for every non-optimal x and operator l with
/// P_l(x, x) >= min_k rho(T_k), some k != l has P_k(x, x) < min_k rho(T_k).
/// Throws ConfigError for fewer than two chains.
ComplementarityCertificate check_mutual(std::span<const ElitistChain> chains);

enum class FreeStateRule { uniform, first_operator };
enum class DesignMode { automatic, mutual, pairwise };

enum class DesignRule { forced, base, free };

struct DesignedMixedStrategy {
    StrategyDistribution q;
    ComplementarityMode mode = ComplementarityMode::mutual;
    std::size_t base = kNoOperator;  // pairwise designs: the operator being improved on
    double bound = 0.0;              // the design guarantees rho(T_q) < bound
    double predicted_rho = 0.0;      // max_x sum_k q_k(x) P_k(x, x)
    std::vector<DesignRule> rule;    // per chain state
    std::vector<std::size_t> rule_operator;  // per chain state, kNoOperator for free states
    ComplementarityCertificate certificate;  // the certificate the design rests on
    ComplementarityCertificate mutual;       // always the mutual check, even when it failed
};

/// Raised by design_mixed when no applicable certificate holds.
class NotComplementaryError : public std::runtime_error {
public:
    NotComplementaryError(const std::string& what, ComplementarityCertificate certificate)
        : std::runtime_error(what), certificate_(std::move(certificate)) {}
    const ComplementarityCertificate& certificate() const { return certificate_; }

private:
    ComplementarityCertificate certificate_;
};

/// Builds the mixed strategy from the constructive proofs.
///
/// Mutual mode: every state where some operator reaches min_k rho(T_k) gets the
/// unit vector on the operator with the smallest self-loop there (lowest index
/// on ties); the rest follow `free_rule`. Guarantees rho(T_q) < min_k rho(T_k).
///
/// Pairwise mode (two operators): the states where the base operator attains its
/// radius switch to the helper, everything else uses the base operator.
/// Guarantees rho(T_q) < rho(T_base).
///
/// `automatic` uses mutual when it holds, otherwise the pairwise orientation
/// that yields the smaller predicted radius. Throws ConfigError for fewer than
/// two operators and NotComplementaryError when nothing applies.
DesignedMixedStrategy design_mixed(std::span<const ElitistChain> chains,
                                   FreeStateRule free_rule = FreeStateRule::uniform,
                                   DesignMode mode = DesignMode::automatic);

/// sum_k q_k(x) P_k(x, x) per chain state: the self-loops of the mixture chain.
std::vector<double> mixture_self_loops(std::span<const ElitistChain> chains, const StrategyDistribution& q);

struct StrategyFigures {
    std::string label;
    double rho = 0.0;
    double rate = 0.0;
    double hitting_time = 0.0;
};

StrategyFigures figures_of(const ElitistChain& chain);

struct DominanceReport {
    std::vector<StrategyFigures> pure;
    StrategyFigures mixture;
    double predicted_rho = 0.0;  // from the self-loop identity
    bool rate_not_worse = true;  // R(T_q) >= min_k R(T_k)
    bool time_not_worse = true;  // T(T_q) <= max_k T(T_k)
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Compares the mixture chain against every pure chain. Failures land in
/// `violations` (they indicate a bug, not a property of the input).
DominanceReport dominance_report(std::span<const ElitistChain> pure, const ElitistChain& mixture,
                                 const StrategyDistribution& q);

enum class ChainMode { full, lumped, automatic };

/// Elitist chain for the strategy "operators mixed by q" (q = nullptr: the pure
/// strategy operators[0]). `full` builds 2^n x 2^n kernels, `lumped` the level
/// chain (landscape and q must be functions of |x|), `automatic` takes full up
/// to the dense limit and lumped beyond it. Throws InfeasibleSizeError when
/// neither route applies.
ElitistChain build_strategy_chain(const FitnessLandscape& landscape, std::span<const OperatorSpec> operators,
                                  const StrategyDistribution* q, ChainMode mode, std::string label = {});

/// The pure chains for each operator under the same route.
std::vector<ElitistChain> build_pure_chains(const FitnessLandscape& landscape, std::span<const OperatorSpec> operators,
                                            ChainMode mode);

/// Resolve `automatic` to the concrete route for this landscape.
ChainMode resolve_chain_mode(const FitnessLandscape& landscape, ChainMode mode);

}  // namespace mixea
