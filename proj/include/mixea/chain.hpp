#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixea/linalg.hpp"
#include "mixea/mutate.hpp"
#include "mixea/space.hpp"

namespace mixea {

/// Self-loop probability at or above 1 - kTrapTol marks a non-optimal absorbing state.
inline constexpr double kTrapTol = 1e-12;

/// Transition matrix of a (1+1) EA with strict elitist selection, in canonical
/// form: optimal states first (identity block), then non-optimal states by
/// descending fitness with ties broken by ascending index. Chain states are
/// bitstrings (Domain::states) or levels |x| (Domain::levels).
///
/// Because only strictly better children are accepted and better states come
/// first, the non-optimal block T is lower triangular.
struct ElitistChain {
    Domain domain = Domain::states;
    int n = 0;
    std::string label;
    std::vector<double> fitness;  // indexed by chain state
    Partition partition;
    std::vector<StateIndex> order;      // canonical position -> chain state
    std::vector<std::size_t> position;  // chain state -> canonical position
    DenseMatrix full;

    // Indexed by non-optimal rank (canonical position - optimal_count()).
    std::vector<double> escape;  // probability of moving to a strictly better state
    std::vector<double> diag;    // P(x, x) = 1 - escape

    std::size_t size() const { return order.size(); }
    std::size_t optimal_count() const { return partition.optimal.size(); }
    std::size_t non_optimal_count() const { return partition.non_optimal.size(); }

    MatrixView transient_block() const {
        const std::size_t o = optimal_count();
        const std::size_t m = non_optimal_count();
        return full.block(o, o, m, m);
    }

    /// Chain state at non-optimal rank r.
    StateIndex non_optimal_state(std::size_t r) const { return partition.non_optimal[r]; }
    /// P(x, x) for any chain state.
    double self_loop(StateIndex x) const { return full(position[x], position[x]); }
    /// Number of bitstrings a chain state stands for (C(n, i) for level i).
    double multiplicity(StateIndex x) const;
};

/// Strict elitist selection on top of a mutation kernel over bitstrings.
ElitistChain build_chain(const MutationKernel& kernel, const FitnessLandscape& landscape);

/// Exact lumped chain over levels for |x|-symmetric fitness and an exchangeable operator.
MutationKernel level_kernel(const OperatorSpec& spec, int n);
ElitistChain build_lumped_chain(std::span<const double> level_fitness, const MutationKernel& level_kernel);
ElitistChain build_lumped_chain(std::span<const double> level_fitness, const OperatorSpec& spec);
/// Throws ConfigError when the landscape is not a function of |x|.
std::vector<double> require_level_fitness(const FitnessLandscape& landscape);

/// Non-optimal chain states whose self-loop is 1 within kTrapTol.
std::vector<StateIndex> absorbing_traps(const ElitistChain& chain);

/// rho(T) as the largest self-loop over non-optimal states (0 when there are none).
double spectral_radius(const ElitistChain& chain);

/// 1 - rho(T) evaluated without cancellation.
double min_escape(const ElitistChain& chain);

/// -ln(rho); 0 at rho = 1, +inf at rho = 0. Throws std::domain_error outside [0, 1].
double convergence_rate(double rho);

/// 1/(1 - rho) below 1 - kTrapTol, else +inf.
double asymptotic_hitting_time(double rho);

/// Chain versions, computed from the escape probabilities to keep precision
/// when rho is within 1e-10 of 1.
double convergence_rate(const ElitistChain& chain);
double asymptotic_hitting_time(const ElitistChain& chain);

/// -ln(rho) / (1 - rho), the product R(T) T(T); rho in (0, 1).
double rate_time_product(double rho);

struct HittingTimes {
    bool finite = false;
    std::vector<double> m;  // by non-optimal rank
    double residual = 0.0;         // ||(I - T) m - 1||_inf
    double scaled_residual = 0.0;  // residual / (||I - T||_inf ||m||_inf + 1)
    std::size_t row_swaps = 0;
};

/// Solves (I - T) m = 1 by LU with partial pivoting. finite = false when T has
/// an absorbing trap or the factorization is singular.
HittingTimes hitting_time_vector(const ElitistChain& chain);

/// Forward substitution m(x) = (1 + sum_{y better} T(x, y) m(y)) / escape(x).
/// Independent of the LU path; yields +inf exactly for states that can reach a trap.
std::vector<double> hitting_times_by_substitution(const ElitistChain& chain);

/// Expected hitting time from an initial distribution over chain states.
/// Mass on optimal states contributes 0.
double expected_hitting_time(const ElitistChain& chain, std::span<const double> p0);

struct AnalysisOptions {
    bool verify_with_power_iteration = true;
    std::size_t power_check_max_states = 2048;
    double power_tol = 1e-12;
    std::size_t power_max_iters = 1'000'000;
    double lemma_agreement_tol = 1e-10;
};

struct AnalysisReport {
    std::string label;
    double rho = 0.0;
    double rate = 0.0;
    double hitting_time = 0.0;
    std::optional<PowerIterationResult> power;
    HittingTimes hitting;  // when not finite, m holds the substitution vector (+inf where a trap is reachable)
    double m_min = 0.0;
    double m_max = 0.0;
    double m_mean = 0.0;  // over non-optimal bitstrings (levels weighted by C(n, i))
    std::vector<StateIndex> traps;
};

/// Full analysis. Throws TheoremViolation when the power iteration converges to
/// a different radius than the diagonal rule, or when the hitting-time sandwich
/// min m <= T <= max m fails.
AnalysisReport analyze(const ElitistChain& chain, const AnalysisOptions& options = {});

}  // namespace mixea
