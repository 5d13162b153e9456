#include "mixea/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chain_internal.hpp"
#include "mixea/errors.hpp"
#include "mixea/simd.hpp"

namespace mixea {

namespace detail {

ElitistChain build_elitist(const DenseMatrix& mutation, std::vector<double> fitness, Domain domain, int n,
                           std::string label) {
    ElitistChain c;
    c.domain = domain;
    c.n = n;
    c.label = std::move(label);
    c.fitness = std::move(fitness);
    c.partition = partition_by_fitness(c.fitness);

    const std::size_t dim = c.fitness.size();
    c.order.reserve(dim);
    c.order.insert(c.order.end(), c.partition.optimal.begin(), c.partition.optimal.end());
    c.order.insert(c.order.end(), c.partition.non_optimal.begin(), c.partition.non_optimal.end());
    c.position.assign(dim, 0);
    for (std::size_t pos = 0; pos < dim; ++pos) c.position[c.order[pos]] = pos;

    c.full = DenseMatrix(dim, dim);
    const std::size_t opt = c.optimal_count();
    c.escape.assign(c.non_optimal_count(), 0.0);
    c.diag.assign(c.non_optimal_count(), 0.0);

    for (std::size_t pos = 0; pos < dim; ++pos) {
        const StateIndex x = c.order[pos];
        const double fx = c.fitness[x];
        const auto prow = mutation.row(x);
        auto out = c.full.row(pos);
        double escape = 0.0;
        for (std::size_t y = 0; y < dim; ++y) {
            if (c.fitness[y] > fx && prow[y] != 0.0) {
                out[c.position[y]] = prow[y];
                escape += prow[y];
            }
        }
        out[pos] = 1.0 - escape;
        if (pos >= opt) {
            c.escape[pos - opt] = escape;
            c.diag[pos - opt] = 1.0 - escape;
        }
    }
    return c;
}

}  // namespace detail

double ElitistChain::multiplicity(StateIndex x) const {
    if (domain == Domain::states) return 1.0;
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0)));
}

ElitistChain build_chain(const MutationKernel& kernel, const FitnessLandscape& landscape) {
    if (kernel.domain != Domain::states) throw ConfigError("build_chain: kernel is over levels, not bitstrings");
    if (kernel.n != landscape.n()) {
        throw ConfigError("build_chain: kernel n=" + std::to_string(kernel.n) + " but landscape n=" +
                          std::to_string(landscape.n()));
    }
    std::vector<double> fitness(landscape.values().begin(), landscape.values().end());
    return detail::build_elitist(kernel.matrix, std::move(fitness), Domain::states, kernel.n, kernel.label);
}

std::vector<StateIndex> absorbing_traps(const ElitistChain& chain) {
    std::vector<StateIndex> traps;
    for (std::size_t r = 0; r < chain.escape.size(); ++r) {
        if (chain.escape[r] <= kTrapTol) traps.push_back(chain.non_optimal_state(r));
    }
    return traps;
}

double spectral_radius(const ElitistChain& chain) {
    if (chain.diag.empty()) return 0.0;
    return simd::max_value(chain.diag);
}

double min_escape(const ElitistChain& chain) {
    if (chain.escape.empty()) return 1.0;
    return *std::min_element(chain.escape.begin(), chain.escape.end());
}

double convergence_rate(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("convergence_rate: rho outside [0, 1]");
    if (rho == 0.0) return std::numeric_limits<double>::infinity();
    if (rho == 1.0) return 0.0;
    return -std::log(rho);
}

double asymptotic_hitting_time(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("asymptotic_hitting_time: rho outside [0, 1]");
    if (rho >= 1.0 - kTrapTol) return std::numeric_limits<double>::infinity();
    return 1.0 / (1.0 - rho);
}

double convergence_rate(const ElitistChain& chain) {
    const double e = min_escape(chain);
    if (e >= 1.0) return std::numeric_limits<double>::infinity();
    if (e <= 0.0) return 0.0;
    return -std::log1p(-e);
}

double asymptotic_hitting_time(const ElitistChain& chain) {
    const double e = min_escape(chain);
    if (e <= kTrapTol) return std::numeric_limits<double>::infinity();
    return 1.0 / e;
}

double rate_time_product(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("rate_time_product: rho must lie in (0, 1)");
    return -std::log(rho) / (1.0 - rho);
}

HittingTimes hitting_time_vector(const ElitistChain& chain) {
    HittingTimes h;
    const std::size_t m = chain.non_optimal_count();
    if (m == 0) {
        h.finite = true;
        return h;
    }
    if (min_escape(chain) <= kTrapTol) return h;

    const MatrixView t = chain.transient_block();
    DenseMatrix a(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        auto dst = a.row(i);
        const auto src = t.row(i);
        for (std::size_t j = 0; j < m; ++j) dst[j] = -src[j];
        dst[i] = chain.escape[i];
    }
    LuDecomposition lu(std::move(a));
    h.row_swaps = lu.row_swaps();
    if (lu.singular()) return h;
    h.m = lu.solve(std::vector<double>(m, 1.0));
    if (!std::all_of(h.m.begin(), h.m.end(), [](double v) { return std::isfinite(v); })) {
        h.m.clear();
        return h;
    }
    h.finite = true;

    // Residual with the diagonal taken from the escape mass, so the check does
    // not lose digits to 1 - P(x, x).
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double off = simd::dot(t.row(i), h.m) - t(i, i) * h.m[i];
        worst = std::max(worst, std::fabs(chain.escape[i] * h.m[i] - off - 1.0));
    }
    h.residual = worst;
    double a_norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double row_abs = simd::sum(t.row(i)) - t(i, i) + chain.escape[i];
        a_norm = std::max(a_norm, row_abs);
    }
    h.scaled_residual = worst / (a_norm * simd::max_abs(h.m) + 1.0);
    return h;
}

std::vector<double> hitting_times_by_substitution(const ElitistChain& chain) {
    const std::size_t m = chain.non_optimal_count();
    const MatrixView t = chain.transient_block();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (chain.escape[i] <= kTrapTol) {
            out[i] = inf;
            continue;
        }
        double acc = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            const double p = t(i, j);
            if (p != 0.0) acc += p * out[j];
        }
        out[i] = acc / chain.escape[i];
    }
    return out;
}

double expected_hitting_time(const ElitistChain& chain, std::span<const double> p0) {
    if (p0.size() != chain.size()) throw ConfigError("initial distribution has the wrong length");
    const HittingTimes h = hitting_time_vector(chain);
    const std::vector<double> m = h.finite ? h.m : hitting_times_by_substitution(chain);
    double total = 0.0;
    for (std::size_t r = 0; r < m.size(); ++r) {
        const double w = p0[chain.non_optimal_state(r)];
        if (w != 0.0) total += w * m[r];
    }
    return total;
}

AnalysisReport analyze(const ElitistChain& chain, const AnalysisOptions& options) {
    AnalysisReport rep;
    rep.label = chain.label;
    rep.rho = spectral_radius(chain);
    rep.rate = convergence_rate(chain);
    rep.hitting_time = asymptotic_hitting_time(chain);
    rep.traps = absorbing_traps(chain);

    if (options.verify_with_power_iteration && chain.non_optimal_count() <= options.power_check_max_states) {
        rep.power = power_iteration_radius(chain.transient_block(), options.power_tol, options.power_max_iters);
        if (rep.power->converged && std::fabs(rep.power->value - rep.rho) > options.lemma_agreement_tol) {
            throw TheoremViolation(chain.label + ": max self-loop " + std::to_string(rep.rho) +
                                   " disagrees with power iteration " + std::to_string(rep.power->value));
        }
    }

    rep.hitting = hitting_time_vector(chain);
    if (!rep.hitting.finite) rep.hitting.m = hitting_times_by_substitution(chain);
    if (rep.hitting.m.empty()) {
        rep.m_min = rep.m_max = rep.m_mean = 0.0;
        return rep;
    }
    const auto& m = rep.hitting.m;
    rep.m_min = *std::min_element(m.begin(), m.end());
    rep.m_max = *std::max_element(m.begin(), m.end());
    double weighted = 0.0;
    double weight = 0.0;
    for (std::size_t r = 0; r < m.size(); ++r) {
        const double w = chain.multiplicity(chain.non_optimal_state(r));
        weighted += w * m[r];
        weight += w;
    }
    rep.m_mean = weighted / weight;
    if (!rep.hitting.finite) return rep;

    const double slack = 1e-9 * std::max(1.0, rep.m_max);
    if (rep.hitting_time < rep.m_min - slack || rep.hitting_time > rep.m_max + slack) {
        throw TheoremViolation(chain.label + ": asymptotic hitting time " + std::to_string(rep.hitting_time) +
                               " outside [min m, max m] = [" + std::to_string(rep.m_min) + ", " +
                               std::to_string(rep.m_max) + "]");
    }
    return rep;
}

}  // namespace mixea
