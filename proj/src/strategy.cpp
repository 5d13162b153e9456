#include "mixea/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mixea/errors.hpp"

namespace mixea {
namespace {

void require_aligned(std::span<const ElitistChain> chains) {
    if (chains.empty()) throw ConfigError("no chains given");
    const auto& first = chains.front();
    for (const auto& c : chains) {
        if (c.domain != first.domain || c.n != first.n || c.order != first.order) {
            throw ConfigError("chains are not built on the same landscape and domain");
        }
    }
}

std::vector<double> radii_of(std::span<const ElitistChain> chains) {
    std::vector<double> r;
    r.reserve(chains.size());
    for (const auto& c : chains) r.push_back(spectral_radius(c));
    return r;
}

// Operator with the smallest self-loop at non-optimal rank r, skipping `skip`;
// lowest index on ties.
std::size_t argmin_self_loop(std::span<const ElitistChain> chains, std::size_t r, std::size_t skip) {
    std::size_t best = kNoOperator;
    for (std::size_t k = 0; k < chains.size(); ++k) {
        if (k == skip) continue;
        if (best == kNoOperator || chains[k].diag[r] < chains[best].diag[r]) best = k;
    }
    return best;
}

double predicted_radius(std::span<const ElitistChain> chains, const StrategyDistribution& q) {
    const auto loops = mixture_self_loops(chains, q);
    const auto& first = chains.front();
    double rho = 0.0;
    for (std::size_t r = 0; r < first.non_optimal_count(); ++r) {
        rho = std::max(rho, loops[first.non_optimal_state(r)]);
    }
    return rho;
}

DesignedMixedStrategy design_from_mutual(std::span<const ElitistChain> chains, ComplementarityCertificate cert,
                                         FreeStateRule free_rule) {
    const auto& first = chains.front();
    const std::size_t dim = first.size();
    const std::size_t kappa = chains.size();
    std::vector<double> table(dim * kappa, 0.0);
    std::vector<DesignRule> rule(dim, DesignRule::free);
    std::vector<std::size_t> rule_op(dim, kNoOperator);

    for (const auto& w : cert.witnesses) {
        rule[w.state] = DesignRule::forced;
        rule_op[w.state] = w.chosen;
    }
    for (std::size_t x = 0; x < dim; ++x) {
        double* row = table.data() + x * kappa;
        if (rule[x] == DesignRule::forced) {
            row[rule_op[x]] = 1.0;
        } else if (free_rule == FreeStateRule::first_operator) {
            row[0] = 1.0;
        } else {
            std::fill(row, row + kappa, 1.0 / double(kappa));
        }
    }

    DesignedMixedStrategy d{StrategyDistribution(kappa, first.domain, std::move(table)),
                            ComplementarityMode::mutual,
                            kNoOperator,
                            cert.threshold,
                            0.0,
                            std::move(rule),
                            std::move(rule_op),
                            cert,
                            cert};
    d.predicted_rho = predicted_radius(chains, d.q);
    return d;
}

DesignedMixedStrategy design_from_pairwise(std::span<const ElitistChain> chains, ComplementarityCertificate cert,
                                           ComplementarityCertificate mutual) {
    const auto& first = chains.front();
    const std::size_t dim = first.size();
    const std::size_t base = cert.base;
    const std::size_t helper = cert.helper;
    std::vector<double> table(dim * 2, 0.0);
    std::vector<DesignRule> rule(dim, DesignRule::base);
    std::vector<std::size_t> rule_op(dim, base);
    for (const auto& w : cert.witnesses) {
        rule[w.state] = DesignRule::forced;
        rule_op[w.state] = helper;
    }
    for (std::size_t x = 0; x < dim; ++x) table[x * 2 + rule_op[x]] = 1.0;

    DesignedMixedStrategy d{StrategyDistribution(2, first.domain, std::move(table)),
                            ComplementarityMode::pairwise,
                            base,
                            cert.threshold,
                            0.0,
                            std::move(rule),
                            std::move(rule_op),
                            std::move(cert),
                            std::move(mutual)};
    d.predicted_rho = predicted_radius(chains, d.q);
    return d;
}

void require_guarantee(const DesignedMixedStrategy& d) {
    if (!(d.predicted_rho < d.bound - kComplementTol) && d.bound > kComplementTol) {
        throw TheoremViolation("designed strategy radius " + std::to_string(d.predicted_rho) +
                               " is not below the guaranteed bound " + std::to_string(d.bound));
    }
}

}  // namespace

ComplementarityCertificate check_pairwise(std::span<const ElitistChain> chains, std::size_t base,
                                          std::size_t helper) {
    require_aligned(chains);
    if (base >= chains.size() || helper >= chains.size()) throw ConfigError("pairwise check: operator out of range");
    ComplementarityCertificate cert;
    cert.mode = ComplementarityMode::pairwise;
    cert.base = base;
    cert.helper = helper;
    cert.radii = radii_of(chains);
    cert.threshold = cert.radii[base];

    const auto& b = chains[base];
    const auto& h = chains[helper];
    for (std::size_t r = 0; r < b.non_optimal_count(); ++r) {
        if (std::fabs(b.diag[r] - cert.threshold) > kComplementTol) continue;
        ComplementarityWitness w{b.non_optimal_state(r), base, helper, b.diag[r], h.diag[r], cert.threshold};
        if (h.diag[r] < cert.threshold - kComplementTol) {
            cert.witnesses.push_back(w);
        } else {
            w.chosen = kNoOperator;
            cert.violations.push_back(w);
        }
    }
    cert.holds = cert.violations.empty();
    return cert;
}

ComplementarityCertificate check_mutual(std::span<const ElitistChain> chains) {
    if (chains.size() < 2) throw ConfigError("mutual complementarity needs at least two operators");
    require_aligned(chains);
    ComplementarityCertificate cert;
    cert.mode = ComplementarityMode::mutual;
    cert.radii = radii_of(chains);
    cert.threshold = *std::min_element(cert.radii.begin(), cert.radii.end());

    const std::size_t m = chains.front().non_optimal_count();
    for (std::size_t r = 0; r < m; ++r) {
        const StateIndex x = chains.front().non_optimal_state(r);
        for (std::size_t l = 0; l < chains.size(); ++l) {
            const double pl = chains[l].diag[r];
            if (pl < cert.threshold - kComplementTol) continue;
            const std::size_t k = argmin_self_loop(chains, r, l);
            ComplementarityWitness w{x, l, k, pl, chains[k].diag[r], cert.threshold};
            if (chains[k].diag[r] < cert.threshold - kComplementTol) {
                cert.witnesses.push_back(w);
            } else {
                w.chosen = kNoOperator;
                cert.violations.push_back(w);
            }
        }
    }
    cert.holds = cert.violations.empty();
    return cert;
}

DesignedMixedStrategy design_mixed(std::span<const ElitistChain> chains, FreeStateRule free_rule,
                                   DesignMode mode) {
    if (chains.size() < 2) throw ConfigError("designing a mixed strategy needs at least two operators");
    auto mutual = check_mutual(chains);

    if (mutual.holds && mode != DesignMode::pairwise) {
        auto d = design_from_mutual(chains, mutual, free_rule);
        require_guarantee(d);
        return d;
    }
    if (mode == DesignMode::mutual) {
        throw NotComplementaryError("operators are not mutually complementary", std::move(mutual));
    }
    if (chains.size() != 2) {
        throw NotComplementaryError("operators are not mutually complementary (pairwise designs need exactly two)",
                                    std::move(mutual));
    }

    std::optional<DesignedMixedStrategy> best;
    for (std::size_t base = 0; base < 2; ++base) {
        auto cert = check_pairwise(chains, base, 1 - base);
        if (!cert.holds) continue;
        auto d = design_from_pairwise(chains, std::move(cert), mutual);
        if (!best || d.predicted_rho < best->predicted_rho) best = std::move(d);
    }
    if (!best) {
        throw NotComplementaryError("no complementarity relation holds between the two operators", std::move(mutual));
    }
    require_guarantee(*best);
    return std::move(*best);
}

std::vector<double> mixture_self_loops(std::span<const ElitistChain> chains, const StrategyDistribution& q) {
    require_aligned(chains);
    const auto& first = chains.front();
    if (q.kappa() != chains.size() || q.dim() != first.size() || q.domain() != first.domain) {
        throw ConfigError("strategy table does not match the chains");
    }
    std::vector<double> loops(first.size(), 1.0);
    for (std::size_t r = 0; r < first.non_optimal_count(); ++r) {
        const StateIndex x = first.non_optimal_state(r);
        double s = 0.0;
        for (std::size_t k = 0; k < chains.size(); ++k) s += q(x, k) * chains[k].diag[r];
        loops[x] = s;
    }
    return loops;
}

StrategyFigures figures_of(const ElitistChain& chain) {
    return {chain.label, spectral_radius(chain), convergence_rate(chain), asymptotic_hitting_time(chain)};
}

DominanceReport dominance_report(std::span<const ElitistChain> pure, const ElitistChain& mixture,
                                 const StrategyDistribution& q) {
    DominanceReport rep;
    for (const auto& c : pure) rep.pure.push_back(figures_of(c));
    rep.mixture = figures_of(mixture);
    rep.predicted_rho = 0.0;
    const auto loops = mixture_self_loops(pure, q);
    for (std::size_t r = 0; r < pure.front().non_optimal_count(); ++r) {
        rep.predicted_rho = std::max(rep.predicted_rho, loops[pure.front().non_optimal_state(r)]);
    }

    if (std::fabs(rep.predicted_rho - rep.mixture.rho) > kComplementTol) {
        rep.violations.push_back("mixture radius " + std::to_string(rep.mixture.rho) +
                                 " differs from the self-loop identity " + std::to_string(rep.predicted_rho));
    }

    double max_rho = 0.0;
    double min_rate = std::numeric_limits<double>::infinity();
    double max_time = 0.0;
    for (const auto& f : rep.pure) {
        max_rho = std::max(max_rho, f.rho);
        min_rate = std::min(min_rate, f.rate);
        max_time = std::max(max_time, f.hitting_time);
    }
    if (rep.mixture.rho > max_rho + kComplementTol) {
        rep.violations.push_back("mixture radius " + std::to_string(rep.mixture.rho) + " exceeds the worst pure radius " +
                                 std::to_string(max_rho));
    }
    if (min_rate > 0.0) {
        rep.rate_not_worse = rep.mixture.rate >= min_rate - 1e-11;
        if (!rep.rate_not_worse) {
            rep.violations.push_back("mixture convergence rate " + std::to_string(rep.mixture.rate) +
                                     " below the worst pure rate " + std::to_string(min_rate));
        }
    }
    if (std::isfinite(max_time)) {
        rep.time_not_worse = rep.mixture.hitting_time <= max_time * (1.0 + 1e-9) + 1e-9;
        if (!rep.time_not_worse) {
            rep.violations.push_back("mixture asymptotic hitting time " + std::to_string(rep.mixture.hitting_time) +
                                     " exceeds the worst pure value " + std::to_string(max_time));
        }
    }
    return rep;
}

}  // namespace mixea

namespace mixea {

ChainMode resolve_chain_mode(const FitnessLandscape& landscape, ChainMode mode) {
    if (mode != ChainMode::automatic) return mode;
    if (landscape.n() <= kDenseMaxBits) return ChainMode::full;
    if (level_fitness(landscape)) return ChainMode::lumped;
    throw InfeasibleSizeError("n=" + std::to_string(landscape.n()) + " exceeds the dense limit of " +
                              std::to_string(kDenseMaxBits) +
                              " bits and the landscape is not |x|-symmetric, so no exact route applies");
}

ElitistChain build_strategy_chain(const FitnessLandscape& landscape, std::span<const OperatorSpec> operators,
                                  const StrategyDistribution* q, ChainMode mode, std::string label) {
    if (operators.empty()) throw ConfigError("strategy has no operators");
    mode = resolve_chain_mode(landscape, mode);
    const int n = landscape.n();

    ElitistChain chain;
    if (mode == ChainMode::full) {
        if (q == nullptr) {
            chain = build_chain(make_kernel(operators.front(), n), landscape);
        } else {
            std::vector<MutationKernel> kernels;
            kernels.reserve(operators.size());
            for (const auto& op : operators) kernels.push_back(make_kernel(op, n));
            const StrategyDistribution states = q->domain() == Domain::levels ? expand_levels(*q, n) : *q;
            chain = build_chain(mix(kernels, states), landscape);
        }
    } else {
        const auto levels = require_level_fitness(landscape);
        if (q == nullptr) {
            chain = build_lumped_chain(levels, operators.front());
        } else {
            auto collapsed = collapse_to_levels(*q, n);
            if (!collapsed) throw ConfigError("strategy table is not a function of |x|; the lumped chain does not apply");
            std::vector<MutationKernel> kernels;
            kernels.reserve(operators.size());
            for (const auto& op : operators) kernels.push_back(level_kernel(op, n));
            chain = build_lumped_chain(levels, mix(kernels, *collapsed));
        }
    }
    if (!label.empty()) chain.label = std::move(label);
    return chain;
}

std::vector<ElitistChain> build_pure_chains(const FitnessLandscape& landscape, std::span<const OperatorSpec> operators,
                                            ChainMode mode) {
    std::vector<ElitistChain> out;
    out.reserve(operators.size());
    for (const auto& op : operators) out.push_back(build_strategy_chain(landscape, std::span(&op, 1), nullptr, mode));
    return out;
}

}  // namespace mixea
