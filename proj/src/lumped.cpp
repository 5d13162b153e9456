// Exact aggregation of the bitstring chain into levels |x| = 0..n.
//
// Valid when fitness depends on |x| only and the operator treats bit
// positions exchangeably: every state on level i then has the same
// distribution over child levels, so the level process is itself Markov.

#include <cmath>

#include "chain_internal.hpp"
#include "mixea/errors.hpp"

namespace mixea {

namespace {

double log_choose(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

}  // namespace

MutationKernel level_kernel(const OperatorSpec& spec, int n) {
    spec.validate();
    if (n < 1) throw ConfigError("level kernel needs n >= 1");
    const auto dim = static_cast<std::size_t>(n) + 1;
    MutationKernel k{n, Domain::levels, DenseMatrix(dim, dim), spec.label() + "@levels", spec};

    if (spec.kind == OperatorKind::single_bit_flip) {
        for (int i = 0; i <= n; ++i) {
            if (i > 0) k.matrix(i, i - 1) = double(i) / n;
            if (i < n) k.matrix(i, i + 1) = double(n - i) / n;
        }
        return k;
    }

    // From level i: a of the i ones flip down, b of the n - i zeros flip up,
    // landing on level i - a + b.
    const double log_p = std::log(spec.p);
    const double log_q = std::log1p(-spec.p);
    for (int i = 0; i <= n; ++i) {
        auto row = k.matrix.row(static_cast<std::size_t>(i));
        for (int a = 0; a <= i; ++a) {
            for (int b = 0; b <= n - i; ++b) {
                const double lp = log_choose(i, a) + log_choose(n - i, b) + (a + b) * log_p + (n - a - b) * log_q;
                row[static_cast<std::size_t>(i - a + b)] += std::exp(lp);
            }
        }
    }
    return k;
}

ElitistChain build_lumped_chain(std::span<const double> level_fitness, const MutationKernel& kernel) {
    if (kernel.domain != Domain::levels) throw ConfigError("build_lumped_chain: kernel is not over levels");
    if (level_fitness.size() != kernel.size()) {
        throw ConfigError("build_lumped_chain: need n + 1 = " + std::to_string(kernel.size()) +
                          " level fitness values, got " + std::to_string(level_fitness.size()));
    }
    for (double f : level_fitness) {
        if (!std::isfinite(f)) throw ConfigError("build_lumped_chain: non-finite level fitness");
    }
    return detail::build_elitist(kernel.matrix, std::vector<double>(level_fitness.begin(), level_fitness.end()),
                                 Domain::levels, kernel.n, kernel.label);
}

ElitistChain build_lumped_chain(std::span<const double> level_fitness, const OperatorSpec& spec) {
    if (level_fitness.size() < 2) throw ConfigError("build_lumped_chain: need at least two levels");
    return build_lumped_chain(level_fitness, level_kernel(spec, static_cast<int>(level_fitness.size()) - 1));
}

std::vector<double> require_level_fitness(const FitnessLandscape& landscape) {
    auto levels = level_fitness(landscape);
    if (!levels) {
        throw ConfigError(std::string(to_string(landscape.kind())) +
                          " landscape is not a function of |x|; the lumped chain does not apply");
    }
    return *levels;
}

}  // namespace mixea
