#include "mixea/mutate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <charconv>

#include "mixea/errors.hpp"
#include "mixea/simd.hpp"

namespace mixea {
namespace {

void check_dense_bits(int n, int max_bits) {
    if (n < 1) throw ConfigError("bit count must be at least 1");
    if (n > max_bits) {
        throw InfeasibleSizeError("n=" + std::to_string(n) + " exceeds the dense-matrix limit of " +
                                  std::to_string(max_bits) +
                                  " bits; use the lumped (level) analysis for |x|-symmetric landscapes");
    }
}

void check_stochastic(const MutationKernel& k) {
    const double err = max_row_sum_error(k.matrix.view());
    if (err > kStochasticTol) {
        throw TheoremViolation(k.label + ": row sums deviate from 1 by " + std::to_string(err));
    }
}

}  // namespace

std::string OperatorSpec::label() const {
    if (kind == OperatorKind::single_bit_flip) return "single_bit_flip";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, p);
    return "per_bit_flip(" + std::string(buf, res.ptr) + ")";
}

void OperatorSpec::validate() const {
    if (kind == OperatorKind::per_bit_flip && !(p > 0.0 && p < 1.0)) {
        throw ConfigError("per_bit_flip probability must lie strictly inside (0, 1), got " + std::to_string(p));
    }
}

MutationKernel per_bit_flip(int n, double p, int max_bits) {
    OperatorSpec::per_bit(p).validate();
    check_dense_bits(n, max_bits);
    const std::size_t dim = std::size_t{1} << n;

    std::vector<double> by_distance(static_cast<std::size_t>(n) + 1);
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    for (int h = 0; h <= n; ++h) {
        const double v = std::exp(h * log_p + (n - h) * log_q);
        by_distance[static_cast<std::size_t>(h)] = v < 1e-300 ? 0.0 : v;
    }

    MutationKernel k{n, Domain::states, DenseMatrix(dim, dim), OperatorSpec::per_bit(p).label(),
                     OperatorSpec::per_bit(p)};
    for (std::size_t x = 0; x < dim; ++x) {
        auto row = k.matrix.row(x);
        for (std::size_t y = 0; y < dim; ++y) row[y] = by_distance[static_cast<std::size_t>(std::popcount(x ^ y))];
    }
    check_stochastic(k);
    return k;
}

MutationKernel single_bit_flip(int n, int max_bits) {
    check_dense_bits(n, max_bits);
    const std::size_t dim = std::size_t{1} << n;
    MutationKernel k{n, Domain::states, DenseMatrix(dim, dim), "single_bit_flip", OperatorSpec::single_bit()};
    const double w = 1.0 / n;
    for (std::size_t x = 0; x < dim; ++x) {
        for (int i = 0; i < n; ++i) k.matrix(x, x ^ (std::size_t{1} << i)) = w;
    }
    check_stochastic(k);
    return k;
}

MutationKernel make_kernel(const OperatorSpec& spec, int n, int max_bits) {
    return spec.kind == OperatorKind::per_bit_flip ? per_bit_flip(n, spec.p, max_bits) : single_bit_flip(n, max_bits);
}

StrategyDistribution::StrategyDistribution(std::size_t kappa, Domain domain, std::vector<double> table)
    : kappa_(kappa), domain_(domain), table_(std::move(table)) {
    if (kappa_ == 0) throw ConfigError("strategy distribution needs at least one operator");
    if (table_.size() % kappa_ != 0) throw ConfigError("strategy table size is not a multiple of kappa");
    for (std::size_t x = 0; x < dim(); ++x) {
        double total = 0.0;
        for (double w : weights(x)) {
            if (!(w >= 0.0 && w <= 1.0)) {
                throw ConfigError("strategy weight outside [0, 1] at entry " + std::to_string(x));
            }
            total += w;
        }
        if (std::fabs(total - 1.0) > kStochasticTol) {
            throw ConfigError("strategy weights at entry " + std::to_string(x) + " sum to " + std::to_string(total));
        }
    }
}

StrategyDistribution StrategyDistribution::pure(std::size_t dim, std::size_t kappa, std::size_t op, Domain domain) {
    if (op >= kappa) throw ConfigError("pure strategy operator index out of range");
    std::vector<double> t(dim * kappa, 0.0);
    for (std::size_t x = 0; x < dim; ++x) t[x * kappa + op] = 1.0;
    return StrategyDistribution(kappa, domain, std::move(t));
}

StrategyDistribution StrategyDistribution::uniform(std::size_t dim, std::size_t kappa, Domain domain) {
    if (kappa == 0) throw ConfigError("strategy distribution needs at least one operator");
    return StrategyDistribution(kappa, domain, std::vector<double>(dim * kappa, 1.0 / double(kappa)));
}

bool StrategyDistribution::is_pure() const {
    return std::all_of(table_.begin(), table_.end(), [](double w) { return w == 0.0 || w == 1.0; });
}

MutationKernel mix(std::span<const MutationKernel> kernels, const StrategyDistribution& q) {
    if (kernels.empty()) throw ConfigError("mix: no kernels");
    if (q.kappa() != kernels.size()) {
        throw ConfigError("mix: strategy has " + std::to_string(q.kappa()) + " operators but " +
                          std::to_string(kernels.size()) + " kernels were given");
    }
    const auto& first = kernels.front();
    for (const auto& k : kernels) {
        if (k.n != first.n || k.domain != first.domain || k.size() != first.size()) {
            throw ConfigError("mix: kernels disagree on n or domain");
        }
    }
    if (q.domain() != first.domain || q.dim() != first.size()) {
        throw ConfigError("mix: strategy table does not match the kernel dimension");
    }

    const std::size_t dim = first.size();
    MutationKernel out{first.n, first.domain, DenseMatrix(dim, dim), {}, std::nullopt};
    std::string label = "mix(";
    for (std::size_t k = 0; k < kernels.size(); ++k) label += (k ? "," : "") + kernels[k].label;
    out.label = label + ")";

    const auto& simd_k = simd::active();
    for (std::size_t x = 0; x < dim; ++x) {
        double* dst = out.matrix.row(x).data();
        for (std::size_t k = 0; k < kernels.size(); ++k) {
            const double w = q(x, k);
            if (w != 0.0) simd_k.axpy(w, kernels[k].matrix.row(x).data(), dst, dim);
        }
    }
    check_stochastic(out);
    return out;
}

StrategyDistribution expand_levels(const StrategyDistribution& q, int n) {
    if (q.domain() != Domain::levels || q.dim() != static_cast<std::size_t>(n) + 1) {
        throw ConfigError("expand_levels: expected a table over n + 1 levels");
    }
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t kappa = q.kappa();
    std::vector<double> t(dim * kappa);
    for (std::size_t x = 0; x < dim; ++x) {
        const auto w = q.weights(static_cast<std::size_t>(std::popcount(x)));
        std::copy(w.begin(), w.end(), t.begin() + static_cast<std::ptrdiff_t>(x * kappa));
    }
    return StrategyDistribution(kappa, Domain::states, std::move(t));
}

std::optional<StrategyDistribution> collapse_to_levels(const StrategyDistribution& q, int n) {
    if (q.domain() == Domain::levels) return q;
    if (q.dim() != std::size_t{1} << n) throw ConfigError("collapse_to_levels: table is not over 2^n states");
    const std::size_t kappa = q.kappa();
    const std::size_t levels = static_cast<std::size_t>(n) + 1;
    std::vector<double> t(levels * kappa, 0.0);
    std::vector<bool> seen(levels, false);
    for (std::size_t x = 0; x < q.dim(); ++x) {
        const auto level = static_cast<std::size_t>(std::popcount(x));
        const auto w = q.weights(x);
        auto dst = t.begin() + static_cast<std::ptrdiff_t>(level * kappa);
        if (!seen[level]) {
            std::copy(w.begin(), w.end(), dst);
            seen[level] = true;
        } else if (!std::equal(w.begin(), w.end(), dst)) {
            return std::nullopt;
        }
    }
    return StrategyDistribution(kappa, Domain::levels, std::move(t));
}

double max_row_sum_error(MatrixView m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) worst = std::max(worst, std::fabs(simd::sum(m.row(i)) - 1.0));
    return worst;
}

}  // namespace mixea
