#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixea/linalg.hpp"

namespace mixea {

/// Largest bit count for which 2^n x 2^n matrices are materialized
/// (n = 13 is 512 MiB per matrix).
inline constexpr int kDenseMaxBits = 13;

/// Row tolerance for stochastic vectors and matrices.
inline constexpr double kStochasticTol = 1e-12;

enum class OperatorKind { per_bit_flip, single_bit_flip };

struct OperatorSpec {
    OperatorKind kind = OperatorKind::single_bit_flip;
    double p = 0.0;  // flip probability, per_bit_flip only

    static OperatorSpec per_bit(double p) { return {OperatorKind::per_bit_flip, p}; }
    static OperatorSpec single_bit() { return {OperatorKind::single_bit_flip, 0.0}; }

    std::string label() const;
    /// Throws ConfigError for p outside (0, 1).
    void validate() const;

    friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;
};

/// What the rows and columns of a kernel or chain index: bitstrings or levels |x|.
enum class Domain { states, levels };

struct MutationKernel {
    int n = 0;
    Domain domain = Domain::states;
    DenseMatrix matrix;
    std::string label;
    std::optional<OperatorSpec> spec;  // empty for mixtures

    std::size_t size() const { return matrix.rows(); }
    double operator()(std::size_t x, std::size_t y) const { return matrix(x, y); }
};

/// P(x, y) = p^H (1-p)^(n-H), H the Hamming distance. Entries evaluated in
/// log space; anything under 1e-300 is stored as 0.
MutationKernel per_bit_flip(int n, double p, int max_bits = kDenseMaxBits);

/// P(x, y) = 1/n at Hamming distance 1, else 0.
MutationKernel single_bit_flip(int n, int max_bits = kDenseMaxBits);

MutationKernel make_kernel(const OperatorSpec& spec, int n, int max_bits = kDenseMaxBits);

/// Per-state probability vector over kappa operators.
class StrategyDistribution {
public:
    /// `table` is row-major, dim x kappa. Throws ConfigError unless every row is a
    /// probability vector within kStochasticTol.
    StrategyDistribution(std::size_t kappa, Domain domain, std::vector<double> table);

    static StrategyDistribution pure(std::size_t dim, std::size_t kappa, std::size_t op, Domain domain);
    static StrategyDistribution uniform(std::size_t dim, std::size_t kappa, Domain domain);

    std::size_t kappa() const { return kappa_; }
    std::size_t dim() const { return kappa_ == 0 ? 0 : table_.size() / kappa_; }
    Domain domain() const { return domain_; }
    std::span<const double> weights(std::size_t x) const { return {table_.data() + x * kappa_, kappa_}; }
    double operator()(std::size_t x, std::size_t k) const { return table_[x * kappa_ + k]; }
    std::span<const double> table() const { return table_; }

    /// Unit vector at every state.
    bool is_pure() const;

private:
    std::size_t kappa_;
    Domain domain_;
    std::vector<double> table_;
};

/// P_mix(x, .) = sum_k q_k(x) P_k(x, .). Throws ConfigError on mismatched shapes.
MutationKernel mix(std::span<const MutationKernel> kernels, const StrategyDistribution& q);

/// Level table -> per-bitstring table (state x takes the row of level |x|).
StrategyDistribution expand_levels(const StrategyDistribution& q, int n);

/// Per-bitstring table -> level table, or nullopt when some level is not constant.
std::optional<StrategyDistribution> collapse_to_levels(const StrategyDistribution& q, int n);

/// Max over rows of |row sum - 1|.
double max_row_sum_error(MatrixView m);

}  // namespace mixea
