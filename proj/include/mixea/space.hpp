#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mixea {

/// Largest bit count for which the search space is enumerated.
inline constexpr int kExactModeMaxBits = 20;

using StateIndex = std::uint32_t;

/// Bitstring (b_1 ... b_n) packed so that bit i of `index` is b_{i+1}.
struct BitState {
    StateIndex index = 0;
    int n = 0;

    int ones() const;
    bool bit(int i) const { return ((index >> i) & 1u) != 0; }
    /// "b_1 b_2 ... b_n" as characters, b_1 first.
    std::string to_string() const;

    friend bool operator==(const BitState&, const BitState&) = default;
};

int popcount(StateIndex x);

/// All 2^n states in index order. Throws ConfigError when n is outside [1, max_bits].
std::vector<BitState> enumerate(int n, int max_bits = kExactModeMaxBits);

enum class LandscapeKind { onemax, knapsack_example1, staircase_example3, custom_table };

std::string_view to_string(LandscapeKind kind);
LandscapeKind parse_landscape_kind(std::string_view text);

struct KnapsackParams {
    std::vector<double> values;
    std::vector<double> weights;
    double capacity = 0.0;

    /// v = (10, 1, ..., 1), w = (9, 1, ..., 1), C = 9 over ten items.
    static KnapsackParams example1();

    friend bool operator==(const KnapsackParams&, const KnapsackParams&) = default;
};

struct LandscapeParams {
    std::optional<KnapsackParams> knapsack;
    std::vector<double> table;  // custom-table only, 2^n entries
};

/// Fitness over every state of {0,1}^n, cached at construction.
class FitnessLandscape {
public:
    FitnessLandscape(LandscapeKind kind, int n, LandscapeParams params, std::vector<double> values);

    LandscapeKind kind() const { return kind_; }
    int n() const { return n_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator()(StateIndex x) const { return values_[x]; }
    const LandscapeParams& params() const { return params_; }

    /// Fitness recomputed from the defining formula (custom tables read the table).
    double evaluate(StateIndex x) const;

private:
    LandscapeKind kind_;
    int n_;
    LandscapeParams params_;
    std::vector<double> values_;
};

/// Throws ConfigError on missing/ill-sized parameters or non-finite values.
/// knapsack-example1 without explicit parameters uses KnapsackParams::example1() (n must be 10).
FitnessLandscape build_landscape(LandscapeKind kind, int n, LandscapeParams params = {},
                                 int max_bits = kExactModeMaxBits);

struct Partition {
    std::vector<StateIndex> optimal;      // ascending index
    std::vector<StateIndex> non_optimal;  // fitness descending, ties by ascending index
    double max_fitness = 0.0;

    std::size_t size() const { return optimal.size() + non_optimal.size(); }
};

Partition partition_optimal(const FitnessLandscape& landscape);

/// Same ordering rules over an arbitrary fitness vector (used for level chains).
Partition partition_by_fitness(std::span<const double> fitness);

/// Fitness per level |x| = 0..n when it depends on |x| alone; nullopt otherwise.
std::optional<std::vector<double>> level_fitness(const FitnessLandscape& landscape);

}  // namespace mixea
