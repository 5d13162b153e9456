#include "mixea/space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "mixea/errors.hpp"

namespace mixea {
namespace {

void check_bits(int n, int max_bits) {
    if (n < 1 || n > max_bits) {
        throw ConfigError("bit count n=" + std::to_string(n) + " outside exact-mode range [1, " +
                          std::to_string(max_bits) + "]; use the lumped (level) analysis for larger n");
    }
}

double staircase(int ones, int n) {
    if (2 * ones < n) return (ones % 2 == 1) ? ones + 2.0 : double(ones);
    return double(ones);
}

double knapsack(const KnapsackParams& p, StateIndex x) {
    double value = 0.0;
    double weight = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        if ((x >> i) & 1u) {
            value += p.values[i];
            weight += p.weights[i];
        }
    }
    return weight <= p.capacity ? value : 0.0;
}

double formula(LandscapeKind kind, int n, const LandscapeParams& params, StateIndex x) {
    switch (kind) {
        case LandscapeKind::onemax:
            return popcount(x);
        case LandscapeKind::knapsack_example1:
            return knapsack(*params.knapsack, x);
        case LandscapeKind::staircase_example3:
            return staircase(popcount(x), n);
        case LandscapeKind::custom_table:
            return params.table[x];
    }
    return 0.0;
}

}  // namespace

int popcount(StateIndex x) { return std::popcount(x); }

int BitState::ones() const { return popcount(index); }

std::string BitState::to_string() const {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i) {
        if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
    }
    return s;
}

std::vector<BitState> enumerate(int n, int max_bits) {
    check_bits(n, max_bits);
    const std::size_t count = std::size_t{1} << n;
    std::vector<BitState> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = BitState{static_cast<StateIndex>(i), n};
    return out;
}

std::string_view to_string(LandscapeKind kind) {
    switch (kind) {
        case LandscapeKind::onemax:
            return "onemax";
        case LandscapeKind::knapsack_example1:
            return "knapsack-example1";
        case LandscapeKind::staircase_example3:
            return "staircase-example3";
        case LandscapeKind::custom_table:
            return "custom-table";
    }
    return "?";
}

LandscapeKind parse_landscape_kind(std::string_view text) {
    for (auto kind : {LandscapeKind::onemax, LandscapeKind::knapsack_example1,
                      LandscapeKind::staircase_example3, LandscapeKind::custom_table}) {
        if (text == to_string(kind)) return kind;
    }
    throw ConfigError("unknown landscape kind '" + std::string(text) + "'");
}

KnapsackParams KnapsackParams::example1() {
    KnapsackParams p;
    p.values.assign(10, 1.0);
    p.weights.assign(10, 1.0);
    p.values[0] = 10.0;
    p.weights[0] = 9.0;
    p.capacity = 9.0;
    return p;
}

FitnessLandscape::FitnessLandscape(LandscapeKind kind, int n, LandscapeParams params, std::vector<double> values)
    : kind_(kind), n_(n), params_(std::move(params)), values_(std::move(values)) {}

double FitnessLandscape::evaluate(StateIndex x) const { return formula(kind_, n_, params_, x); }

FitnessLandscape build_landscape(LandscapeKind kind, int n, LandscapeParams params, int max_bits) {
    check_bits(n, max_bits);
    const std::size_t count = std::size_t{1} << n;
    const auto un = static_cast<std::size_t>(n);

    if (kind == LandscapeKind::knapsack_example1) {
        if (!params.knapsack) {
            if (n != 10) throw ConfigError("knapsack-example1 without parameters requires n=10");
            params.knapsack = KnapsackParams::example1();
        }
        const auto& kp = *params.knapsack;
        if (kp.values.size() != un || kp.weights.size() != un) {
            throw ConfigError("knapsack values/weights must have length n=" + std::to_string(n));
        }
        auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(kp.values.begin(), kp.values.end(), finite) ||
            !std::all_of(kp.weights.begin(), kp.weights.end(), finite) || !std::isfinite(kp.capacity)) {
            throw ConfigError("knapsack parameters must be finite");
        }
    }
    if (kind == LandscapeKind::custom_table && params.table.size() != count) {
        throw ConfigError("custom-table needs exactly 2^n = " + std::to_string(count) + " values, got " +
                          std::to_string(params.table.size()));
    }

    std::vector<double> values(count);
    for (std::size_t x = 0; x < count; ++x) {
        values[x] = formula(kind, n, params, static_cast<StateIndex>(x));
        if (!std::isfinite(values[x])) {
            throw ConfigError("non-finite fitness at state " + std::to_string(x));
        }
    }
    return FitnessLandscape(kind, n, std::move(params), std::move(values));
}

Partition partition_by_fitness(std::span<const double> fitness) {
    Partition p;
    if (fitness.empty()) return p;
    p.max_fitness = *std::max_element(fitness.begin(), fitness.end());
    for (std::size_t x = 0; x < fitness.size(); ++x) {
        (fitness[x] == p.max_fitness ? p.optimal : p.non_optimal).push_back(static_cast<StateIndex>(x));
    }
    std::stable_sort(p.non_optimal.begin(), p.non_optimal.end(),
                     [&](StateIndex a, StateIndex b) { return fitness[a] > fitness[b]; });
    return p;
}

Partition partition_optimal(const FitnessLandscape& landscape) { return partition_by_fitness(landscape.values()); }

std::optional<std::vector<double>> level_fitness(const FitnessLandscape& landscape) {
    const int n = landscape.n();
    std::vector<double> level(static_cast<std::size_t>(n) + 1);
    std::vector<bool> seen(level.size(), false);
    for (std::size_t x = 0; x < landscape.size(); ++x) {
        const auto ones = static_cast<std::size_t>(popcount(static_cast<StateIndex>(x)));
        const double f = landscape.values()[x];
        if (!seen[ones]) {
            level[ones] = f;
            seen[ones] = true;
        } else if (level[ones] != f) {
            return std::nullopt;
        }
    }
    return level;
}

}  // namespace mixea
