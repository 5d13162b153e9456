#include "mixea/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "mixea/errors.hpp"

namespace mixea {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::size_t sample_operator(std::span<const double> weights, Rng& g) {
    const double u = uniform01(g);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] <= 0.0) continue;
        last = k;
        acc += weights[k];
        if (u < acc) return k;
    }
    return last;  // rounding left u above the cumulative total
}

StateIndex sample_state(std::span<const double> p, Rng& g) {
    const double u = uniform01(g);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] <= 0.0) continue;
        last = x;
        acc += p[x];
        if (u < acc) return static_cast<StateIndex>(x);
    }
    return static_cast<StateIndex>(last);
}

}  // namespace

Rng stream_for(std::uint64_t master_seed, std::uint64_t run_index) {
    return Rng(splitmix64(master_seed ^ splitmix64(run_index)));
}

double uniform01(Rng& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

BitMutator::BitMutator(const OperatorSpec& op, int n) : kind_(op.kind), n_(n) {
    op.validate();
    if (n < 1 || n > 32) throw ConfigError("bit mutation needs 1 <= n <= 32");
    if (kind_ == OperatorKind::single_bit_flip) return;
    // For p > 1/2 the bits that stay are sampled instead.
    complement_ = op.p > 0.5;
    const double rate = complement_ ? 1.0 - op.p : op.p;
    const double log_q = std::log1p(-rate);
    survival_.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) survival_[static_cast<std::size_t>(k)] = std::exp(k * log_q);
}

StateIndex BitMutator::operator()(StateIndex x, Rng& g) const {
    if (kind_ == OperatorKind::single_bit_flip) {
        const auto i = static_cast<unsigned>(((g() >> 32) * static_cast<std::uint64_t>(n_)) >> 32);
        return x ^ (StateIndex{1} << i);
    }
    // Gap to the next selected bit: P(gap >= k) = (1 - rate)^k, found by
    // searching the survival table instead of taking a logarithm.
    const auto n = static_cast<std::size_t>(n_);
    StateIndex mask = 0;
    std::size_t pos = 0;
    while (true) {
        const double u = 1.0 - uniform01(g);  // (0, 1]
        const std::size_t room = n - pos;
        // Largest k <= room with survival_[k] >= u.
        const auto it = std::upper_bound(survival_.begin(), survival_.begin() + static_cast<std::ptrdiff_t>(room) + 1,
                                         u, std::greater<>());
        const auto gap = static_cast<std::size_t>(it - survival_.begin()) - 1;
        if (gap >= room) break;
        pos += gap;
        mask |= StateIndex{1} << pos;
        if (++pos >= n) break;
    }
    if (complement_) {
        const StateIndex all = n_ >= 32 ? ~StateIndex{0} : (StateIndex{1} << n_) - 1;
        mask = all & ~mask;
    }
    return x ^ mask;
}

StateIndex mutate(const OperatorSpec& op, StateIndex x, int n, Rng& g) { return BitMutator(op, n)(x, g); }

void RunConfig::validate() const {
    if (!landscape) throw ConfigError("simulation has no landscape");
    if (runs < 1) throw ConfigError("runs must be at least 1");
    if (max_generations < 1) throw ConfigError("max_generations must be at least 1");
    if (strategy.operators.empty()) throw ConfigError("strategy has no operators");
    for (const auto& op : strategy.operators) op.validate();
    const int n = landscape->n();
    if (strategy.q) {
        const auto& q = *strategy.q;
        if (q.kappa() != strategy.operators.size()) {
            throw ConfigError("strategy table has " + std::to_string(q.kappa()) + " columns for " +
                              std::to_string(strategy.operators.size()) + " operators");
        }
        const std::size_t want = q.domain() == Domain::levels ? static_cast<std::size_t>(n) + 1 : landscape->size();
        if (q.dim() != want) throw ConfigError("strategy table has the wrong number of rows");
    }
    switch (init.kind) {
        case InitSpec::Kind::uniform:
            break;
        case InitSpec::Kind::fixed:
            if (init.state >= landscape->size()) throw ConfigError("initial state outside the search space");
            break;
        case InitSpec::Kind::distribution: {
            if (init.distribution.size() != landscape->size()) {
                throw ConfigError("initial distribution must have 2^n entries");
            }
            double total = 0.0;
            for (double w : init.distribution) {
                if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("initial distribution entry outside [0, 1]");
                total += w;
            }
            if (std::fabs(total - 1.0) > kStochasticTol) {
                throw ConfigError("initial distribution sums to " + std::to_string(total));
            }
            break;
        }
    }
}

std::vector<double> initial_distribution(const RunConfig& config) {
    const std::size_t dim = config.landscape->size();
    switch (config.init.kind) {
        case InitSpec::Kind::fixed: {
            std::vector<double> p(dim, 0.0);
            p[config.init.state] = 1.0;
            return p;
        }
        case InitSpec::Kind::distribution:
            return config.init.distribution;
        case InitSpec::Kind::uniform:
            break;
    }
    return std::vector<double>(dim, 1.0 / static_cast<double>(dim));
}

Simulator::Simulator(const RunConfig& config) : config_(config) {
    config_.validate();
    const auto values = config_.landscape->values();
    best_ = *std::max_element(values.begin(), values.end());
    for (const auto& op : config_.strategy.operators) mutators_.emplace_back(op, config_.landscape->n());
}

RunRecord Simulator::run(std::uint64_t run_index, const Observer* observer) const {
    const auto values = config_.landscape->values();
    const int n = config_.landscape->n();
    const auto* q = config_.strategy.q ? &*config_.strategy.q : nullptr;
    const bool by_level = q != nullptr && q->domain() == Domain::levels;

    Rng g = stream_for(config_.master_seed, run_index);
    StateIndex x = 0;
    switch (config_.init.kind) {
        case InitSpec::Kind::uniform:
            x = static_cast<StateIndex>(g() >> (64 - n));
            break;
        case InitSpec::Kind::fixed:
            x = config_.init.state;
            break;
        case InitSpec::Kind::distribution:
            x = sample_state(config_.init.distribution, g);
            break;
    }

    RunRecord rec{run_index, x, std::nullopt};
    double fx = values[x];
    for (std::uint64_t t = 0;; ++t) {
        if (observer) (*observer)(t, x, fx);
        if (fx == best_) {
            rec.hitting = t;
            return rec;
        }
        if (t == config_.max_generations) return rec;
        std::size_t k = 0;
        if (q) k = sample_operator(q->weights(by_level ? static_cast<std::size_t>(std::popcount(x)) : x), g);
        const StateIndex y = mutators_[k](x, g);
        if (values[y] > fx) {
            x = y;
            fx = values[y];
        }
    }
}

RunRecord run_once(const RunConfig& config, std::uint64_t run_index, const Observer* observer) {
    return Simulator(config).run(run_index, observer);
}

RunOutcome summarize(std::vector<RunRecord> runs, std::uint64_t max_generations) {
    RunOutcome out;
    out.max_generations = max_generations;
    double sum = 0.0;
    std::uint64_t done = 0;
    for (const auto& r : runs) {
        if (r.censored()) {
            ++out.censored;
        } else {
            sum += static_cast<double>(*r.hitting);
            ++done;
        }
    }
    if (done > 0) {
        const double mean = sum / static_cast<double>(done);
        out.mean = mean;
        if (done > 1) {
            double ss = 0.0;
            for (const auto& r : runs) {
                if (r.censored()) continue;
                const double d = static_cast<double>(*r.hitting) - mean;
                ss += d * d;
            }
            out.stderr_ = std::sqrt(ss / static_cast<double>(done - 1) / static_cast<double>(done));
        }
    }
    if (!runs.empty()) {
        out.penalized_mean = (sum + static_cast<double>(out.censored) * static_cast<double>(max_generations)) /
                             static_cast<double>(runs.size());
    }
    out.runs = std::move(runs);
    return out;
}

RunOutcome estimate(const RunConfig& config) {
    const Simulator sim(config);
    std::vector<RunRecord> records(config.runs);
    unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, config.runs));

    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t i = next.fetch_add(1); i < config.runs; i = next.fetch_add(1)) {
            records[i] = sim.run(i);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return summarize(std::move(records), config.max_generations);
}

CrossValidation cross_validate(const ElitistChain& chain, const RunConfig& config) {
    return cross_validate(chain, config, estimate(config));
}

CrossValidation cross_validate(const ElitistChain& chain, const RunConfig& config, RunOutcome outcome) {
    config.validate();
    const auto& land = *config.landscape;
    if (chain.n != land.n()) throw ConfigError("cross_validate: chain and landscape disagree on n");

    const auto p_states = initial_distribution(config);
    std::vector<double> p0;
    if (chain.domain == Domain::states) {
        p0 = p_states;
    } else {
        p0.assign(static_cast<std::size_t>(land.n()) + 1, 0.0);
        for (std::size_t x = 0; x < p_states.size(); ++x) p0[static_cast<std::size_t>(std::popcount(x))] += p_states[x];
    }

    CrossValidation cv;
    cv.exact = expected_hitting_time(chain, p0);
    cv.outcome = std::move(outcome);
    const auto& o = cv.outcome;

    if (!std::isfinite(cv.exact)) {
        if (o.censored == 0) {
            cv.flagged = true;
            cv.note = "exact hitting time is infinite but every run finished";
        } else {
            cv.note = "exact hitting time is infinite; " + std::to_string(o.censored) + " runs censored";
        }
        return cv;
    }
    if (o.censored > 0) {
        cv.flagged = true;
        cv.note = std::to_string(o.censored) + " runs censored although the exact hitting time is finite";
    }
    if (!o.mean) {
        cv.flagged = true;
        if (cv.note.empty()) cv.note = "no uncensored data";
        return cv;
    }
    const double diff = *o.mean - cv.exact;
    if (o.stderr_ && *o.stderr_ > 0.0) {
        cv.z = diff / *o.stderr_;
    } else {
        cv.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    if (std::fabs(*cv.z) > 3.0) {
        cv.flagged = true;
        if (cv.note.empty()) cv.note = "|z| > 3";
    }
    return cv;
}

}  // namespace mixea
