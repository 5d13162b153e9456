// Acceptance checks, one per criterion id: `acceptance <1..9>`.
// Prints "criterion N: PASS|FAIL <title>" followed by indented detail lines.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mixea/chain.hpp"
#include "mixea/cli/commands.hpp"
#include "mixea/cli/report.hpp"
#include "mixea/strategy.hpp"
#include "oracles.hpp"

using namespace mixea;
using namespace mixea::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const fs::path kConfigs = fs::path(MIXEA_SOURCE_DIR) / "configs";

class Criterion {
public:
    explicit Criterion(std::string title) : title_(std::move(title)) {}

    void check(bool ok, const std::string& what) {
        lines_.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
        pass_ = pass_ && ok;
    }
    void note(const std::string& what) { lines_.push_back("     " + what); }

    int finish(int id) const {
        std::printf("criterion %d: %s %s\n", id, pass_ ? "PASS" : "FAIL", title_.c_str());
        for (const auto& l : lines_) std::printf("  %s\n", l.c_str());
        return pass_ ? 0 : 1;
    }

private:
    std::string title_;
    std::vector<std::string> lines_;
    bool pass_ = true;
};

std::string fmt(double v) { return format_number(v); }

double num(const json& v) { return v.is_string() ? parse_number(v.get<std::string>()) : v.get<double>(); }

const json& row_named(const json& report, const std::string& name) {
    for (const auto& r : report.at("strategies")) {
        if (r.at("strategy") == name) return r;
    }
    throw std::runtime_error("report has no strategy " + name);
}

bool rel_close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b)); }

int criterion1() {
    Criterion c("OneMax with single-bit flips: T = n and 1/n < R < 1/(n-1)");
    for (int n : {5, 10, 16}) {
        const auto land = build_landscape(LandscapeKind::onemax, n);
        const std::vector<OperatorSpec> ops{OperatorSpec::single_bit()};
        const auto chain = build_strategy_chain(land, ops, nullptr, ChainMode::automatic);
        const auto rep = analyze(chain);
        const std::string tag = "n=" + std::to_string(n) + " (" + (chain.domain == Domain::states ? "full" : "lumped") +
                                ")";
        c.check(std::fabs(rep.hitting_time - n) <= 1e-9, tag + ": T = " + fmt(rep.hitting_time));
        c.check(rep.rate > 1.0 / n && rep.rate < 1.0 / (n - 1),
                tag + ": R = " + fmt(rep.rate) + " in (" + fmt(1.0 / n) + ", " + fmt(1.0 / (n - 1)) + ")");
    }
    return c.finish(1);
}

// Keeps the sweep to seconds; per-bit rates near 1 move the iterate slowly
// although its radius estimate is already exact.
constexpr std::size_t kPowerIters = 20'000;

int criterion2() {
    Criterion c("max self-loop equals the power-iteration radius; 1/(1-rho) within [min m, max m]");
    struct Case {
        LandscapeKind kind;
        int n;
    };
    std::vector<Case> cases;
    for (int n = 1; n <= 10; ++n) {
        cases.push_back({LandscapeKind::onemax, n});
        cases.push_back({LandscapeKind::staircase_example3, n});
    }
    cases.push_back({LandscapeKind::knapsack_example1, 10});

    std::size_t pairs = 0, radius_fail = 0, sandwich_fail = 0, unconverged = 0;
    double worst = 0.0;
    for (const auto& cs : cases) {
        const auto land = build_landscape(cs.kind, cs.n);
        std::vector<OperatorSpec> ops{OperatorSpec::single_bit(), OperatorSpec::per_bit(0.1),
                                      OperatorSpec::per_bit(0.9)};
        if (cs.n >= 3) ops.push_back(OperatorSpec::per_bit(1.0 / cs.n));
        for (const auto& op : ops) {
            ++pairs;
            const auto chain = build_chain(make_kernel(op, cs.n), land);
            const std::string tag = std::string(to_string(cs.kind)) + " n=" + std::to_string(cs.n) + " " + op.label();
            const double rho = spectral_radius(chain);
            const auto pw = power_iteration_radius(chain.transient_block(), 1e-12, kPowerIters);
            const double diff = std::fabs(pw.value - rho);
            worst = std::max(worst, diff);
            if (!pw.converged) ++unconverged;
            if (diff > 1e-10) {
                ++radius_fail;
                c.check(false, tag + ": power " + fmt(pw.value) + " vs max diag " + fmt(rho));
            }
            if (rho < 1.0 - kTrapTol) {
                const auto h = hitting_time_vector(chain);
                const auto [lo, hi] = std::minmax_element(h.m.begin(), h.m.end());
                const double t = asymptotic_hitting_time(chain);
                const double slack = 1e-12 * t;
                if (!h.finite || t < *lo - slack || t > *hi + slack) {
                    ++sandwich_fail;
                    c.check(false, tag + ": T = " + fmt(t) + " outside [" + fmt(*lo) + ", " + fmt(*hi) + "]");
                }
            }
        }
    }
    c.check(radius_fail == 0, std::to_string(pairs) + " (landscape, kernel) pairs, radius mismatches: " +
                                  std::to_string(radius_fail) + ", largest |difference| " + fmt(worst));
    c.check(sandwich_fail == 0, "sandwich violations: " + std::to_string(sandwich_fail));
    c.note("power iterations stopped at the " + std::to_string(kPowerIters) +
           "-iteration cap: " + std::to_string(unconverged) + " (their estimate still counts)");
    return c.finish(2);
}

int criterion3() {
    Criterion c("staircase n = 16 values, mutual certificate and designed radius");
    const int n = 16;
    const auto land = build_landscape(LandscapeKind::staircase_example3, n);
    const std::vector<OperatorSpec> ops{OperatorSpec::single_bit(), OperatorSpec::per_bit(1.0 / n)};
    const auto chains = build_pure_chains(land, ops, ChainMode::lumped);

    const auto traps = absorbing_traps(chains[0]);
    std::vector<StateIndex> sorted(traps.begin(), traps.end());
    std::sort(sorted.begin(), sorted.end());
    c.check(spectral_radius(chains[0]) == 1.0, "rho(T_s1) = " + fmt(spectral_radius(chains[0])));
    c.check(sorted == std::vector<StateIndex>{1, 3, 5, 7}, "single-bit traps at every odd level below 8 (" +
                                                               std::to_string(traps.size()) + " levels)");
    c.check(asymptotic_hitting_time(chains[0]) == kInf && convergence_rate(chains[0]) == 0.0,
            "T(T_s1) = " + fmt(asymptotic_hitting_time(chains[0])) + ", R(T_s1) = " + fmt(convergence_rate(chains[0])));

    const double rho2 = spectral_radius(chains[1]);
    const double formula = 1.0 - (1.0 / n) * std::pow(1.0 - 1.0 / n, n - 1);
    c.check(std::fabs(rho2 - formula) <= 1e-10,
            "rho(T_s2) = " + fmt(rho2) + " vs 1 - (1/16)(15/16)^15 = " + fmt(formula) + " (diff " +
                fmt(rho2 - formula) + ")");
    std::size_t argmax = 0;
    for (std::size_t r = 0; r < chains[1].diag.size(); ++r) {
        if (chains[1].diag[r] > chains[1].diag[argmax]) argmax = r;
    }
    const StateIndex worst = chains[1].non_optimal_state(argmax);
    c.note("per-bit radius is attained at |x| = " + std::to_string(worst) + " (f = " + fmt(chains[1].fitness[worst]) +
           "); improving from there needs |x| >= 10");
    c.note("the formula value is the self-loop at |x| = 15: " +
           fmt(chains[1].self_loop(15)));

    const auto mutual = check_mutual(chains);
    std::string where;
    for (const auto& v : mutual.violations) where += " |x|=" + std::to_string(v.state);
    c.check(mutual.holds, "mutual certificate holds: " + std::string(mutual.holds ? "yes" : "no") +
                              (where.empty() ? "" : " (violations at" + where + ")"));
    const auto ab = check_pairwise(chains, 0, 1);
    const auto ba = check_pairwise(chains, 1, 0);
    c.note(std::string("pairwise, hypothesis on s1: ") + (ab.holds ? "holds" : "fails") +
           "; hypothesis on s2: " + (ba.holds ? "holds" : "fails"));

    try {
        const auto d = design_mixed(chains, FreeStateRule::first_operator, DesignMode::automatic);
        const auto mixed = build_strategy_chain(land, ops, &d.q, ChainMode::lumped, "designed");
        const double rq = spectral_radius(mixed);
        c.check(rq < rho2 - 1e-12, std::string("designed (") + (d.mode == ComplementarityMode::mutual ? "mutual" : "pairwise") +
                                       ") rho(T_q) = " + fmt(rq) + " vs rho(T_s2) = " + fmt(rho2));
    } catch (const NotComplementaryError& e) {
        c.check(false, std::string("no design: ") + e.what());
    }

    // Lumped/full agreement at n = 12.
    const int m = 12;
    const auto land12 = build_landscape(LandscapeKind::staircase_example3, m);
    const std::vector<OperatorSpec> ops12{OperatorSpec::single_bit(), OperatorSpec::per_bit(1.0 / m)};
    bool agree = true;
    for (const auto& op : ops12) {
        const std::vector<OperatorSpec> one{op};
        const auto full = build_strategy_chain(land12, one, nullptr, ChainMode::full);
        const auto lumped = build_strategy_chain(land12, one, nullptr, ChainMode::lumped);
        agree = agree && std::fabs(spectral_radius(full) - spectral_radius(lumped)) <= 1e-9;
        const auto mf = hitting_times_by_substitution(full);
        const auto ml = hitting_times_by_substitution(lumped);
        std::map<StateIndex, double> by_level;
        for (std::size_t r = 0; r < ml.size(); ++r) by_level[lumped.non_optimal_state(r)] = ml[r];
        for (std::size_t r = 0; r < mf.size(); ++r) {
            const double a = mf[r];
            const double b = by_level.at(static_cast<StateIndex>(popcount(full.non_optimal_state(r))));
            agree = agree && (std::isinf(a) ? std::isinf(b) : rel_close(a, b, 1e-9));
        }
    }
    c.check(agree, "lumped and full chains agree at n = 12 (rho and hitting times within 1e-9)");
    return c.finish(3);
}

int criterion4() {
    Criterion c("random state-dependent tables never beat the worst pure radius or time from below");
    std::mt19937_64 g(20240601);
    struct Case {
        std::string name;
        FitnessLandscape land;
        std::vector<OperatorSpec> ops;
    };
    std::vector<Case> cases;
    cases.push_back({"staircase n=8", build_landscape(LandscapeKind::staircase_example3, 8),
                     {OperatorSpec::single_bit(), OperatorSpec::per_bit(1.0 / 8)}});
    cases.push_back({"knapsack", build_landscape(LandscapeKind::knapsack_example1, 10),
                     {OperatorSpec::per_bit(0.1), OperatorSpec::per_bit(0.9)}});
    for (const auto& cs : cases) {
        const auto pure = build_pure_chains(cs.land, cs.ops, ChainMode::full);
        double max_rho = 0.0, max_t = 0.0;
        for (const auto& p : pure) {
            max_rho = std::max(max_rho, spectral_radius(p));
            max_t = std::max(max_t, asymptotic_hitting_time(p));
        }
        std::size_t violations = 0;
        double worst_rho = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const StrategyDistribution q(cs.ops.size(), Domain::states,
                                         oracle::random_table(cs.land.size(), cs.ops.size(), g));
            const auto mixed = build_strategy_chain(cs.land, cs.ops, &q, ChainMode::full);
            const double rq = spectral_radius(mixed);
            const double tq = asymptotic_hitting_time(mixed);
            worst_rho = std::max(worst_rho, rq);
            const bool rho_ok = rq <= max_rho + 1e-12;
            const bool t_ok = max_t == kInf || tq <= max_t * (1 + 1e-12);
            if (!rho_ok || !t_ok || !dominance_report(pure, mixed, q).ok()) ++violations;
        }
        c.check(violations == 0, cs.name + ": 100 tables, violations " + std::to_string(violations) +
                                     ", largest rho(T_q) " + fmt(worst_rho) + " <= max_k rho(T_k) " + fmt(max_rho));
    }
    return c.finish(4);
}

int criterion5() {
    Criterion c("Example 1 exact: the mixture has the smallest T and p0.m");
    const auto res = cmd_analyze(load_config(kConfigs / "example1_knapsack.json"));
    const auto& s1 = row_named(res.report, "EA(s1)");
    const auto& s2 = row_named(res.report, "EA(s2)");
    const auto& mx = row_named(res.report, "EA(s1,s2)");
    const double t1 = num(s1.at("hitting_T")), t2 = num(s2.at("hitting_T")), tm = num(mx.at("hitting_T"));
    const double e1 = num(s1.at("expected_hitting_time")), e2 = num(s2.at("expected_hitting_time")),
                 em = num(mx.at("expected_hitting_time"));
    c.check(tm < std::min(t1, t2), "T: s1 " + fmt(t1) + ", s2 " + fmt(t2) + ", mixed " + fmt(tm));
    c.check(em < std::min(e1, e2), "p0.m (uniform start): s1 " + fmt(e1) + ", s2 " + fmt(e2) + ", mixed " + fmt(em));

    // Pinned on the first computation.
    const std::vector<std::pair<std::string, std::pair<double, double>>> anchors{
        {"T(s1)", {t1, 9999999999.99997}},       {"T(s2)", {t2, 1747.582350886227}},
        {"T(mixed)", {tm, 25.81174731751029}},   {"p0.m(s1)", {e1, 9942130583.401184}},
        {"p0.m(s2)", {e2, 1500.7795854449405}}, {"p0.m(mixed)", {em, 68.12864894398487}}};
    for (const auto& [name, v] : anchors) {
        c.check(rel_close(v.first, v.second, 1e-9), "anchor " + name + " = " + fmt(v.first) + " (pinned " +
                                                        fmt(v.second) + ")");
    }
    return c.finish(5);
}

int criterion6() {
    Criterion c("Example 1 empirical: mixed mean smallest, censoring of s2 >= mixed");
    const auto config = load_config(kConfigs / "example1_knapsack.json");
    const auto res = cmd_simulate(config, 0);
    const auto& s1 = row_named(res.report, "EA(s1)");
    const auto& s2 = row_named(res.report, "EA(s2)");
    const auto& mx = row_named(res.report, "EA(s1,s2)");
    auto describe = [](const std::string& name, const json& r) {
        return name + ": runs " + std::to_string(r.at("runs").get<int>()) + ", censored " +
               std::to_string(r.at("censored").get<int>()) + ", mean " +
               (r.at("mean").is_null() ? std::string("none") : fmt(num(r.at("mean")))) + ", penalized mean " +
               fmt(num(r.at("penalized_mean")));
    };
    c.note("seed " + std::to_string(config.simulation.seed) + ", cap " +
           std::to_string(config.simulation.max_generations) + ", uniform start");
    c.note(describe("EA(s1)", s1));
    c.note(describe("EA(s2)", s2));
    c.note(describe("EA(s1,s2)", mx));
    const bool have = !mx.at("mean").is_null();
    const double m = have ? num(mx.at("mean")) : kInf;
    auto beats = [&](const json& r) { return have && (r.at("mean").is_null() || m < num(r.at("mean"))); };
    c.check(beats(s1) && beats(s2), "mixed mean uncensored hitting time strictly smallest");
    c.check(num(mx.at("penalized_mean")) < std::min(num(s1.at("penalized_mean")), num(s2.at("penalized_mean"))),
            "also smallest with censored runs counted at the cap");
    c.check(s2.at("censored").get<int>() >= mx.at("censored").get<int>(), "censored(s2) >= censored(mixed)");
    return c.finish(6);
}

int criterion7() {
    Criterion c("simulation agrees with p0.m within 3 standard errors");
    const std::vector<std::pair<std::string, std::string>> cases{{"example2_onemax.json", "EA(flip1)"},
                                                                 {"staircase12_designed.json", "EA(q)"}};
    for (const auto& [file, strategy] : cases) {
        const auto config = load_config(kConfigs / file);
        const auto res = cmd_simulate(config, 0);
        const auto& row = row_named(res.report, strategy);
        const auto& cv = row.at("cross_validation");
        if (!cv.at("available").get<bool>() || cv.at("z").is_null()) {
            c.check(false, file + " " + strategy + ": no cross-validation available");
            continue;
        }
        const double z = num(cv.at("z"));
        c.check(std::fabs(z) <= 3.0 && row.at("censored") == 0,
                file + " " + strategy + ": runs " + std::to_string(row.at("runs").get<int>()) + ", mean " +
                    fmt(num(row.at("mean"))) + " +- " + fmt(num(row.at("stderr"))) + ", exact " +
                    fmt(num(cv.at("exact"))) + ", z " + fmt(z));
    }
    return c.finish(7);
}

int criterion8() {
    Criterion c("R*T lies in (1, 1.5) for rho in [0.5, 0.99]");
    const auto res = cmd_curve(load_config(kConfigs / "curve_figure1.json"));
    std::size_t bad = 0;
    for (const auto& r : res.report.at("rows")) {
        const double rt = num(r.at("RT"));
        if (!(rt > 1.0 && rt < 1.5)) ++bad;
    }
    c.check(res.report.at("count") == 50, std::to_string(res.report.at("count").get<int>()) + " rows");
    c.check(bad == 0, "R*T range [" + fmt(num(res.report.at("rt_min"))) + ", " + fmt(num(res.report.at("rt_max"))) +
                          "], rows outside: " + std::to_string(bad));
    return c.finish(8);
}

int criterion9() {
    Criterion c("shipped configs byte-reproduce report.json, serial and parallel");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(kConfigs)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        const auto config = load_config(f);
        const std::string name = f.filename().string();
        auto compare = [&](const std::string& cmd, const std::function<CommandResult()>& a,
                           const std::function<CommandResult()>& b) {
            const auto ra = a();
            const auto rb = b();
            const bool same = dump_report(ra.report) == dump_report(rb.report) && ra.report_csv == rb.report_csv &&
                              ra.runs_csv == rb.runs_csv && ra.curve_csv == rb.curve_csv;
            c.check(same, name + " " + cmd + " (exit " + std::to_string(ra.exit_code) + ")");
        };
        const bool has_landscape = config.landscape.has_value();
        if (has_landscape && !config.strategies.empty()) {
            compare("analyze", [&] { return cmd_analyze(config); }, [&] { return cmd_analyze(config); });
            compare("simulate threads=1 vs 4", [&] { return cmd_simulate(config, 1); },
                    [&] { return cmd_simulate(config, 4); });
        }
        if (has_landscape && config.operators.size() >= 2) {
            compare("design", [&] { return cmd_design(config); }, [&] { return cmd_design(config); });
        }
        if (!has_landscape) {
            compare("curve", [&] { return cmd_curve(config); }, [&] { return cmd_curve(config); });
        }
    }
    return c.finish(9);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <1..9>\n");
        return 2;
    }
    const int id = std::atoi(argv[1]);
    const std::map<int, std::function<int()>> table{{1, criterion1}, {2, criterion2}, {3, criterion3},
                                                    {4, criterion4}, {5, criterion5}, {6, criterion6},
                                                    {7, criterion7}, {8, criterion8}, {9, criterion9}};
    const auto it = table.find(id);
    if (it == table.end()) {
        std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
        return 2;
    }
    try {
        return it->second();
    } catch (const std::exception& e) {
        std::printf("criterion %d: FAIL (exception: %s)\n", id, e.what());
        return 1;
    }
}
