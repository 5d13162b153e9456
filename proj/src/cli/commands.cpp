#include "mixea/cli/commands.hpp"

#include <bit>
#include <cmath>
#include <map>

#include "mixea/cli/report.hpp"
#include "mixea/errors.hpp"

#ifndef MIXEA_VERSION
#define MIXEA_VERSION "0.0.0"
#endif

namespace mixea::cli {

using nlohmann::json;

namespace {

json header(const ExperimentConfig& config, std::string_view command) {
    return {{"tool", "mixea"},
            {"version", MIXEA_VERSION},
            {"command", std::string(command)},
            {"config_hash", config_hash(config)},
            {"config", to_json(config)}};
}

const FitnessLandscape& require_landscape(const ExperimentConfig& config, std::optional<FitnessLandscape>& slot) {
    if (!config.landscape) throw ConfigError("this command needs a 'landscape' block");
    if (!slot) slot.emplace(make_landscape(config));
    return *slot;
}

std::string state_name(const ElitistChain& chain, StateIndex x) {
    if (chain.domain == Domain::levels) return "|x|=" + std::to_string(x);
    return BitState{x, chain.n}.to_string();
}

std::string state_name(Domain domain, int n, StateIndex x) {
    if (domain == Domain::levels) return "|x|=" + std::to_string(x);
    return BitState{x, n}.to_string();
}

std::vector<std::string> operator_names_of(const ExperimentConfig& config, const std::vector<std::string>& names) {
    if (!names.empty()) return names;
    std::vector<std::string> all;
    for (const auto& op : config.operators) all.push_back(op.name);
    return all;
}

std::vector<OperatorSpec> specs_of(const ExperimentConfig& config, const std::vector<std::string>& names) {
    std::vector<OperatorSpec> out;
    for (const auto& name : names) out.push_back(config.operators[config.operator_index(name)].spec);
    return out;
}

// Pure chains keyed by operator name, built once per command.
class ChainCache {
public:
    ChainCache(const ExperimentConfig& config, const FitnessLandscape& landscape, ChainMode mode)
        : config_(config), landscape_(landscape), mode_(mode) {}

    const ElitistChain& pure(const std::string& name) {
        auto it = chains_.find(name);
        if (it == chains_.end()) {
            const auto spec = config_.operators[config_.operator_index(name)].spec;
            it = chains_.emplace(name, build_strategy_chain(landscape_, std::span(&spec, 1), nullptr, mode_, name))
                     .first;
        }
        return it->second;
    }

    std::vector<ElitistChain> pure_all(const std::vector<std::string>& names) {
        std::vector<ElitistChain> out;
        for (const auto& n : names) out.push_back(pure(n));
        return out;
    }

private:
    const ExperimentConfig& config_;
    const FitnessLandscape& landscape_;
    ChainMode mode_;
    std::map<std::string, ElitistChain> chains_;
};

json certificate_json(const ComplementarityCertificate& cert, const std::vector<std::string>& names,
                      Domain domain, int n) {
    json j = {{"mode", cert.mode == ComplementarityMode::mutual ? "mutual" : "pairwise"},
              {"holds", cert.holds},
              {"threshold", json_number(cert.threshold)},
              {"radii", json::array()},
              {"witness_count", cert.witnesses.size()},
              {"violation_count", cert.violations.size()},
              {"violations", json::array()}};
    for (double r : cert.radii) j["radii"].push_back(json_number(r));
    if (cert.mode == ComplementarityMode::pairwise) {
        j["base"] = names.at(cert.base);
        j["helper"] = names.at(cert.helper);
    }
    for (const auto& v : cert.violations) {
        j["violations"].push_back({{"state", state_name(domain, n, v.state)},
                                   {"trigger", names.at(v.trigger)},
                                   {"trigger_self_loop", json_number(v.trigger_self_loop)},
                                   {"best_self_loop", json_number(v.chosen_self_loop)},
                                   {"threshold", json_number(v.threshold)}});
    }
    return j;
}

json design_summary(const DesignedMixedStrategy& d, const std::vector<std::string>& names, Domain domain, int n) {
    json j = {{"mode", d.mode == ComplementarityMode::mutual ? "mutual" : "pairwise"},
              {"bound", json_number(d.bound)},
              {"predicted_rho", json_number(d.predicted_rho)},
              {"certificate", certificate_json(d.certificate, names, domain, n)},
              {"mutual_certificate", certificate_json(d.mutual, names, domain, n)}};
    if (d.base != kNoOperator) j["base"] = names.at(d.base);
    return j;
}

json design_table(const DesignedMixedStrategy& d, const std::vector<std::string>& names, Domain domain, int n) {
    json rows = json::array();
    for (std::size_t x = 0; x < d.q.dim(); ++x) {
        const char* rule = d.rule[x] == DesignRule::forced ? "forced" : d.rule[x] == DesignRule::base ? "base" : "free";
        json w = json::array();
        for (double v : d.q.weights(x)) w.push_back(v);
        rows.push_back({{"state", state_name(domain, n, static_cast<StateIndex>(x))},
                        {"rule", rule},
                        {"operator", d.rule_operator[x] == kNoOperator ? json(nullptr) : json(names.at(d.rule_operator[x]))},
                        {"weights", w}});
    }
    return rows;
}

struct AnalyzedRow {
    json entry;
    std::vector<std::string> csv;
};

AnalyzedRow analyzed_row(const std::string& name, const ElitistChain& chain, const AnalysisReport& rep,
                         double expected) {
    AnalyzedRow row;
    json traps = json::array();
    for (auto t : rep.traps) traps.push_back(state_name(chain, t));
    json power = nullptr;
    if (rep.power) {
        power = {{"value", json_number(rep.power->value)},
                 {"converged", rep.power->converged},
                 {"iterations", rep.power->iterations}};
    }
    row.entry = {{"strategy", name},
                 {"label", chain.label},
                 {"chain", chain.domain == Domain::states ? "full" : "lumped"},
                 {"states", chain.size()},
                 {"non_optimal", chain.non_optimal_count()},
                 {"rho_T", json_number(rep.rho)},
                 {"rate_R", json_number(rep.rate)},
                 {"hitting_T", json_number(rep.hitting_time)},
                 {"m_min", json_number(rep.m_min)},
                 {"m_max", json_number(rep.m_max)},
                 {"m_mean", json_number(rep.m_mean)},
                 {"traps", rep.traps.size()},
                 {"trap_states", traps},
                 {"expected_hitting_time", json_number(expected)},
                 {"power_iteration", power},
                 {"lu",
                  {{"finite", rep.hitting.finite},
                   {"residual", json_number(rep.hitting.residual)},
                   {"scaled_residual", json_number(rep.hitting.scaled_residual)},
                   {"row_swaps", rep.hitting.row_swaps}}}};
    row.csv = {name,
               format_number(rep.rho),
               format_number(rep.rate),
               format_number(rep.hitting_time),
               format_number(rep.m_min),
               format_number(rep.m_max),
               format_number(rep.m_mean),
               std::to_string(rep.traps.size())};
    return row;
}

AnalysisOptions analysis_options(const ExperimentConfig& config) {
    AnalysisOptions o;
    o.verify_with_power_iteration = config.analysis.verify_power_iteration;
    return o;
}

CsvTable analyze_table() {
    return CsvTable({"strategy", "rho_T", "rate_R", "hitting_T", "m_min", "m_max", "m_mean", "traps"});
}

}  // namespace

FitnessLandscape make_landscape(const ExperimentConfig& config) {
    if (!config.landscape) throw ConfigError("config has no landscape");
    const auto& l = *config.landscape;
    LandscapeParams params;
    params.knapsack = l.knapsack;
    params.table = l.table;
    return build_landscape(l.kind, l.n, std::move(params));
}

InitSpec make_init(const ExperimentConfig& config) {
    const auto& i = config.simulation.init;
    return {i.kind, i.state, i.distribution};
}

ResolvedStrategy resolve_strategy(const ExperimentConfig& config, const StrategyConfig& s,
                                  const FitnessLandscape& landscape, ChainMode mode) {
    ResolvedStrategy r;
    r.name = s.name;
    r.operator_names = s.operators;
    r.operators = specs_of(config, s.operators);
    const std::size_t kappa = r.operators.size();
    const int n = landscape.n();
    switch (s.type) {
        case StrategyType::pure:
            break;
        case StrategyType::mixed_uniform:
            r.q = StrategyDistribution::uniform(static_cast<std::size_t>(n) + 1, kappa, Domain::levels);
            break;
        case StrategyType::mixed_table: {
            std::vector<double> flat;
            for (const auto& row : s.table) flat.insert(flat.end(), row.begin(), row.end());
            r.q = StrategyDistribution(kappa, s.domain, std::move(flat));
            break;
        }
        case StrategyType::designed: {
            const auto chains = build_pure_chains(landscape, r.operators, mode);
            r.design = design_mixed(chains, s.free_rule, s.design_mode);
            r.q = r.design->q;
            break;
        }
    }
    return r;
}

std::vector<double> initial_over_chain(const ElitistChain& chain, const ExperimentConfig& config,
                                       const FitnessLandscape& landscape) {
    RunConfig rc;
    rc.landscape = std::shared_ptr<const FitnessLandscape>(&landscape, [](const FitnessLandscape*) {});
    rc.strategy.operators = {OperatorSpec::single_bit()};
    rc.init = make_init(config);
    rc.validate();
    auto p = initial_distribution(rc);
    if (chain.domain == Domain::states) return p;
    std::vector<double> levels(static_cast<std::size_t>(landscape.n()) + 1, 0.0);
    for (std::size_t x = 0; x < p.size(); ++x) levels[static_cast<std::size_t>(std::popcount(x))] += p[x];
    return levels;
}

CommandResult cmd_analyze(const ExperimentConfig& config) {
    std::optional<FitnessLandscape> slot;
    const auto& landscape = require_landscape(config, slot);
    if (config.strategies.empty()) throw ConfigError("analyze: no strategies declared");
    const ChainMode mode = resolve_chain_mode(landscape, config.analysis.mode);
    ChainCache cache(config, landscape, mode);

    CommandResult res;
    res.report = header(config, "analyze");
    res.report["chain_mode"] = std::string(to_string(mode));
    res.report["strategies"] = json::array();
    json violations = json::array();
    auto table = analyze_table();

    for (const auto& s : config.strategies) {
        const auto r = resolve_strategy(config, s, landscape, mode);
        const ElitistChain chain = r.q ? build_strategy_chain(landscape, r.operators, &*r.q, mode, r.name)
                                       : cache.pure(r.operator_names.front());
        const auto rep = analyze(chain, analysis_options(config));
        const double expected = expected_hitting_time(chain, initial_over_chain(chain, config, landscape));
        auto row = analyzed_row(r.name, chain, rep, expected);
        if (r.q) {
            const auto pure = cache.pure_all(r.operator_names);
            const StrategyDistribution q = r.q->domain() == chain.domain ? *r.q
                                           : chain.domain == Domain::states ? expand_levels(*r.q, landscape.n())
                                                                            : *collapse_to_levels(*r.q, landscape.n());
            const auto dom = dominance_report(pure, chain, q);
            row.entry["dominance"] = {{"predicted_rho", json_number(dom.predicted_rho)},
                                      {"rate_not_worse", dom.rate_not_worse},
                                      {"time_not_worse", dom.time_not_worse},
                                      {"violations", dom.violations}};
            for (const auto& v : dom.violations) violations.push_back(r.name + ": " + v);
        }
        if (r.design) row.entry["design"] = design_summary(*r.design, r.operator_names, chain.domain, landscape.n());
        res.report["strategies"].push_back(row.entry);
        table.add_row(row.csv);
    }
    res.report["violations"] = violations;
    res.report_csv = table.str();
    if (!violations.empty()) {
        res.exit_code = kExitTheorem;
        res.summary = "theorem check failed: " + violations.front().get<std::string>();
    } else {
        res.summary = "analyzed " + std::to_string(config.strategies.size()) + " strategies";
    }
    return res;
}

CommandResult cmd_simulate(const ExperimentConfig& config, unsigned threads) {
    std::optional<FitnessLandscape> slot;
    const auto& landscape = require_landscape(config, slot);
    if (config.strategies.empty()) throw ConfigError("simulate: no strategies declared");
    auto shared = std::make_shared<const FitnessLandscape>(landscape);

    std::optional<ChainMode> exact_mode;
    std::string exact_reason;
    try {
        exact_mode = resolve_chain_mode(landscape, config.analysis.mode);
    } catch (const std::exception& e) {
        exact_reason = e.what();
    }
    // Designed strategies need chains; without an exact route they cannot be built.
    const ChainMode design_mode = exact_mode.value_or(ChainMode::automatic);

    CommandResult res;
    res.report = header(config, "simulate");
    res.report["rng"] = std::string(kRngName);
    res.report["seed"] = config.simulation.seed;
    res.report["strategies"] = json::array();
    CsvTable table({"strategy", "runs", "censored", "mean", "stderr", "penalized_mean", "exact", "z", "flagged"});
    CsvTable runs({"strategy", "run_index", "initial", "hitting_generation", "censored"});

    auto opt_num = [](const std::optional<double>& v) { return v ? json_number(*v) : json(nullptr); };
    auto opt_str = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };

    for (const auto& s : config.strategies) {
        const auto r = resolve_strategy(config, s, landscape, design_mode);
        RunConfig rc;
        rc.landscape = shared;
        rc.strategy = {r.operators, r.q, r.name};
        rc.runs = config.simulation.runs;
        rc.master_seed = config.simulation.seed;
        rc.max_generations = config.simulation.max_generations;
        rc.init = make_init(config);
        rc.threads = threads;
        auto outcome = estimate(rc);
        const auto mean = outcome.mean;
        const auto se = outcome.stderr_;
        const double penalized = outcome.penalized_mean;
        const std::size_t runs_done = outcome.runs.size();
        const std::uint64_t censored = outcome.censored;

        json entry = {{"strategy", r.name},
                      {"runs", outcome.runs.size()},
                      {"censored", outcome.censored},
                      {"mean", opt_num(outcome.mean)},
                      {"stderr", opt_num(outcome.stderr_)},
                      {"penalized_mean", json_number(outcome.penalized_mean)},
                      {"max_generations", outcome.max_generations},
                      {"no_uncensored_data", outcome.no_uncensored_data()}};
        for (const auto& rec : outcome.runs) {
            runs.add_row({r.name, std::to_string(rec.run_index), BitState{rec.initial, landscape.n()}.to_string(),
                          rec.hitting ? std::to_string(*rec.hitting) : std::string(), rec.censored() ? "1" : "0"});
        }

        std::optional<double> exact, z;
        std::string flagged;
        if (config.simulation.cross_validate && exact_mode) {
            std::optional<ElitistChain> chain;
            std::string why;
            try {
                chain = build_strategy_chain(landscape, r.operators, r.q ? &*r.q : nullptr, *exact_mode, r.name);
            } catch (const ConfigError& e) {
                why = e.what();
            }
            if (chain) {
                auto cv = cross_validate(*chain, rc, std::move(outcome));
                exact = cv.exact;
                z = cv.z;
                flagged = cv.flagged ? "1" : "0";
                entry["cross_validation"] = {{"available", true},
                                             {"exact", json_number(cv.exact)},
                                             {"z", opt_num(cv.z)},
                                             {"flagged", cv.flagged},
                                             {"note", cv.note}};
            } else {
                entry["cross_validation"] = {{"available", false}, {"reason", why}};
            }
        } else {
            entry["cross_validation"] = {
                {"available", false},
                {"reason", config.simulation.cross_validate ? exact_reason : "disabled in config"}};
        }
        table.add_row({r.name, std::to_string(runs_done), std::to_string(censored), opt_str(mean), opt_str(se),
                       format_number(penalized), opt_str(exact), opt_str(z), flagged});
        res.report["strategies"].push_back(entry);
    }
    res.report_csv = table.str();
    res.runs_csv = runs.str();
    res.summary = "simulated " + std::to_string(config.strategies.size()) + " strategies x " +
                  std::to_string(config.simulation.runs) + " runs";
    return res;
}

CommandResult cmd_design(const ExperimentConfig& config) {
    std::optional<FitnessLandscape> slot;
    const auto& landscape = require_landscape(config, slot);
    const auto names = operator_names_of(config, config.design.operators);
    if (names.size() < 2) throw ConfigError("design: needs at least two operators");
    const ChainMode mode = resolve_chain_mode(landscape, config.analysis.mode);
    ChainCache cache(config, landscape, mode);
    const auto pure = cache.pure_all(names);
    const auto specs = specs_of(config, names);
    const Domain domain = pure.front().domain;
    const int n = landscape.n();

    CommandResult res;
    res.report = header(config, "design");
    res.report["chain_mode"] = std::string(to_string(mode));
    res.report["operators"] = names;
    const auto mutual = check_mutual(pure);
    res.report["mutual_certificate"] = certificate_json(mutual, names, domain, n);

    auto table = analyze_table();
    json rows = json::array();
    auto add = [&](const std::string& name, const ElitistChain& chain) {
        const auto rep = analyze(chain, analysis_options(config));
        const double expected = expected_hitting_time(chain, initial_over_chain(chain, config, landscape));
        auto row = analyzed_row(name, chain, rep, expected);
        rows.push_back(row.entry);
        table.add_row(row.csv);
        return rep;
    };
    for (std::size_t k = 0; k < names.size(); ++k) add(names[k], pure[k]);

    std::optional<DesignedMixedStrategy> d;
    try {
        d = design_mixed(pure, config.design.free_rule, config.design.mode);
    } catch (const NotComplementaryError& e) {
        res.report["designed"] = nullptr;
        res.report["strategies"] = rows;
        res.report_csv = table.str();
        res.exit_code = kExitCertificate;
        res.summary = std::string("certificate failed: ") + e.what();
        return res;
    }

    const std::string mixed_name = "designed";
    const auto mixture = build_strategy_chain(landscape, specs, &d->q, mode, mixed_name);
    const auto rep = add(mixed_name, mixture);
    const auto dom = dominance_report(pure, mixture, d->q);

    json designed = design_summary(*d, names, domain, n);
    designed["rho_T"] = json_number(rep.rho);
    designed["strictly_below_bound"] = rep.rho < d->bound - kComplementTol;
    designed["table"] = design_table(*d, names, domain, n);
    res.report["designed"] = designed;
    res.report["dominance"] = {{"predicted_rho", json_number(dom.predicted_rho)},
                               {"rate_not_worse", dom.rate_not_worse},
                               {"time_not_worse", dom.time_not_worse},
                               {"violations", dom.violations}};
    res.report["strategies"] = rows;
    res.report_csv = table.str();

    if (!dom.ok() || !(rep.rho < d->bound - kComplementTol)) {
        res.exit_code = kExitTheorem;
        res.summary = dom.ok() ? "designed radius is not below its bound" : "dominance check failed: " + dom.violations.front();
    } else {
        res.summary = std::string("designed ") + (d->mode == ComplementarityMode::mutual ? "mutual" : "pairwise") +
                      " mixture, rho " + format_number(rep.rho) + " < " + format_number(d->bound);
    }
    return res;
}

CommandResult cmd_curve(const ExperimentConfig& config) {
    const auto& c = config.curve;
    if (!(c.rho_min > 0.0 && c.rho_max < 1.0 && c.rho_min <= c.rho_max && c.step > 0.0)) {
        throw ConfigError("curve: need 0 < rho_min <= rho_max < 1 and step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((c.rho_max - c.rho_min) / c.step + 1e-9)) + 1;

    CommandResult res;
    res.report = header(config, "curve");
    CsvTable table({"rho", "R", "T", "RT"});
    json rows = json::array();
    double rt_min = INFINITY, rt_max = -INFINITY;
    for (std::size_t i = 0; i < count; ++i) {
        const double rho = std::round((c.rho_min + static_cast<double>(i) * c.step) * 1e12) / 1e12;
        const double rate = convergence_rate(rho);
        const double time = asymptotic_hitting_time(rho);
        const double rt = rate_time_product(rho);
        rt_min = std::min(rt_min, rt);
        rt_max = std::max(rt_max, rt);
        rows.push_back({{"rho", rho}, {"R", rate}, {"T", time}, {"RT", rt}});
        table.add_row({format_number(rho), format_number(rate), format_number(time), format_number(rt)});
    }
    const bool inside = rt_min > 1.0 && rt_max < 1.5;
    res.report["rows"] = rows;
    res.report["count"] = count;
    res.report["rt_min"] = rt_min;
    res.report["rt_max"] = rt_max;
    res.report["rt_within_1_to_1.5"] = inside;
    res.report_csv = table.str();
    res.curve_csv = res.report_csv;
    res.summary = std::to_string(count) + " rows, R*T in [" + format_number(rt_min) + ", " + format_number(rt_max) + "]";
    return res;
}

void write_outputs(const CommandResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_text(dir / "report.json", dump_report(result.report));
    write_text(dir / "report.csv", result.report_csv);
    if (result.runs_csv) write_text(dir / "runs.csv", *result.runs_csv);
    if (result.curve_csv) write_text(dir / "curve.csv", *result.curve_csv);
}

}  // namespace mixea::cli
