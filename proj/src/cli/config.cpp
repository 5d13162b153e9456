#include "mixea/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mixea/errors.hpp"

namespace mixea::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

template <class T>
T get_or(const json& j, const std::string& key, const std::string& where, T fallback) {
    return j.contains(key) ? get<T>(j, key, where) : fallback;
}

std::uint64_t get_count(const json& j, const std::string& key, const std::string& where, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ConfigError(where + "." + key + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

template <class E, std::size_t N>
E parse_enum(const std::string& text, const E (&values)[N], const std::string& where) {
    for (E v : values) {
        if (text == to_string(v)) return v;
    }
    throw ConfigError(where + ": unknown value '" + text + "'");
}

LandscapeConfig parse_landscape(const json& j) {
    const std::string where = "landscape";
    reject_unknown(j, where, {"kind", "n", "params", "table"});
    LandscapeConfig c;
    try {
        c.kind = parse_landscape_kind(get<std::string>(j, "kind", where));
    } catch (const ConfigError& e) {
        throw ConfigError(where + ".kind: " + e.what());
    }
    c.n = get<int>(j, "n", where);
    if (j.contains("params")) {
        const auto& p = j.at("params");
        reject_unknown(p, where + ".params", {"values", "weights", "capacity"});
        KnapsackParams k;
        k.values = get<std::vector<double>>(p, "values", where + ".params");
        k.weights = get<std::vector<double>>(p, "weights", where + ".params");
        k.capacity = get<double>(p, "capacity", where + ".params");
        c.knapsack = std::move(k);
    }
    if (j.contains("table")) c.table = get<std::vector<double>>(j, "table", where);
    return c;
}

OperatorConfig parse_operator(const json& j, std::size_t i) {
    const std::string where = "operators[" + std::to_string(i) + "]";
    reject_unknown(j, where, {"name", "kind", "p"});
    OperatorConfig c;
    c.name = get<std::string>(j, "name", where);
    const auto kind = get<std::string>(j, "kind", where);
    if (kind == "per_bit_flip") {
        c.spec = OperatorSpec::per_bit(get<double>(j, "p", where));
    } else if (kind == "single_bit_flip") {
        if (j.contains("p")) throw ConfigError(where + ": single_bit_flip takes no 'p'");
        c.spec = OperatorSpec::single_bit();
    } else {
        throw ConfigError(where + ".kind: unknown operator '" + kind + "'");
    }
    try {
        c.spec.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return c;
}

StrategyConfig parse_strategy(const json& j, std::size_t i) {
    const std::string where = "strategies[" + std::to_string(i) + "]";
    reject_unknown(j, where, {"name", "type", "operator", "operators", "domain", "table", "free_rule", "mode"});
    StrategyConfig c;
    c.name = get<std::string>(j, "name", where);
    constexpr StrategyType types[] = {StrategyType::pure, StrategyType::mixed_uniform, StrategyType::mixed_table,
                                      StrategyType::designed};
    c.type = parse_enum(get<std::string>(j, "type", where), types, where + ".type");
    if (c.type == StrategyType::pure) {
        if (j.contains("operators")) throw ConfigError(where + ": a pure strategy names one 'operator'");
        c.operators = {get<std::string>(j, "operator", where)};
    } else {
        if (j.contains("operator")) throw ConfigError(where + ": mixed strategies list 'operators'");
        c.operators = get<std::vector<std::string>>(j, "operators", where);
    }
    if (c.type == StrategyType::mixed_table) {
        constexpr Domain domains[] = {Domain::states, Domain::levels};
        c.domain = parse_enum(get_or<std::string>(j, "domain", where, "states"), domains, where + ".domain");
        c.table = get<std::vector<std::vector<double>>>(j, "table", where);
    } else if (j.contains("table") || j.contains("domain")) {
        throw ConfigError(where + ": 'table' and 'domain' only apply to mixed_table");
    }
    if (c.type == StrategyType::designed) {
        constexpr FreeStateRule rules[] = {FreeStateRule::uniform, FreeStateRule::first_operator};
        constexpr DesignMode modes[] = {DesignMode::automatic, DesignMode::mutual, DesignMode::pairwise};
        c.free_rule = parse_enum(get_or<std::string>(j, "free_rule", where, "uniform"), rules, where + ".free_rule");
        c.design_mode = parse_enum(get_or<std::string>(j, "mode", where, "automatic"), modes, where + ".mode");
    } else if (j.contains("free_rule") || j.contains("mode")) {
        throw ConfigError(where + ": 'free_rule' and 'mode' only apply to designed strategies");
    }
    return c;
}

InitConfig parse_init(const json& j, int n) {
    const std::string where = "simulation.init";
    reject_unknown(j, where, {"kind", "state", "bits", "p"});
    InitConfig c;
    const auto kind = get<std::string>(j, "kind", where);
    if (kind == "uniform") {
        c.kind = InitSpec::Kind::uniform;
    } else if (kind == "fixed") {
        c.kind = InitSpec::Kind::fixed;
        if (j.contains("state") == j.contains("bits")) throw ConfigError(where + ": give exactly one of 'state' or 'bits'");
        if (j.contains("state")) {
            c.state = get<StateIndex>(j, "state", where);
        } else {
            const auto bits = get<std::string>(j, "bits", where);
            if (n > 0 && bits.size() != static_cast<std::size_t>(n)) {
                throw ConfigError(where + ".bits: expected " + std::to_string(n) + " characters");
            }
            for (std::size_t i = 0; i < bits.size(); ++i) {
                if (bits[i] != '0' && bits[i] != '1') throw ConfigError(where + ".bits: only '0' and '1' allowed");
                if (bits[i] == '1') c.state |= StateIndex{1} << i;
            }
        }
    } else if (kind == "distribution") {
        c.kind = InitSpec::Kind::distribution;
        c.distribution = get<std::vector<double>>(j, "p", where);
    } else {
        throw ConfigError(where + ".kind: unknown value '" + kind + "'");
    }
    return c;
}

}  // namespace

std::string_view to_string(StrategyType t) {
    switch (t) {
        case StrategyType::pure:
            return "pure";
        case StrategyType::mixed_uniform:
            return "mixed_uniform";
        case StrategyType::mixed_table:
            return "mixed_table";
        case StrategyType::designed:
            return "designed";
    }
    return "?";
}

std::string_view to_string(ChainMode m) {
    switch (m) {
        case ChainMode::full:
            return "full";
        case ChainMode::lumped:
            return "lumped";
        case ChainMode::automatic:
            return "auto";
    }
    return "?";
}

std::string_view to_string(FreeStateRule r) { return r == FreeStateRule::uniform ? "uniform" : "first_operator"; }

std::string_view to_string(DesignMode m) {
    switch (m) {
        case DesignMode::automatic:
            return "automatic";
        case DesignMode::mutual:
            return "mutual";
        case DesignMode::pairwise:
            return "pairwise";
    }
    return "?";
}

std::string_view to_string(Domain d) { return d == Domain::states ? "states" : "levels"; }

std::size_t ExperimentConfig::operator_index(const std::string& op) const {
    for (std::size_t i = 0; i < operators.size(); ++i) {
        if (operators[i].name == op) return i;
    }
    throw ConfigError("unknown operator '" + op + "'");
}

ExperimentConfig parse_config(const json& j) {
    reject_unknown(j, "config", {"name", "landscape", "operators", "strategies", "analysis", "simulation", "design",
                                 "curve"});
    ExperimentConfig c;
    c.name = get_or<std::string>(j, "name", "config", "");
    if (j.contains("landscape")) c.landscape = parse_landscape(j.at("landscape"));
    const int n = c.landscape ? c.landscape->n : 0;

    if (j.contains("operators")) {
        const auto& ops = j.at("operators");
        if (!ops.is_array()) throw ConfigError("operators: expected an array");
        for (std::size_t i = 0; i < ops.size(); ++i) c.operators.push_back(parse_operator(ops[i], i));
    }
    if (j.contains("strategies")) {
        const auto& ss = j.at("strategies");
        if (!ss.is_array()) throw ConfigError("strategies: expected an array");
        for (std::size_t i = 0; i < ss.size(); ++i) c.strategies.push_back(parse_strategy(ss[i], i));
    }
    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        reject_unknown(a, "analysis", {"mode", "verify_power_iteration"});
        constexpr ChainMode modes[] = {ChainMode::full, ChainMode::lumped, ChainMode::automatic};
        c.analysis.mode = parse_enum(get_or<std::string>(a, "mode", "analysis", "auto"), modes, "analysis.mode");
        c.analysis.verify_power_iteration = get_or<bool>(a, "verify_power_iteration", "analysis", true);
    }
    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        reject_unknown(s, "simulation", {"runs", "seed", "max_generations", "init", "cross_validate"});
        c.simulation.runs = get_count(s, "runs", "simulation", c.simulation.runs);
        c.simulation.seed = get_count(s, "seed", "simulation", c.simulation.seed);
        c.simulation.max_generations = get_count(s, "max_generations", "simulation", c.simulation.max_generations);
        if (s.contains("init")) c.simulation.init = parse_init(s.at("init"), n);
        c.simulation.cross_validate = get_or<bool>(s, "cross_validate", "simulation", true);
    }
    if (j.contains("design")) {
        const auto& d = j.at("design");
        reject_unknown(d, "design", {"operators", "free_rule", "mode"});
        constexpr FreeStateRule rules[] = {FreeStateRule::uniform, FreeStateRule::first_operator};
        constexpr DesignMode modes[] = {DesignMode::automatic, DesignMode::mutual, DesignMode::pairwise};
        c.design.operators = get_or<std::vector<std::string>>(d, "operators", "design", {});
        c.design.free_rule = parse_enum(get_or<std::string>(d, "free_rule", "design", "uniform"), rules, "design.free_rule");
        c.design.mode = parse_enum(get_or<std::string>(d, "mode", "design", "mutual"), modes, "design.mode");
    }
    if (j.contains("curve")) {
        const auto& r = j.at("curve");
        reject_unknown(r, "curve", {"rho_min", "rho_max", "step"});
        c.curve.rho_min = get_or<double>(r, "rho_min", "curve", c.curve.rho_min);
        c.curve.rho_max = get_or<double>(r, "rho_max", "curve", c.curve.rho_max);
        c.curve.step = get_or<double>(r, "step", "curve", c.curve.step);
    }
    validate(c);
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void validate(const ExperimentConfig& c) {
    if (c.landscape && (c.landscape->n < 1 || c.landscape->n > kExactModeMaxBits)) {
        throw ConfigError("landscape.n=" + std::to_string(c.landscape->n) + " outside [1, " +
                          std::to_string(kExactModeMaxBits) + "]");
    }
    std::set<std::string> names;
    for (const auto& op : c.operators) {
        if (op.name.empty()) throw ConfigError("operator names must be non-empty");
        if (!names.insert(op.name).second) throw ConfigError("duplicate operator name '" + op.name + "'");
    }
    std::set<std::string> strategy_names;
    for (const auto& s : c.strategies) {
        const std::string where = "strategy '" + s.name + "'";
        if (s.name.empty()) throw ConfigError("strategy names must be non-empty");
        if (!strategy_names.insert(s.name).second) throw ConfigError("duplicate strategy name '" + s.name + "'");
        if (s.operators.empty()) throw ConfigError(where + ": no operators");
        for (const auto& op : s.operators) {
            if (!names.count(op)) throw ConfigError(where + ": unknown operator '" + op + "'");
        }
        if (s.type == StrategyType::designed && s.operators.size() < 2) {
            throw ConfigError(where + ": a designed strategy needs at least two operators");
        }
        if (s.type == StrategyType::mixed_table) {
            if (!c.landscape) throw ConfigError(where + ": needs a landscape to size the table");
            const std::size_t rows = s.domain == Domain::levels ? static_cast<std::size_t>(c.landscape->n) + 1
                                                                : std::size_t{1} << c.landscape->n;
            if (s.table.size() != rows) {
                throw ConfigError(where + ": table needs " + std::to_string(rows) + " rows, got " +
                                  std::to_string(s.table.size()));
            }
            for (const auto& row : s.table) {
                if (row.size() != s.operators.size()) throw ConfigError(where + ": table row width != operator count");
            }
        }
    }
    for (const auto& op : c.design.operators) {
        if (!names.count(op)) throw ConfigError("design: unknown operator '" + op + "'");
    }
    if (c.simulation.runs < 1) throw ConfigError("simulation.runs must be at least 1");
    if (c.simulation.max_generations < 1) throw ConfigError("simulation.max_generations must be at least 1");
    const auto& r = c.curve;
    if (!(r.rho_min > 0.0 && r.rho_max < 1.0 && r.rho_min <= r.rho_max && r.step > 0.0)) {
        throw ConfigError("curve: need 0 < rho_min <= rho_max < 1 and step > 0");
    }
}

json to_json(const ExperimentConfig& c) {
    json j = json::object();
    j["name"] = c.name;
    if (c.landscape) {
        const auto& l = *c.landscape;
        json lj = {{"kind", std::string(to_string(l.kind))}, {"n", l.n}};
        if (l.knapsack) {
            lj["params"] = {{"values", l.knapsack->values},
                            {"weights", l.knapsack->weights},
                            {"capacity", l.knapsack->capacity}};
        }
        if (!l.table.empty()) lj["table"] = l.table;
        j["landscape"] = lj;
    }
    j["operators"] = json::array();
    for (const auto& op : c.operators) {
        json oj = {{"name", op.name}};
        if (op.spec.kind == OperatorKind::per_bit_flip) {
            oj["kind"] = "per_bit_flip";
            oj["p"] = op.spec.p;
        } else {
            oj["kind"] = "single_bit_flip";
        }
        j["operators"].push_back(oj);
    }
    j["strategies"] = json::array();
    for (const auto& s : c.strategies) {
        json sj = {{"name", s.name}, {"type", std::string(to_string(s.type))}};
        if (s.type == StrategyType::pure) {
            sj["operator"] = s.operators.front();
        } else {
            sj["operators"] = s.operators;
        }
        if (s.type == StrategyType::mixed_table) {
            sj["domain"] = std::string(to_string(s.domain));
            sj["table"] = s.table;
        }
        if (s.type == StrategyType::designed) {
            sj["free_rule"] = std::string(to_string(s.free_rule));
            sj["mode"] = std::string(to_string(s.design_mode));
        }
        j["strategies"].push_back(sj);
    }
    j["analysis"] = {{"mode", std::string(to_string(c.analysis.mode))},
                     {"verify_power_iteration", c.analysis.verify_power_iteration}};
    json init;
    switch (c.simulation.init.kind) {
        case InitSpec::Kind::uniform:
            init = {{"kind", "uniform"}};
            break;
        case InitSpec::Kind::fixed:
            init = {{"kind", "fixed"}, {"state", c.simulation.init.state}};
            break;
        case InitSpec::Kind::distribution:
            init = {{"kind", "distribution"}, {"p", c.simulation.init.distribution}};
            break;
    }
    j["simulation"] = {{"runs", c.simulation.runs},
                       {"seed", c.simulation.seed},
                       {"max_generations", c.simulation.max_generations},
                       {"init", init},
                       {"cross_validate", c.simulation.cross_validate}};
    j["design"] = {{"operators", c.design.operators},
                   {"free_rule", std::string(to_string(c.design.free_rule))},
                   {"mode", std::string(to_string(c.design.mode))}};
    j["curve"] = {{"rho_min", c.curve.rho_min}, {"rho_max", c.curve.rho_max}, {"step", c.curve.step}};
    return j;
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mixea::cli
