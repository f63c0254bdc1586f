#include "dagsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dagsim {

using nlohmann::json;

ConfigValidationError::ConfigValidationError(std::vector<ConfigError> errors)
    : std::runtime_error([&errors] {
          std::ostringstream os;
          os << "invalid config (" << errors.size() << " problem"
             << (errors.size() == 1 ? "" : "s") << ")";
          for (const auto& e : errors) os << "\n  " << e.path << ": " << e.message;
          return os.str();
      }()),
      errors_(std::move(errors)) {}

namespace {

// Collects problems instead of failing fast so a bad config reports every
// mistake in one pass.
struct Checker {
    std::vector<ConfigError> errors;

    void fail(const std::string& path, const std::string& msg) { errors.push_back({path, msg}); }

    void check_keys(const json& j, const std::string& path,
                    std::initializer_list<const char*> known) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool ok = false;
            for (const char* k : known)
                if (it.key() == k) ok = true;
            if (!ok) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
        }
    }

    bool require_object(const json& j, const std::string& path) {
        if (j.is_object()) return true;
        fail(path, "expected an object");
        return false;
    }

    double get_number(const json& obj, const char* key, const std::string& path,
                      double fallback) {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (!v.is_number()) {
            fail(path, "expected a number");
            return fallback;
        }
        return v.get<double>();
    }

    std::int64_t get_int(const json& obj, const char* key, const std::string& path,
                         std::int64_t fallback) {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            fail(path, "expected an integer");
            return fallback;
        }
        return v.get<std::int64_t>();
    }

    bool get_bool(const json& obj, const char* key, const std::string& path, bool fallback) {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (!v.is_boolean()) {
            fail(path, "expected a boolean");
            return fallback;
        }
        return v.get<bool>();
    }

    std::string get_string(const json& obj, const char* key, const std::string& path,
                           const std::string& fallback) {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (!v.is_string()) {
            fail(path, "expected a string");
            return fallback;
        }
        return v.get<std::string>();
    }

    void positive(double v, const std::string& path) {
        if (!(v > 0.0)) fail(path, "must be positive");
    }
    void non_negative(double v, const std::string& path) {
        if (v < 0.0) fail(path, "must be >= 0");
    }
};

}  // namespace

ScenarioConfig parse_config(const json& j) {
    Checker c;
    ScenarioConfig cfg;

    if (!j.is_object())
        throw ConfigValidationError(
            std::vector<ConfigError>{{"", "config root must be an object"}});

    c.check_keys(j, "",
                 {"name", "mode", "duration", "seed", "accounts", "credit", "scheduler",
                  "strategies", "traffic", "network", "dag"});

    cfg.name = c.get_string(j, "name", "name", "");

    const std::string mode = c.get_string(j, "mode", "mode", "single_node");
    if (mode == "single_node") {
        cfg.mode = SimMode::SingleNode;
    } else if (mode == "multi_node") {
        cfg.mode = SimMode::MultiNode;
    } else {
        c.fail("mode", "must be \"single_node\" or \"multi_node\"");
    }

    cfg.duration = c.get_number(j, "duration", "duration", 0.0);
    c.positive(cfg.duration, "duration");

    const std::int64_t seed = c.get_int(j, "seed", "seed", 42);
    if (seed < 0) c.fail("seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);

    // accounts
    if (j.contains("accounts") && c.require_object(j.at("accounts"), "accounts")) {
        const json& a = j.at("accounts");
        c.check_keys(a, "accounts", {"n", "alpha", "x_min"});
        cfg.accounts.n = static_cast<int>(c.get_int(a, "n", "accounts.n", cfg.accounts.n));
        cfg.accounts.alpha = c.get_number(a, "alpha", "accounts.alpha", cfg.accounts.alpha);
        cfg.accounts.x_min = c.get_number(a, "x_min", "accounts.x_min", cfg.accounts.x_min);
        if (cfg.accounts.n < 1) c.fail("accounts.n", "must be >= 1");
        if (cfg.accounts.alpha <= 1.0) c.fail("accounts.alpha", "must exceed 1");
        c.positive(cfg.accounts.x_min, "accounts.x_min");
    }

    // credit
    if (j.contains("credit") && c.require_object(j.at("credit"), "credit")) {
        const json& cr = j.at("credit");
        c.check_keys(cr, "credit", {"mode", "rate", "gamma", "cap_scale", "reimburse_on_drop"});
        const std::string cm = c.get_string(cr, "mode", "credit.mode", "linear");
        if (cm == "linear") {
            cfg.credit.mode = CreditMode::Linear;
        } else if (cm == "concave") {
            cfg.credit.mode = CreditMode::Concave;
        } else {
            c.fail("credit.mode", "must be \"linear\" or \"concave\"");
        }
        cfg.credit.rate = c.get_number(cr, "rate", "credit.rate", cfg.credit.rate);
        cfg.credit.gamma = c.get_number(cr, "gamma", "credit.gamma", cfg.credit.gamma);
        cfg.credit.cap_scale =
            c.get_number(cr, "cap_scale", "credit.cap_scale", cfg.credit.cap_scale);
        cfg.reimburse_on_drop =
            c.get_bool(cr, "reimburse_on_drop", "credit.reimburse_on_drop", false);
        c.positive(cfg.credit.rate, "credit.rate");
        c.positive(cfg.credit.gamma, "credit.gamma");
        c.positive(cfg.credit.cap_scale, "credit.cap_scale");
    }

    // scheduler
    if (j.contains("scheduler") && c.require_object(j.at("scheduler"), "scheduler")) {
        const json& s = j.at("scheduler");
        c.check_keys(s, "scheduler", {"tau", "m", "capacity", "max_age"});
        cfg.scheduler.tau = c.get_number(s, "tau", "scheduler.tau", cfg.scheduler.tau);
        cfg.scheduler.m = c.get_number(s, "m", "scheduler.m", cfg.scheduler.m);
        cfg.scheduler.capacity =
            static_cast<int>(c.get_int(s, "capacity", "scheduler.capacity", cfg.scheduler.capacity));
        cfg.scheduler.max_age =
            c.get_number(s, "max_age", "scheduler.max_age", cfg.scheduler.max_age);
        c.positive(cfg.scheduler.tau, "scheduler.tau");
        c.positive(cfg.scheduler.m, "scheduler.m");
        if (cfg.scheduler.capacity < 1) c.fail("scheduler.capacity", "must be >= 1");
        c.positive(cfg.scheduler.max_age, "scheduler.max_age");
    }

    // strategies
    if (j.contains("strategies") && c.require_object(j.at("strategies"), "strategies")) {
        const json& s = j.at("strategies");
        c.check_keys(s, "strategies", {"fractions", "assignments", "gambler_top_k"});
        const bool has_fr = s.contains("fractions");
        const bool has_as = s.contains("assignments");
        if (has_fr == has_as) {
            c.fail("strategies", "exactly one of fractions or assignments required");
        } else if (has_fr) {
            const json& fr = s.at("fractions");
            if (!fr.is_object()) {
                c.fail("strategies.fractions", "expected an object");
            } else {
                double sum = 0.0;
                for (auto it = fr.begin(); it != fr.end(); ++it) {
                    const auto kind = strategy_from_name(it.key());
                    if (!kind) {
                        c.fail("strategies.fractions." + it.key(), "unknown strategy");
                        continue;
                    }
                    if (!it.value().is_number()) {
                        c.fail("strategies.fractions." + it.key(), "expected a number");
                        continue;
                    }
                    const double f = it.value().get<double>();
                    if (f < 0.0) {
                        c.fail("strategies.fractions." + it.key(), "must be >= 0");
                        continue;
                    }
                    cfg.strategies.fractions[*kind] = f;
                    sum += f;
                }
                if (std::abs(sum - 1.0) > 1e-9)
                    c.fail("strategies.fractions", "must sum to 1");
            }
        } else {
            const json& as = s.at("assignments");
            if (!as.is_array()) {
                c.fail("strategies.assignments", "expected an array");
            } else {
                for (std::size_t i = 0; i < as.size(); ++i) {
                    if (!as[i].is_string()) {
                        c.fail("strategies.assignments[" + std::to_string(i) + "]",
                               "expected a strategy name");
                        continue;
                    }
                    const auto kind = strategy_from_name(as[i].get<std::string>());
                    if (!kind) {
                        c.fail("strategies.assignments[" + std::to_string(i) + "]",
                               "unknown strategy");
                        continue;
                    }
                    cfg.strategies.assignments.push_back(*kind);
                }
                if (static_cast<int>(as.size()) != cfg.accounts.n)
                    c.fail("strategies.assignments", "length must equal accounts.n");
            }
        }
        cfg.strategies.gambler_top_k = static_cast<int>(
            c.get_int(s, "gambler_top_k", "strategies.gambler_top_k", 20));
        if (cfg.strategies.gambler_top_k < 1)
            c.fail("strategies.gambler_top_k", "must be >= 1");
    } else if (!j.contains("strategies")) {
        c.fail("strategies", "required");
    }

    // traffic
    if (j.contains("traffic") && c.require_object(j.at("traffic"), "traffic")) {
        const json& t = j.at("traffic");
        c.check_keys(t, "traffic", {"phases"});
        if (!t.contains("phases") || !t.at("phases").is_array()) {
            c.fail("traffic.phases", "expected an array of phases");
        } else {
            const json& ph = t.at("phases");
            for (std::size_t i = 0; i < ph.size(); ++i) {
                const std::string p = "traffic.phases[" + std::to_string(i) + "]";
                if (!ph[i].is_object()) {
                    c.fail(p, "expected an object");
                    continue;
                }
                c.check_keys(ph[i], p, {"duration", "multiplier"});
                TrafficPhase phase;
                phase.duration_s = c.get_number(ph[i], "duration", p + ".duration", 0.0);
                phase.multiplier = c.get_number(ph[i], "multiplier", p + ".multiplier", 0.0);
                c.positive(phase.duration_s, p + ".duration");
                c.positive(phase.multiplier, p + ".multiplier");
                cfg.traffic.phases.push_back(phase);
            }
        }
    } else if (!j.contains("traffic")) {
        c.fail("traffic", "required");
    }

    // network (multi-node only)
    if (j.contains("network") && c.require_object(j.at("network"), "network")) {
        const json& n = j.at("network");
        c.check_keys(n, "network", {"n_nodes", "k", "delay_lo", "delay_hi", "sync_period"});
        cfg.network.n_nodes =
            static_cast<int>(c.get_int(n, "n_nodes", "network.n_nodes", cfg.network.n_nodes));
        cfg.network.k = static_cast<int>(c.get_int(n, "k", "network.k", cfg.network.k));
        cfg.network.delay_lo =
            c.get_number(n, "delay_lo", "network.delay_lo", cfg.network.delay_lo);
        cfg.network.delay_hi =
            c.get_number(n, "delay_hi", "network.delay_hi", cfg.network.delay_hi);
        cfg.network.sync_period =
            c.get_number(n, "sync_period", "network.sync_period", cfg.network.sync_period);
        if (cfg.network.n_nodes < 2) c.fail("network.n_nodes", "must be >= 2");
        if (cfg.network.k < 1) c.fail("network.k", "must be >= 1");
        if (cfg.network.k >= cfg.network.n_nodes) c.fail("network.k", "must be below n_nodes");
        c.non_negative(cfg.network.delay_lo, "network.delay_lo");
        if (cfg.network.delay_hi < cfg.network.delay_lo)
            c.fail("network.delay_hi", "must be >= delay_lo");
        c.non_negative(cfg.network.sync_period, "network.sync_period");
    }

    // dag (multi-node only)
    if (j.contains("dag") && c.require_object(j.at("dag"), "dag")) {
        const json& d = j.at("dag");
        c.check_keys(d, "dag", {"parents_k", "cw_threshold", "tip_freshness"});
        cfg.dag.parents_k =
            static_cast<int>(c.get_int(d, "parents_k", "dag.parents_k", cfg.dag.parents_k));
        cfg.dag.cw_threshold = c.get_int(d, "cw_threshold", "dag.cw_threshold", cfg.dag.cw_threshold);
        cfg.dag.tip_freshness =
            c.get_number(d, "tip_freshness", "dag.tip_freshness", cfg.dag.tip_freshness);
        if (cfg.dag.parents_k < 1) c.fail("dag.parents_k", "must be >= 1");
        if (cfg.dag.cw_threshold < 1) c.fail("dag.cw_threshold", "must be >= 1");
        c.positive(cfg.dag.tip_freshness, "dag.tip_freshness");
    }

    if (cfg.mode == SimMode::MultiNode && cfg.network.n_nodes != cfg.accounts.n)
        c.fail("network.n_nodes", "multi_node mode requires n_nodes == accounts.n");

    if (!cfg.strategies.assignments.empty() &&
        static_cast<int>(cfg.strategies.assignments.size()) != cfg.accounts.n &&
        c.errors.empty())
        c.fail("strategies.assignments", "length must equal accounts.n");

    if (!c.errors.empty()) throw ConfigValidationError(std::move(c.errors));
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigValidationError({{path, "cannot open file"}});
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigValidationError({{path, std::string("JSON parse error: ") + e.what()}});
    }
    return parse_config(j);
}

nlohmann::json ScenarioConfig::to_json() const {
    json j;
    j["name"] = name;
    j["mode"] = mode == SimMode::SingleNode ? "single_node" : "multi_node";
    j["duration"] = duration;
    j["seed"] = seed;
    j["accounts"] = {{"n", accounts.n}, {"alpha", accounts.alpha}, {"x_min", accounts.x_min}};
    j["credit"] = {{"mode", credit.mode == CreditMode::Linear ? "linear" : "concave"},
                   {"rate", credit.rate},
                   {"gamma", credit.gamma},
                   {"cap_scale", credit.cap_scale},
                   {"reimburse_on_drop", reimburse_on_drop}};
    j["scheduler"] = {{"tau", scheduler.tau},
                      {"m", scheduler.m},
                      {"capacity", scheduler.capacity},
                      {"max_age", scheduler.max_age}};
    json strat;
    if (!strategies.fractions.empty()) {
        json fr = json::object();
        for (const auto& [kind, f] : strategies.fractions) fr[strategy_name(kind)] = f;
        strat["fractions"] = fr;
    }
    if (!strategies.assignments.empty()) {
        json as = json::array();
        for (StrategyKind k : strategies.assignments) as.push_back(strategy_name(k));
        strat["assignments"] = as;
    }
    strat["gambler_top_k"] = strategies.gambler_top_k;
    j["strategies"] = strat;
    json phases = json::array();
    for (const auto& p : traffic.phases)
        phases.push_back({{"duration", p.duration_s}, {"multiplier", p.multiplier}});
    j["traffic"] = {{"phases", phases}};
    if (mode == SimMode::MultiNode) {
        j["network"] = {{"n_nodes", network.n_nodes},
                        {"k", network.k},
                        {"delay_lo", network.delay_lo},
                        {"delay_hi", network.delay_hi},
                        {"sync_period", network.sync_period}};
        j["dag"] = {{"parents_k", dag.parents_k},
                    {"cw_threshold", dag.cw_threshold},
                    {"tip_freshness", dag.tip_freshness}};
    }
    return j;
}

namespace {

json single_node_preset(const char* name, const char* strategy) {
    json phases = json::array();
    for (int i = 0; i < 20; ++i)
        phases.push_back({{"duration", 180.0}, {"multiplier", i % 2 == 0 ? 0.5 : 1.5}});
    json fractions = json::object();
    fractions[strategy] = 1.0;
    return json{
        {"name", name},
        {"mode", "single_node"},
        {"duration", 3600.0},
        {"seed", 42},
        {"accounts", {{"n", 1000}, {"alpha", 2.0}, {"x_min", 10.0}}},
        {"credit", {{"mode", "linear"}, {"rate", 0.1}, {"reimburse_on_drop", false}}},
        {"scheduler", {{"tau", 0.01}, {"m", 1.0}, {"capacity", 500}, {"max_age", 30.0}}},
        {"strategies", {{"fractions", fractions}, {"gambler_top_k", 20}}},
        {"traffic", {{"phases", phases}}},
    };
}

json mixed_preset() {
    json j = single_node_preset("single-node-mixed", "greedy");
    j["strategies"]["fractions"] =
        json{{"impatient", 0.1}, {"greedy", 0.6}, {"gambler", 0.3}};
    return j;
}

json multi_node_preset() {
    json phases = json::array();
    phases.push_back({{"duration", 60.0}, {"multiplier", 0.5}});
    phases.push_back({{"duration", 120.0}, {"multiplier", 1.5}});
    phases.push_back({{"duration", 60.0}, {"multiplier", 0.5}});
    return json{
        {"name", "multi-node-greedy-opp"},
        {"mode", "multi_node"},
        {"duration", 300.0},  // 240 s of traffic plus a drain to settle views
        {"seed", 42},
        {"accounts", {{"n", 20}, {"alpha", 2.0}, {"x_min", 10.0}}},
        {"credit", {{"mode", "linear"}, {"rate", 0.1}, {"reimburse_on_drop", false}}},
        {"scheduler", {{"tau", 0.04}, {"m", 1.0}, {"capacity", 500}, {"max_age", 30.0}}},
        {"strategies",
         {{"fractions", {{"greedy", 0.5}, {"opportunistic", 0.5}}}, {"gambler_top_k", 20}}},
        {"traffic", {{"phases", phases}}},
        {"network",
         {{"n_nodes", 20}, {"k", 4}, {"delay_lo", 0.05}, {"delay_hi", 0.15}, {"sync_period", 10.0}}},
        {"dag", {{"parents_k", 2}, {"cw_threshold", 100}, {"tip_freshness", 30.0}}},
    };
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"single-node-impatient", "single-node-greedy", "single-node-gambler",
            "single-node-mixed", "multi-node-greedy-opp"};
}

bool is_preset(const std::string& name) {
    for (const auto& n : preset_names())
        if (n == name) return true;
    return false;
}

nlohmann::json preset_config(const std::string& name) {
    if (name == "single-node-impatient") return single_node_preset(name.c_str(), "impatient");
    if (name == "single-node-greedy") return single_node_preset(name.c_str(), "greedy");
    if (name == "single-node-gambler") return single_node_preset(name.c_str(), "gambler");
    if (name == "single-node-mixed") return mixed_preset();
    if (name == "multi-node-greedy-opp") return multi_node_preset();
    throw std::invalid_argument("unknown scenario: " + name);
}

void apply_override(nlohmann::json& j, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("override must look like key.path=value: " + spec);
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // bare strings pass through
    }

    json* cur = &j;
    std::size_t begin = 0;
    for (;;) {
        const auto dot = path.find('.', begin);
        const std::string key = path.substr(begin, dot - begin);
        if (key.empty())
            throw std::invalid_argument("override has an empty path segment: " + spec);
        if (dot == std::string::npos) {
            (*cur)[key] = value;
            return;
        }
        if (!cur->contains(key) || !(*cur)[key].is_object()) (*cur)[key] = json::object();
        cur = &(*cur)[key];
        begin = dot + 1;
    }
}

}  // namespace dagsim
