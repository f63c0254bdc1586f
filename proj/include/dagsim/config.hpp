#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dagsim/network.hpp"
#include "dagsim/strategies.hpp"
#include "dagsim/tokenomics.hpp"

namespace dagsim {

enum class SimMode { SingleNode, MultiNode };

struct AccountsConfig {
    int n = 1000;
    double alpha = 2.0;
    double x_min = 10.0;
};

struct SchedulerConfig {
    double tau = 0.01;     // service period, seconds
    double m = 1.0;        // work budget per service
    int capacity = 500;    // blocks
    double max_age = 30.0; // seconds a block may wait unscheduled
};

struct StrategyConfig {
    // Either fractions per kind (summing to 1) or one explicit assignment
    // per account. Fractions are expanded deterministically at setup.
    std::map<StrategyKind, double> fractions;
    std::vector<StrategyKind> assignments;
    int gambler_top_k = 20;
};

struct NetworkConfig {
    int n_nodes = 20;
    int k = 4;
    double delay_lo = 0.05;   // seconds
    double delay_hi = 0.15;   // seconds
    double sync_period = 10.0;  // tip-exchange period, seconds; 0 disables
};

struct DagConfig {
    int parents_k = 2;
    std::int64_t cw_threshold = 100;
    double tip_freshness = 30.0;  // seconds
};

struct ScenarioConfig {
    std::string name;
    SimMode mode = SimMode::SingleNode;
    double duration = 0.0;  // seconds
    std::uint64_t seed = 42;
    AccountsConfig accounts;
    CreditGenParams credit;
    bool reimburse_on_drop = false;
    SchedulerConfig scheduler;
    StrategyConfig strategies;
    TrafficProfile traffic;
    NetworkConfig network;  // MultiNode only
    DagConfig dag;          // MultiNode only

    // Raw --override strings applied on top of the base config; carried
    // through so outputs can echo them. Not part of the config schema.
    std::vector<std::string> overrides;

    nlohmann::json to_json() const;
};

struct ConfigError {
    std::string path;     // dotted field path, e.g. "strategies.fractions"
    std::string message;
};

// Carries every validation problem found, not just the first.
class ConfigValidationError : public std::runtime_error {
public:
    explicit ConfigValidationError(std::vector<ConfigError> errors);
    const std::vector<ConfigError>& errors() const { return errors_; }

private:
    std::vector<ConfigError> errors_;
};

// Parses and fully validates; throws ConfigValidationError listing every
// unknown key, type mismatch, and constraint violation with its field path.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
nlohmann::json preset_config(const std::string& name);  // throws on unknown name

// Applies "dotted.path=value" onto raw JSON; value parsed as JSON when
// possible, else taken as a string. Throws std::invalid_argument on a
// malformed spec.
void apply_override(nlohmann::json& j, const std::string& spec);

}  // namespace dagsim
