#pragma once

#include <cstdint>
#include <vector>

#include "dagsim/rng.hpp"
#include "dagsim/sim_time.hpp"
#include "dagsim/strategies.hpp"

namespace dagsim {

enum class CreditMode { Linear, Concave };

// Credit generation rule. Linear accrues `rate` credits per token-second.
// Concave accrues cap_scale * tokens * (1 - exp(-gamma * held_seconds)),
// measured from hold_start, so each holding saturates over time.
struct CreditGenParams {
    CreditMode mode = CreditMode::Linear;
    double rate = 0.1;       // credits per token-second (linear)
    double gamma = 1.0;      // saturation rate, 1/s (concave)
    double cap_scale = 1.0;  // credits per token at saturation (concave)
};

struct Account {
    int id = 0;
    double tokens = 0.0;
    double credit_balance = 0.0;
    StrategyKind strategy = StrategyKind::Opportunistic;
    SimTime last_generation_time{};
    SimTime hold_start{};
};

// Token holdings drawn from a bounded Pareto-style power law with density
// proportional to (x / x_min)^(-alpha) on [x_min, inf); alpha must exceed 1.
std::vector<double> sample_token_distribution(int n, double alpha, double x_min, RngStream& rng);

// Advances the account's generation state to `now`; returns the credits added.
double accrue_credits(Account& acct, SimTime now, const CreditGenParams& params);

// False (and the account unchanged) when amount exceeds the balance.
[[nodiscard]] bool consume_credits(Account& acct, double amount);

void reimburse_credits(Account& acct, double amount);

struct AllotChoice {
    int n = 0;
    double credits = 0.0;
};

// Best split of `tokens` into n equal allotments, each held hold_time / n
// seconds under the concave rule, net of a per-allotment cost. Ties go to
// the smaller n.
AllotChoice optimal_allot_count(double tokens, double hold_time, double per_allot_cost,
                                double gamma, int n_max);

// Append-only record of every balance change, replayable for audits.
enum class CreditEventKind { Accrue, Consume, Reimburse };

struct CreditEvent {
    int account;
    CreditEventKind kind;
    double amount;
};

class CreditLedger {
public:
    void record(int account, CreditEventKind kind, double amount) {
        events_.push_back({account, kind, amount});
    }
    const std::vector<CreditEvent>& events() const { return events_; }

    // Fold of one account's events in recorded order.
    double replay_balance(int account) const;

    // Smallest running balance the account ever saw during replay.
    double replay_min_balance(int account) const;

private:
    std::vector<CreditEvent> events_;
};

}  // namespace dagsim
