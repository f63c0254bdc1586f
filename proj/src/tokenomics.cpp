#include "dagsim/tokenomics.hpp"

#include <cmath>
#include <stdexcept>

namespace dagsim {

std::vector<double> sample_token_distribution(int n, double alpha, double x_min, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("sample_token_distribution: n must be >= 1");
    if (alpha <= 1.0)
        throw std::invalid_argument("sample_token_distribution: alpha must exceed 1");
    if (x_min <= 0.0)
        throw std::invalid_argument("sample_token_distribution: x_min must be positive");

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    const double exponent = -1.0 / (alpha - 1.0);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();  // in [0, 1), so 1 - u > 0
        out.push_back(x_min * std::pow(1.0 - u, exponent));
    }
    return out;
}

static double concave_f(double t, double gamma) { return 1.0 - std::exp(-gamma * t); }

double accrue_credits(Account& acct, SimTime now, const CreditGenParams& params) {
    if (now < acct.last_generation_time)
        throw std::logic_error("accrue_credits: clock moved backwards");

    double added = 0.0;
    if (params.mode == CreditMode::Linear) {
        const double dt = (now - acct.last_generation_time).seconds();
        added = acct.tokens * params.rate * dt;
    } else {
        const double held_now = (now - acct.hold_start).seconds();
        const double held_last = (acct.last_generation_time - acct.hold_start).seconds();
        added = acct.tokens * params.cap_scale *
                (concave_f(held_now, params.gamma) - concave_f(held_last, params.gamma));
    }
    acct.credit_balance += added;
    acct.last_generation_time = now;
    return added;
}

bool consume_credits(Account& acct, double amount) {
    if (amount < 0.0) throw std::invalid_argument("consume_credits: negative amount");
    if (amount > acct.credit_balance) return false;
    acct.credit_balance -= amount;
    return true;
}

void reimburse_credits(Account& acct, double amount) {
    if (amount < 0.0) throw std::invalid_argument("reimburse_credits: negative amount");
    acct.credit_balance += amount;
}

AllotChoice optimal_allot_count(double tokens, double hold_time, double per_allot_cost,
                                double gamma, int n_max) {
    if (tokens <= 0.0 || hold_time <= 0.0 || gamma <= 0.0 || n_max < 1 || per_allot_cost < 0.0)
        throw std::invalid_argument("optimal_allot_count: all inputs must be positive");

    AllotChoice best{0, 0.0};
    for (int n = 1; n <= n_max; ++n) {
        const double total =
            tokens * n * concave_f(hold_time / n, gamma) - n * per_allot_cost;
        if (best.n == 0 || total > best.credits) best = {n, total};
    }
    return best;
}

double CreditLedger::replay_balance(int account) const {
    double balance = 0.0;
    for (const auto& e : events_) {
        if (e.account != account) continue;
        switch (e.kind) {
            case CreditEventKind::Accrue:
            case CreditEventKind::Reimburse: balance += e.amount; break;
            case CreditEventKind::Consume: balance -= e.amount; break;
        }
    }
    return balance;
}

double CreditLedger::replay_min_balance(int account) const {
    double balance = 0.0;
    double low = 0.0;
    for (const auto& e : events_) {
        if (e.account != account) continue;
        switch (e.kind) {
            case CreditEventKind::Accrue:
            case CreditEventKind::Reimburse: balance += e.amount; break;
            case CreditEventKind::Consume: balance -= e.amount; break;
        }
        low = std::min(low, balance);
    }
    return low;
}

}  // namespace dagsim
