#include "dagsim/strategies.hpp"

#include <algorithm>

namespace dagsim {

const char* strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::Impatient: return "impatient";
        case StrategyKind::Greedy: return "greedy";
        case StrategyKind::Gambler: return "gambler";
        case StrategyKind::Opportunistic: return "opportunistic";
    }
    return "?";
}

std::optional<StrategyKind> strategy_from_name(std::string_view name) {
    if (name == "impatient") return StrategyKind::Impatient;
    if (name == "greedy") return StrategyKind::Greedy;
    if (name == "gambler") return StrategyKind::Gambler;
    if (name == "opportunistic") return StrategyKind::Opportunistic;
    return std::nullopt;
}

BidDecision impatient_bid(double balance) { return BidDecision::Issue(balance); }

BidDecision greedy_bid(double balance, const std::vector<double>& congestion_view) {
    double target = 0.0;
    if (!congestion_view.empty())
        target = *std::max_element(congestion_view.begin(), congestion_view.end()) + 1.0;
    if (target <= balance) return BidDecision::Issue(target);
    return BidDecision::Abstain();
}

BidDecision gambler_bid(double balance, const std::vector<double>& congestion_view,
                        RngStream& rng) {
    if (congestion_view.empty()) return BidDecision::Issue(0.0);
    const std::size_t i = rng.uniform_index(congestion_view.size());
    return BidDecision::Issue(std::min(congestion_view[i], balance));
}

BidDecision opportunistic_bid() { return BidDecision::Issue(0.0); }

}  // namespace dagsim
