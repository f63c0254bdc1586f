#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "dagsim/rng.hpp"

namespace dagsim {

enum class StrategyKind { Impatient, Greedy, Gambler, Opportunistic };

const char* strategy_name(StrategyKind k);
std::optional<StrategyKind> strategy_from_name(std::string_view name);

// Outcome of a bidding decision: either consume `bid` credits and issue, or
// hold the block back.
struct BidDecision {
    bool issue = false;
    double bid = 0.0;

    static BidDecision Issue(double b) { return {true, b}; }
    static BidDecision Abstain() { return {false, 0.0}; }
};

// Bid the full balance.
BidDecision impatient_bid(double balance);

// Outbid the highest buffered block by one credit; abstain while that is
// unaffordable. An empty buffer costs nothing.
BidDecision greedy_bid(double balance, const std::vector<double>& congestion_view);

// Match a uniformly chosen entry of the congestion view, clamped to the
// balance. An empty view costs nothing.
BidDecision gambler_bid(double balance, const std::vector<double>& congestion_view, RngStream& rng);

// Always bid zero.
BidDecision opportunistic_bid();

}  // namespace dagsim
