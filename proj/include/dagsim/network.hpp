#pragma once

#include <vector>

#include "dagsim/rng.hpp"
#include "dagsim/sim_time.hpp"

namespace dagsim {

// Static peer-to-peer topology with a fixed delay per directed edge.
struct Topology {
    int n = 0;
    std::vector<std::vector<int>> adjacency;      // sorted neighbor lists
    std::vector<std::vector<SimTime>> delays;     // aligned with adjacency

    SimTime delay(int from, int to) const;
    bool has_edge(int a, int b) const;
    bool is_regular(int degree) const;
    bool connected() const;
};

// Random simple connected k-regular graph on n vertices (pairing model with
// rejection). Throws when n*k is odd, k >= n, or no valid graph is found
// within the retry budget.
Topology random_k_regular(int n, int k, RngStream& rng);

// Draws every directed edge's delay independently from [lo_s, hi_s] seconds.
void sample_delays(Topology& topo, double lo_s, double hi_s, RngStream& rng);

struct TrafficPhase {
    double duration_s = 0.0;
    double multiplier = 1.0;
};

struct TrafficProfile {
    std::vector<TrafficPhase> phases;
    double total_duration() const;
};

// Poisson arrival times in [start, start + duration), strictly increasing.
std::vector<SimTime> poisson_arrivals(SimTime start, SimTime duration, double rate_per_s,
                                      RngStream& rng);

}  // namespace dagsim
