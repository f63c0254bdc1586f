#include "dagsim/network.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dagsim {

SimTime Topology::delay(int from, int to) const {
    const auto& nbrs = adjacency[static_cast<std::size_t>(from)];
    const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), to);
    if (it == nbrs.end() || *it != to)
        throw std::out_of_range("Topology::delay: not a neighbor");
    const auto idx = static_cast<std::size_t>(it - nbrs.begin());
    return delays[static_cast<std::size_t>(from)][idx];
}

bool Topology::has_edge(int a, int b) const {
    const auto& nbrs = adjacency[static_cast<std::size_t>(a)];
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

bool Topology::is_regular(int degree) const {
    for (const auto& nbrs : adjacency)
        if (static_cast<int>(nbrs.size()) != degree) return false;
    return true;
}

bool Topology::connected() const {
    if (n == 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : adjacency[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    return reached == n;
}

Topology random_k_regular(int n, int k, RngStream& rng) {
    if (n < 2 || k < 1) throw std::invalid_argument("random_k_regular: need n >= 2, k >= 1");
    if (k >= n) throw std::invalid_argument("random_k_regular: k must be below n");
    if ((static_cast<long long>(n) * k) % 2 != 0)
        throw std::invalid_argument("random_k_regular: n*k must be even");

    constexpr int kMaxRetries = 10000;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        // Pairing model: k stubs per vertex, shuffled, paired off.
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
        for (int v = 0; v < n; ++v)
            for (int i = 0; i < k; ++i) stubs.push_back(v);
        for (std::size_t i = stubs.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i + 1));
            std::swap(stubs[i], stubs[j]);
        }

        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        bool simple = true;
        for (std::size_t i = 0; i + 1 < stubs.size() && simple; i += 2) {
            const int a = stubs[i];
            const int b = stubs[i + 1];
            if (a == b) {
                simple = false;
                break;
            }
            auto& na = adj[static_cast<std::size_t>(a)];
            if (std::find(na.begin(), na.end(), b) != na.end()) {
                simple = false;
                break;
            }
            na.push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
        if (!simple) continue;

        Topology topo;
        topo.n = n;
        topo.adjacency = std::move(adj);
        for (auto& nbrs : topo.adjacency) std::sort(nbrs.begin(), nbrs.end());
        if (!topo.connected()) continue;
        topo.delays.assign(static_cast<std::size_t>(n), {});
        for (int v = 0; v < n; ++v)
            topo.delays[static_cast<std::size_t>(v)].assign(
                topo.adjacency[static_cast<std::size_t>(v)].size(), SimTime{});
        return topo;
    }
    throw std::runtime_error("random_k_regular: no simple connected graph found");
}

void sample_delays(Topology& topo, double lo_s, double hi_s, RngStream& rng) {
    if (lo_s > hi_s) throw std::invalid_argument("sample_delays: lo must not exceed hi");
    if (lo_s < 0.0) throw std::invalid_argument("sample_delays: negative delay");

    // One independent draw per directed edge, in (from, to) order.
    for (int a = 0; a < topo.n; ++a) {
        const auto& nbrs = topo.adjacency[static_cast<std::size_t>(a)];
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            topo.delays[static_cast<std::size_t>(a)][i] = seconds(rng.uniform(lo_s, hi_s));
    }
}

double TrafficProfile::total_duration() const {
    double total = 0.0;
    for (const auto& p : phases) total += p.duration_s;
    return total;
}

std::vector<SimTime> poisson_arrivals(SimTime start, SimTime duration, double rate_per_s,
                                      RngStream& rng) {
    std::vector<SimTime> out;
    if (rate_per_s <= 0.0 || duration.us <= 0) return out;
    const SimTime end = start + duration;
    SimTime t = start;
    for (;;) {
        t += seconds(rng.exponential(rate_per_s));
        if (t >= end) break;
        out.push_back(t);
    }
    return out;
}

}  // namespace dagsim
