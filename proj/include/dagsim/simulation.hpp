#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dagsim/config.hpp"
#include "dagsim/dag.hpp"
#include "dagsim/event.hpp"
#include "dagsim/metrics.hpp"
#include "dagsim/network.hpp"
#include "dagsim/scheduler.hpp"
#include "dagsim/tokenomics.hpp"

namespace dagsim {

// One node's runtime state: its scheduling buffer, ledger view, and the
// gossip bookkeeping that keeps forwarding and dedup deterministic.
class NodeRuntime;

// Drives a full scenario: traffic generation, bidding, scheduling, gossip,
// attachment, confirmation, and metric collection.
class Simulation {
public:
    explicit Simulation(ScenarioConfig cfg);
    ~Simulation();

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    void run();

    const ScenarioConfig& config() const { return cfg_; }
    const MetricsLog& log() const { return log_; }
    const std::vector<Account>& accounts() const { return accounts_; }
    const CreditLedger& ledger() const { return ledger_; }
    const BlockStore& blocks() const { return store_; }
    const Topology& topology() const { return topo_; }

    int node_count() const;
    const DagView& node_view(int node) const;
    const ConfirmationState& node_confirmations(int node) const;
    const SchedulerBuffer& node_buffer(int node) const;

    // Blocks every node has attached (genesis excluded).
    std::vector<std::int64_t> disseminated_ids() const;
    bool block_dropped_anywhere(std::int64_t id) const;
    bool block_scheduled_at_origin(std::int64_t id) const;

    nlohmann::json summary() const;

    // Buffer occupancy samples per node, one (time, size) pair per second.
    const std::vector<std::vector<std::pair<double, double>>>& occupancy() const {
        return occupancy_;
    }

private:
    friend class NodeRuntime;

    void setup();
    void handle(const Event& e);

    void on_generated(int account);
    void on_tick(int node);
    void on_arrival(const BlockArrival& a);
    void on_phase(int phase);
    void on_retry(int node);
    void on_fetch_request(const FetchRequest& f);
    void on_tip_announce(const TipAnnounce& t);
    void on_sync(int node);
    void on_metric_sample();

    void drain_mempool(int account);
    void issue_block(int account, double bid);
    void local_enqueue(int node, std::int64_t block);
    // fetch_target: where to request missing parents from; -1 means parents
    // must already be attached (the scheduled-block path).
    void attach_block(int node, std::int64_t block, bool forward, int fetch_target);
    void forward_block(int node, std::int64_t block);
    void drop_entry(int node, const BufferEntry& e, MetricKind reason);
    void note_attached(int node, std::int64_t block);
    void note_dropped(int node, std::int64_t block);
    void maybe_fetch(int node, std::int64_t block, int target);
    double accrue_now(int account);
    int origin_node(int account) const;
    double work_rate() const { return cfg_.scheduler.m / cfg_.scheduler.tau; }

    ScenarioConfig cfg_;
    Engine engine_;
    MetricsLog log_;
    CreditLedger ledger_;
    BlockStore store_;
    Topology topo_;
    std::vector<Account> accounts_;
    std::vector<double> weights_;  // tokens_i / total tokens
    std::vector<RngStream> account_rng_;  // strategy draws
    std::vector<RngStream> traffic_rng_;  // arrival processes
    std::vector<std::unique_ptr<NodeRuntime>> nodes_;
    std::vector<int> mempool_;  // undecided generated payloads per account

    // omniscient per-block bookkeeping
    struct BlockFacts {
        std::int32_t attach_count = 0;
        std::int32_t confirm_count = 0;
        bool disseminated = false;
        bool confirmed = false;
        bool scheduled_at_origin = false;
        bool dropped_anywhere = false;
        bool reimbursed = false;
    };
    std::vector<BlockFacts> facts_;

    std::vector<std::vector<std::pair<double, double>>> occupancy_;
    bool ran_ = false;
};

// Runs a scenario and writes events.csv, series/*.csv, summary.json under
// out_dir. Returns 0 on success, 3 on an I/O failure.
int run_to_directory(const ScenarioConfig& cfg, const std::string& out_dir);

// Derived series written by run_to_directory, exposed for reuse.
void write_outputs(const Simulation& sim, const std::string& out_dir);

}  // namespace dagsim
