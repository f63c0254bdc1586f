#include "dagsim/simulation.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <unordered_map>

namespace dagsim {

namespace {
constexpr double kRetryPeriodS = 1.0;    // mempool retry cadence
constexpr double kSamplePeriodS = 1.0;   // buffer occupancy sampling
constexpr double kSeriesWindowS = 10.0;  // rate and moving-average window
}  // namespace

// Per-node runtime: the scheduling buffer, the ledger view (multi-node), and
// gossip bookkeeping. Block lifecycle at one node:
//   Unknown -> Buffered -> Attached            (scheduled here)
//   Unknown -> PendingGossip -> Buffered ...   (gossip block awaiting parents)
//   Unknown -> ParkedFetch -> Attached         (fetched block awaiting parents)
//   Buffered -> Dropped                        (full / stale / rejected)
// Dropped blocks may be re-admitted by a later gossip copy; Attached is
// terminal and sticky.
class NodeRuntime {
public:
    enum class BState : std::uint8_t {
        Unknown,
        PendingGossip,  // gossip arrival waiting for parents to attach
        Buffered,
        ParkedFetch,    // fetch response waiting for parents to attach
        Attached,
        Dropped,
    };

    NodeRuntime(int id, const ScenarioConfig& cfg, const BlockStore* store, bool multi)
        : id(id),
          buffer(static_cast<std::size_t>(cfg.scheduler.capacity),
                 seconds(cfg.scheduler.max_age)),
          tipsel(cfg.seed, "tipsel/" + std::to_string(id)) {
        if (multi) {
            view.emplace(store);
            conf.emplace(cfg.dag.cw_threshold);
        }
    }

    void ensure(std::int64_t block) {
        const auto need = static_cast<std::size_t>(block) + 1;
        if (states.size() < need) {
            states.resize(need, BState::Unknown);
            sent_mask.resize(need, 0);
            first_sender.resize(need, -1);
            fetch_requested.resize(need, 0);
        }
    }

    BState state(std::int64_t block) const {
        const auto i = static_cast<std::size_t>(block);
        return i < states.size() ? states[i] : BState::Unknown;
    }

    void set_state(std::int64_t block, BState s) {
        states[static_cast<std::size_t>(block)] = s;
    }

    int id;
    SchedulerBuffer buffer;
    std::optional<DagView> view;
    std::optional<ConfirmationState> conf;
    RngStream tipsel;

    std::vector<BState> states;
    std::vector<std::uint32_t> sent_mask;   // neighbor-ordinal bits, gossip sends
    std::vector<int> first_sender;          // latest admitting sender, -1 = self
    std::vector<std::uint8_t> fetch_requested;

    std::unordered_map<std::int64_t, int> gossip_missing;  // block -> #parents awaited
    std::unordered_map<std::int64_t, std::vector<std::int64_t>> gossip_waiters;
};

using BState = NodeRuntime::BState;

Simulation::Simulation(ScenarioConfig cfg) : cfg_(std::move(cfg)) { setup(); }

Simulation::~Simulation() = default;

int Simulation::node_count() const { return static_cast<int>(nodes_.size()); }

const DagView& Simulation::node_view(int node) const {
    const auto& v = nodes_.at(static_cast<std::size_t>(node))->view;
    if (!v) throw std::logic_error("node_view: single-node simulations have no ledger view");
    return *v;
}

const ConfirmationState& Simulation::node_confirmations(int node) const {
    const auto& c = nodes_.at(static_cast<std::size_t>(node))->conf;
    if (!c) throw std::logic_error("node_confirmations: single-node simulation");
    return *c;
}

const SchedulerBuffer& Simulation::node_buffer(int node) const {
    return nodes_.at(static_cast<std::size_t>(node))->buffer;
}

int Simulation::origin_node(int account) const {
    return cfg_.mode == SimMode::MultiNode ? account : 0;
}

bool Simulation::block_dropped_anywhere(std::int64_t id) const {
    return facts_.at(static_cast<std::size_t>(id)).dropped_anywhere;
}

bool Simulation::block_scheduled_at_origin(std::int64_t id) const {
    return facts_.at(static_cast<std::size_t>(id)).scheduled_at_origin;
}

std::vector<std::int64_t> Simulation::disseminated_ids() const {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < facts_.size(); ++i) {
        if (!facts_[i].disseminated) continue;
        if (cfg_.mode == SimMode::MultiNode && i == 0) continue;  // genesis
        out.push_back(static_cast<std::int64_t>(i));
    }
    return out;
}

void Simulation::setup() {
    const bool multi = cfg_.mode == SimMode::MultiNode;
    const int n_accounts = cfg_.accounts.n;
    const int n_nodes = multi ? cfg_.network.n_nodes : 1;

    if (multi && cfg_.network.k > 31)
        throw std::invalid_argument("Simulation: node degree above 31 is not supported");

    // token holdings and account records
    RngStream token_rng(cfg_.seed, "tokens");
    const std::vector<double> tokens =
        sample_token_distribution(n_accounts, cfg_.accounts.alpha, cfg_.accounts.x_min, token_rng);
    double total_tokens = 0.0;
    for (double t : tokens) total_tokens += t;

    // strategy assignment: explicit list, or fractions expanded by largest
    // remainder in declaration order
    std::vector<StrategyKind> assigned = cfg_.strategies.assignments;
    if (assigned.empty()) {
        const StrategyKind order[] = {StrategyKind::Impatient, StrategyKind::Greedy,
                                      StrategyKind::Gambler, StrategyKind::Opportunistic};
        std::vector<std::pair<StrategyKind, double>> shares;
        for (StrategyKind k : order) {
            const auto it = cfg_.strategies.fractions.find(k);
            if (it != cfg_.strategies.fractions.end() && it->second > 0.0)
                shares.emplace_back(k, it->second);
        }
        if (shares.empty()) throw std::invalid_argument("Simulation: no strategies configured");
        std::vector<int> counts(shares.size());
        std::vector<double> remainders(shares.size());
        int used = 0;
        for (std::size_t i = 0; i < shares.size(); ++i) {
            const double exact = shares[i].second * n_accounts;
            counts[i] = static_cast<int>(exact);
            remainders[i] = exact - counts[i];
            used += counts[i];
        }
        while (used < n_accounts) {
            const std::size_t best = static_cast<std::size_t>(
                std::max_element(remainders.begin(), remainders.end()) - remainders.begin());
            ++counts[best];
            remainders[best] = -1.0;
            ++used;
        }
        for (std::size_t i = 0; i < shares.size(); ++i)
            for (int c = 0; c < counts[i]; ++c) assigned.push_back(shares[i].first);
        assigned.resize(static_cast<std::size_t>(n_accounts), shares.back().first);
    }

    accounts_.resize(static_cast<std::size_t>(n_accounts));
    weights_.resize(static_cast<std::size_t>(n_accounts));
    account_rng_.reserve(static_cast<std::size_t>(n_accounts));
    traffic_rng_.reserve(static_cast<std::size_t>(n_accounts));
    mempool_.assign(static_cast<std::size_t>(n_accounts), 0);
    for (int a = 0; a < n_accounts; ++a) {
        auto& acct = accounts_[static_cast<std::size_t>(a)];
        acct.id = a;
        acct.tokens = tokens[static_cast<std::size_t>(a)];
        acct.strategy = assigned[static_cast<std::size_t>(a)];
        weights_[static_cast<std::size_t>(a)] = acct.tokens / total_tokens;
        account_rng_.emplace_back(cfg_.seed, "strategy/" + std::to_string(a));
        traffic_rng_.emplace_back(cfg_.seed, "traffic/" + std::to_string(a));
    }

    // network
    if (multi) {
        RngStream topo_rng(cfg_.seed, "topology");
        topo_ = random_k_regular(n_nodes, cfg_.network.k, topo_rng);
        RngStream delay_rng(cfg_.seed, "delays");
        sample_delays(topo_, cfg_.network.delay_lo, cfg_.network.delay_hi, delay_rng);
    }

    // nodes and (multi-node) genesis
    nodes_.reserve(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i)
        nodes_.push_back(std::make_unique<NodeRuntime>(i, cfg_, &store_, multi));
    occupancy_.assign(static_cast<std::size_t>(n_nodes), {});

    if (multi) {
        DagBlock genesis;
        genesis.issuer = -1;
        genesis.work = 1.0;
        const std::int64_t gid = store_.add(std::move(genesis));
        facts_.resize(1);
        for (auto& node : nodes_) {
            node->ensure(gid);
            node->view->attach(gid);
            node->view->take_weight_updates();
            node->set_state(gid, BState::Attached);
        }
        facts_[0].attach_count = static_cast<std::uint8_t>(n_nodes);
        facts_[0].disseminated = true;  // silently: genesis is never issued
        facts_[0].scheduled_at_origin = true;
    }

    // initial events
    if (!cfg_.traffic.phases.empty()) engine_.schedule(SimTime{}, TrafficPhaseChange{0});
    for (int i = 0; i < n_nodes; ++i)
        engine_.schedule(seconds(cfg_.scheduler.tau), SchedulerTick{i});
    for (int i = 0; i < n_nodes; ++i)
        engine_.schedule(seconds(kRetryPeriodS), RetryTick{i});
    engine_.schedule(seconds(kSamplePeriodS), MetricSample{});
    if (multi && cfg_.network.sync_period > 0.0)
        for (int i = 0; i < n_nodes; ++i)
            engine_.schedule(seconds(cfg_.network.sync_period), SyncTick{i});
}

void Simulation::run() {
    if (ran_) throw std::logic_error("Simulation::run: already ran");
    ran_ = true;
    engine_.run_until(seconds(cfg_.duration), [this](const Event& e) { handle(e); });
    // settle generation state so reported balances reflect the full run
    for (auto& acct : accounts_) accrue_now(acct.id);
}

void Simulation::handle(const Event& e) {
    switch (e.kind()) {
        case EventKind::BlockGenerated:
            on_generated(std::get<BlockGenerated>(e.payload).account);
            break;
        case EventKind::SchedulerTick:
            on_tick(std::get<SchedulerTick>(e.payload).node);
            break;
        case EventKind::BlockArrival:
            on_arrival(std::get<BlockArrival>(e.payload));
            break;
        case EventKind::TrafficPhaseChange:
            on_phase(std::get<TrafficPhaseChange>(e.payload).phase);
            break;
        case EventKind::MetricSample:
            on_metric_sample();
            break;
        case EventKind::RetryTick:
            on_retry(std::get<RetryTick>(e.payload).node);
            break;
        case EventKind::FetchRequest:
            on_fetch_request(std::get<FetchRequest>(e.payload));
            break;
        case EventKind::TipAnnounce:
            on_tip_announce(std::get<TipAnnounce>(e.payload));
            break;
        case EventKind::SyncTick:
            on_sync(std::get<SyncTick>(e.payload).node);
            break;
    }
}

double Simulation::accrue_now(int account) {
    auto& acct = accounts_[static_cast<std::size_t>(account)];
    const double added = accrue_credits(acct, engine_.now(), cfg_.credit);
    if (added != 0.0) ledger_.record(account, CreditEventKind::Accrue, added);
    return added;
}

void Simulation::on_phase(int phase) {
    const auto& ph = cfg_.traffic.phases[static_cast<std::size_t>(phase)];
    const SimTime start = engine_.now();
    const double base = work_rate();
    for (int a = 0; a < cfg_.accounts.n; ++a) {
        const double rate = ph.multiplier * base * weights_[static_cast<std::size_t>(a)];
        for (SimTime t : poisson_arrivals(start, seconds(ph.duration_s), rate,
                                          traffic_rng_[static_cast<std::size_t>(a)]))
            engine_.schedule(t, BlockGenerated{a});
    }
    if (static_cast<std::size_t>(phase + 1) < cfg_.traffic.phases.size())
        engine_.schedule(start + seconds(ph.duration_s), TrafficPhaseChange{phase + 1});
}

void Simulation::on_generated(int account) {
    ++mempool_[static_cast<std::size_t>(account)];
    drain_mempool(account);
}

void Simulation::on_retry(int node) {
    if (cfg_.mode == SimMode::MultiNode) {
        drain_mempool(node);  // account colocated with node
    } else if (node == 0) {
        for (int a = 0; a < cfg_.accounts.n; ++a)
            if (mempool_[static_cast<std::size_t>(a)] > 0) drain_mempool(a);
    }
    engine_.schedule(engine_.now() + seconds(kRetryPeriodS), RetryTick{node});
}

void Simulation::drain_mempool(int account) {
    auto& pending = mempool_[static_cast<std::size_t>(account)];
    if (pending == 0) return;

    auto& acct = accounts_[static_cast<std::size_t>(account)];
    accrue_now(account);
    auto& node = *nodes_[static_cast<std::size_t>(origin_node(account))];

    while (pending > 0) {
        BidDecision d;
        switch (acct.strategy) {
            case StrategyKind::Impatient:
                d = impatient_bid(acct.credit_balance);
                break;
            case StrategyKind::Greedy:
                d = greedy_bid(acct.credit_balance, node.buffer.congestion_view(1));
                break;
            case StrategyKind::Gambler:
                d = gambler_bid(
                    acct.credit_balance,
                    node.buffer.congestion_view(
                        static_cast<std::size_t>(cfg_.strategies.gambler_top_k)),
                    account_rng_[static_cast<std::size_t>(account)]);
                break;
            case StrategyKind::Opportunistic:
                d = opportunistic_bid();
                break;
        }
        if (!d.issue) break;  // abstain: keep the payload in the mempool
        issue_block(account, d.bid);
        --pending;
    }
}

void Simulation::issue_block(int account, double bid) {
    auto& acct = accounts_[static_cast<std::size_t>(account)];
    if (!consume_credits(acct, bid))
        throw std::logic_error("issue_block: bid exceeds balance");  // strategies prevent this
    ledger_.record(account, CreditEventKind::Consume, bid);

    const int origin = origin_node(account);
    auto& node = *nodes_[static_cast<std::size_t>(origin)];

    DagBlock blk;
    blk.issuer = account;
    blk.issue_timestamp = engine_.now();
    blk.work = 1.0;
    blk.credits_consumed = bid;
    if (cfg_.mode == SimMode::MultiNode)
        blk.parents = node.view->select_tips(static_cast<std::size_t>(cfg_.dag.parents_k),
                                             engine_.now(), seconds(cfg_.dag.tip_freshness),
                                             node.tipsel);
    const std::int64_t id = store_.add(std::move(blk));
    facts_.resize(static_cast<std::size_t>(store_.size()));
    for (auto& n : nodes_) n->ensure(id);

    MetricRecord r;
    r.time = engine_.now();
    r.kind = MetricKind::Issued;
    r.block_id = id;
    r.node_id = origin;
    r.account_id = account;
    r.credits = bid;
    log_.record(std::move(r));

    local_enqueue(origin, id);
}

void Simulation::local_enqueue(int node_id, std::int64_t block) {
    auto& node = *nodes_[static_cast<std::size_t>(node_id)];
    if (node.state(block) == BState::Attached) return;  // fetch path got there first
    const SimTime now = engine_.now();

    // age out stale entries first so they never block admission
    for (const auto& e : node.buffer.expire_stale(now))
        drop_entry(node_id, e, MetricKind::DroppedStale);

    const DagBlock& blk = store_.get(block);
    BufferEntry entry;
    entry.block_id = block;
    entry.score = priority_score(blk.credits_consumed, blk.work);
    entry.arrival_time = now;
    entry.work = blk.work;
    entry.credits_consumed = blk.credits_consumed;

    const EnqueueResult res = node.buffer.enqueue(entry);
    switch (res.status) {
        case EnqueueStatus::Duplicate:
            return;
        case EnqueueStatus::Rejected: {
            if (node.state(block) != BState::Attached) node.set_state(block, BState::Dropped);
            MetricRecord r;
            r.time = now;
            r.kind = MetricKind::DroppedRejected;
            r.block_id = block;
            r.node_id = node_id;
            r.account_id = blk.issuer;
            r.credits = blk.credits_consumed;
            log_.record(std::move(r));
            note_dropped(node_id, block);
            return;
        }
        case EnqueueStatus::AcceptedReplacing:
        case EnqueueStatus::Accepted: {
            if (node.state(block) != BState::Attached) node.set_state(block, BState::Buffered);
            MetricRecord r;
            r.time = now;
            r.kind = MetricKind::Enqueued;
            r.block_id = block;
            r.node_id = node_id;
            r.account_id = blk.issuer;
            r.credits = blk.credits_consumed;
            log_.record(std::move(r));
            if (res.status == EnqueueStatus::AcceptedReplacing)
                drop_entry(node_id, res.dropped, MetricKind::DroppedFull);
            return;
        }
    }
}

void Simulation::drop_entry(int node_id, const BufferEntry& e, MetricKind reason) {
    auto& node = *nodes_[static_cast<std::size_t>(node_id)];
    if (node.state(e.block_id) == BState::Buffered) node.set_state(e.block_id, BState::Dropped);

    const DagBlock& blk = store_.get(e.block_id);
    MetricRecord r;
    r.time = engine_.now();
    r.kind = reason;
    r.block_id = e.block_id;
    r.node_id = node_id;
    r.account_id = blk.issuer;
    r.credits = e.credits_consumed;
    log_.record(std::move(r));

    note_dropped(node_id, e.block_id);
}

// A drop at the origin before the block was ever scheduled there is a
// network-wide death: gossip only starts at origin scheduling. That is the
// one decidable reimbursement trigger.
void Simulation::note_dropped(int node_id, std::int64_t block) {
    auto& f = facts_[static_cast<std::size_t>(block)];
    f.dropped_anywhere = true;

    const DagBlock& blk = store_.get(block);
    if (!cfg_.reimburse_on_drop || blk.issuer < 0) return;
    if (node_id != origin_node(blk.issuer)) return;
    if (f.scheduled_at_origin || f.reimbursed) return;

    f.reimbursed = true;
    auto& acct = accounts_[static_cast<std::size_t>(blk.issuer)];
    reimburse_credits(acct, blk.credits_consumed);
    ledger_.record(blk.issuer, CreditEventKind::Reimburse, blk.credits_consumed);
}

void Simulation::on_tick(int node_id) {
    auto& node = *nodes_[static_cast<std::size_t>(node_id)];
    const SimTime now = engine_.now();

    for (const auto& e : node.buffer.expire_stale(now))
        drop_entry(node_id, e, MetricKind::DroppedStale);

    for (const auto& e : node.buffer.next_batch(cfg_.scheduler.m)) {
        const DagBlock& blk = store_.get(e.block_id);
        MetricRecord r;
        r.time = now;
        r.kind = MetricKind::Scheduled;
        r.block_id = e.block_id;
        r.node_id = node_id;
        r.account_id = blk.issuer;
        r.credits = e.credits_consumed;
        r.sojourn_s = (now - e.arrival_time).seconds();
        log_.record(std::move(r));

        if (node_id == origin_node(blk.issuer))
            facts_[static_cast<std::size_t>(e.block_id)].scheduled_at_origin = true;

        if (cfg_.mode == SimMode::MultiNode) {
            attach_block(node_id, e.block_id, /*forward=*/true, /*fetch_target=*/-1);
        } else {
            node.set_state(e.block_id, BState::Attached);  // terminal for single-node
        }
    }

    engine_.schedule(now + seconds(cfg_.scheduler.tau), SchedulerTick{node_id});
}

void Simulation::attach_block(int node_id, std::int64_t block, bool forward, int fetch_target) {
    auto& node = *nodes_[static_cast<std::size_t>(node_id)];
    const AttachOutcome out = node.view->attach(block);

    if (out.parked) {
        if (fetch_target < 0)
            throw std::logic_error("attach_block: scheduled block missing parents");
        node.set_state(block, BState::ParkedFetch);
        for (std::int64_t p : node.view->missing_parents(block))
            maybe_fetch(node_id, p, fetch_target);
        return;
    }

    // mark everything attached before promoting waiters, so a waiter that was
    // itself attached by the cascade is not re-enqueued
    for (std::int64_t id : out.attached) {
        node.set_state(id, BState::Attached);
        note_attached(node_id, id);
    }
    for (std::int64_t id : out.attached) {
        auto w = node.gossip_waiters.find(id);
        if (w == node.gossip_waiters.end()) continue;
        const std::vector<std::int64_t> children = std::move(w->second);
        node.gossip_waiters.erase(w);
        for (std::int64_t child : children) {
            auto mc = node.gossip_missing.find(child);
            if (mc == node.gossip_missing.end()) continue;
            if (--mc->second > 0) continue;
            node.gossip_missing.erase(mc);
            local_enqueue(node_id, child);
        }
    }

    const auto newly = node.conf->update(*node.view);
    for (std::int64_t id : newly) {
        const DagBlock& blk = store_.get(id);
        if (blk.issuer < 0) continue;  // genesis never reports
        MetricRecord r;
        r.time = engine_.now();
        r.kind = MetricKind::LocallyConfirmed;
        r.block_id = id;
        r.node_id = node_id;
        r.account_id = blk.issuer;
        log_.record(std::move(r));

        auto& f = facts_[static_cast<std::size_t>(id)];
        if (++f.confirm_count == node_count() && !f.confirmed) {
            f.confirmed = true;
            MetricRecord cr;
            cr.time = engine_.now();
            cr.kind = MetricKind::Confirmed;
            cr.block_id = id;
            cr.account_id = blk.issuer;
            log_.record(std::move(cr));
        }
    }

    if (forward) forward_block(node_id, block);
}

void Simulation::note_attached(int node_id, std::int64_t block) {
    (void)node_id;
    auto& f = facts_[static_cast<std::size_t>(block)];
    const DagBlock& blk = store_.get(block);
    if (++f.attach_count == node_count() && !f.disseminated && blk.issuer >= 0) {
        f.disseminated = true;
        MetricRecord r;
        r.time = engine_.now();
        r.kind = MetricKind::Disseminated;
        r.block_id = block;
        r.account_id = blk.issuer;
        log_.record(std::move(r));
    }
}

void Simulation::forward_block(int node_id, std::int64_t block) {
    auto& node = *nodes_[static_cast<std::size_t>(node_id)];
    const auto& nbrs = topo_.adjacency[static_cast<std::size_t>(node_id)];
    const auto& dels = topo_.delays[static_cast<std::size_t>(node_id)];
    auto& mask = node.sent_mask[static_cast<std::size_t>(block)];
    const int skip = node.first_sender[static_cast<std::size_t>(block)];
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
        if (nbrs[j] == skip) continue;  // no echo to whoever delivered it
        if (mask & (1u << j)) continue;
        mask |= (1u << j);
        engine_.schedule(engine_.now() + dels[j],
                         BlockArrival{nbrs[j], block, node_id, ArrivalChannel::Gossip});
    }
}

void Simulation::maybe_fetch(int node_id, std::int64_t block, int target) {
    auto& node = *nodes_[static_cast<std::size_t>(node_id)];
    node.ensure(block);
    const BState s = node.state(block);
    if (s == BState::Attached || s == BState::ParkedFetch) return;
    if (node.fetch_requested[static_cast<std::size_t>(block)]) return;
    node.fetch_requested[static_cast<std::size_t>(block)] = 1;
    engine_.schedule(engine_.now() + topo_.delay(node_id, target),
                     FetchRequest{target, block, node_id});
}

void Simulation::on_arrival(const BlockArrival& a) {
    auto& node = *nodes_[static_cast<std::size_t>(a.node)];
    node.ensure(a.block);

    if (a.channel == ArrivalChannel::Gossip) {
        switch (node.state(a.block)) {
            case BState::Buffered:
            case BState::PendingGossip:
            case BState::ParkedFetch:
            case BState::Attached:
                return;  // already seen here
            case BState::Unknown:
            case BState::Dropped:
                break;  // admit (again)
        }
        node.first_sender[static_cast<std::size_t>(a.block)] = a.sender;

        const std::vector<std::int64_t> missing = node.view->missing_parents(a.block);
        if (missing.empty()) {
            local_enqueue(a.node, a.block);
            return;
        }
        // The sender schedules only solid blocks, so it holds the whole
        // past cone; fetch the gaps from it.
        node.set_state(a.block, BState::PendingGossip);
        node.gossip_missing[a.block] = static_cast<int>(missing.size());
        for (std::int64_t p : missing) {
            node.gossip_waiters[p].push_back(a.block);
            maybe_fetch(a.node, p, a.sender);
        }
        return;
    }

    // fetch response: attach directly, never scheduled or forwarded here
    node.fetch_requested[static_cast<std::size_t>(a.block)] = 0;
    const BState s = node.state(a.block);
    if (s == BState::Attached || s == BState::ParkedFetch) return;
    attach_block(a.node, a.block, /*forward=*/false, /*fetch_target=*/a.sender);
}

void Simulation::on_fetch_request(const FetchRequest& f) {
    auto& node = *nodes_[static_cast<std::size_t>(f.node)];
    if (node.state(f.block) != BState::Attached) return;  // defensive; see on_arrival
    engine_.schedule(engine_.now() + topo_.delay(f.node, f.requester),
                     BlockArrival{f.requester, f.block, f.node, ArrivalChannel::FetchResponse});
}

void Simulation::on_tip_announce(const TipAnnounce& t) {
    auto& node = *nodes_[static_cast<std::size_t>(t.node)];
    for (std::int64_t id : t.tips) {
        node.ensure(id);
        const BState s = node.state(id);
        if (s == BState::Unknown || s == BState::Dropped) maybe_fetch(t.node, id, t.sender);
    }
}

void Simulation::on_sync(int node_id) {
    auto& node = *nodes_[static_cast<std::size_t>(node_id)];
    const auto& tip_set = node.view->tips();
    const std::vector<std::int64_t> tips(tip_set.begin(), tip_set.end());
    const auto& nbrs = topo_.adjacency[static_cast<std::size_t>(node_id)];
    const auto& dels = topo_.delays[static_cast<std::size_t>(node_id)];
    for (std::size_t j = 0; j < nbrs.size(); ++j)
        engine_.schedule(engine_.now() + dels[j], TipAnnounce{nbrs[j], node_id, tips});
    engine_.schedule(engine_.now() + seconds(cfg_.network.sync_period), SyncTick{node_id});
}

void Simulation::on_metric_sample() {
    const double t = engine_.now().seconds();
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        occupancy_[i].emplace_back(t, static_cast<double>(nodes_[i]->buffer.size()));
    engine_.schedule(engine_.now() + seconds(kSamplePeriodS), MetricSample{});
}

nlohmann::json Simulation::summary() const {
    nlohmann::json s;
    s["scenario"] = cfg_.name;
    s["mode"] = cfg_.mode == SimMode::MultiNode ? "multi_node" : "single_node";
    s["duration_s"] = cfg_.duration;
    s["seed"] = cfg_.seed;
    s["overrides"] = cfg_.overrides;
    s["config"] = cfg_.to_json();

    nlohmann::json ev;
    for (MetricKind k :
         {MetricKind::Issued, MetricKind::Enqueued, MetricKind::Scheduled, MetricKind::DroppedFull,
          MetricKind::DroppedStale, MetricKind::DroppedRejected, MetricKind::Disseminated,
          MetricKind::LocallyConfirmed, MetricKind::Confirmed})
        ev[metric_kind_name(k)] = log_.count(k);
    s["events"] = ev;

    double accrued = 0.0, consumed = 0.0, reimbursed = 0.0;
    for (const auto& e : ledger_.events()) {
        switch (e.kind) {
            case CreditEventKind::Accrue: accrued += e.amount; break;
            case CreditEventKind::Consume: consumed += e.amount; break;
            case CreditEventKind::Reimburse: reimbursed += e.amount; break;
        }
    }
    double balance_total = 0.0;
    for (const auto& a : accounts_) balance_total += a.credit_balance;
    s["credits"] = {{"accrued", accrued},
                    {"consumed", consumed},
                    {"reimbursed", reimbursed},
                    {"final_balance_total", balance_total}};

    struct Agg {
        int accounts = 0;
        double balance = 0.0;
        std::int64_t issued = 0;
        std::int64_t scheduled = 0;
        std::int64_t dropped = 0;
        double bid_sum = 0.0;
        double sojourn_sum = 0.0;
        std::int64_t sojourn_n = 0;
    };
    Agg agg[4];
    for (const auto& a : accounts_) {
        auto& g = agg[static_cast<int>(a.strategy)];
        ++g.accounts;
        g.balance += a.credit_balance;
    }
    for (const auto& r : log_.records()) {
        if (r.account_id < 0) continue;
        auto& g = agg[static_cast<int>(accounts_[static_cast<std::size_t>(r.account_id)].strategy)];
        const bool at_origin = r.node_id == origin_node(r.account_id);
        switch (r.kind) {
            case MetricKind::Issued:
                ++g.issued;
                g.bid_sum += r.credits.value_or(0.0);
                break;
            case MetricKind::Scheduled:
                if (at_origin) {
                    ++g.scheduled;
                    if (r.sojourn_s) {
                        g.sojourn_sum += *r.sojourn_s;
                        ++g.sojourn_n;
                    }
                }
                break;
            case MetricKind::DroppedFull:
            case MetricKind::DroppedStale:
            case MetricKind::DroppedRejected:
                if (at_origin) ++g.dropped;
                break;
            default:
                break;
        }
    }
    nlohmann::json strat;
    for (StrategyKind k : {StrategyKind::Impatient, StrategyKind::Greedy, StrategyKind::Gambler,
                           StrategyKind::Opportunistic}) {
        const Agg& g = agg[static_cast<int>(k)];
        if (g.accounts == 0) continue;
        nlohmann::json j;
        j["accounts"] = g.accounts;
        j["mean_final_balance"] = g.balance / g.accounts;
        j["issued"] = g.issued;
        j["scheduled_at_origin"] = g.scheduled;
        j["dropped_at_origin"] = g.dropped;
        j["mean_bid"] = g.issued > 0 ? g.bid_sum / static_cast<double>(g.issued) : 0.0;
        j["mean_sojourn_s"] =
            g.sojourn_n > 0 ? g.sojourn_sum / static_cast<double>(g.sojourn_n) : 0.0;
        strat[strategy_name(k)] = std::move(j);
    }
    s["strategies"] = std::move(strat);

    nlohmann::json buffers = nlohmann::json::array();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        nlohmann::json b;
        b["node"] = static_cast<int>(i);
        b["final_size"] = node_buffer(static_cast<int>(i)).size();
        b["peak_size"] = node_buffer(static_cast<int>(i)).peak_size();
        buffers.push_back(std::move(b));
    }
    s["buffers"] = std::move(buffers);

    s["blocks_total"] = store_.size();
    if (cfg_.mode == SimMode::MultiNode) {
        std::int64_t confirmed_everywhere = 0;
        for (const auto& f : facts_)
            if (f.confirmed) ++confirmed_everywhere;
        s["disseminated"] = disseminated_ids().size();
        s["confirmed_everywhere"] = confirmed_everywhere;
        nlohmann::json per_node = nlohmann::json::array();
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            nlohmann::json n;
            n["node"] = static_cast<int>(i);
            n["attached"] = node_view(static_cast<int>(i)).attached_count();
            n["locally_confirmed"] = node_confirmations(static_cast<int>(i)).confirmed_count();
            per_node.push_back(std::move(n));
        }
        s["nodes"] = std::move(per_node);
    }
    return s;
}

namespace {

std::vector<double> kind_times(const MetricsLog& log, MetricKind kind) {
    std::vector<double> out;
    for (const auto& r : log.records())
        if (r.kind == kind) out.push_back(r.time.seconds());
    return out;
}

std::vector<double> kind_times_for_account(const MetricsLog& log, MetricKind kind, int account) {
    std::vector<double> out;
    for (const auto& r : log.records())
        if (r.kind == kind && r.account_id == account) out.push_back(r.time.seconds());
    return out;
}

void write_csv_file(const std::filesystem::path& path, const char* header,
                    const std::vector<std::pair<double, double>>& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    write_series_csv(out, header, series);
}

}  // namespace

void write_outputs(const Simulation& sim, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path root(out_dir);
    const fs::path series = root / "series";
    fs::create_directories(series);

    {
        std::ofstream out(root / "events.csv");
        if (!out) throw std::runtime_error("cannot open " + (root / "events.csv").string());
        sim.log().write_events_csv(out);
    }
    {
        std::ofstream out(root / "summary.json");
        if (!out) throw std::runtime_error("cannot open " + (root / "summary.json").string());
        out << sim.summary().dump(2) << '\n';
    }

    const double dur = sim.config().duration;
    const double w = 10.0;

    write_csv_file(series / "traffic_load.csv", "time,blocks_per_s",
                   windowed_rate(kind_times(sim.log(), MetricKind::Issued), w, 0.0, dur));

    std::vector<std::pair<double, double>> bids;
    std::vector<std::pair<double, double>> sojourns;
    for (const auto& r : sim.log().records()) {
        if (r.kind == MetricKind::Issued && r.credits)
            bids.emplace_back(r.time.seconds(), *r.credits);
        if (r.kind == MetricKind::Scheduled && r.sojourn_s && r.account_id >= 0 &&
            r.node_id == (sim.config().mode == SimMode::MultiNode ? r.account_id : 0))
            sojourns.emplace_back(r.time.seconds(), *r.sojourn_s);
    }
    write_csv_file(series / "credits_ma.csv", "time,mean_bid", moving_average(bids, w));
    write_csv_file(series / "sojourn_ma.csv", "time,mean_sojourn_s", moving_average(sojourns, w));

    for (int i = 0; i < sim.node_count(); ++i)
        write_csv_file(series / ("buffer_occupancy_node_" + std::to_string(i) + ".csv"),
                       "time,entries", sim.occupancy()[static_cast<std::size_t>(i)]);

    if (sim.config().mode != SimMode::MultiNode) return;

    write_csv_file(series / "dissemination_rate.csv", "time,blocks_per_s",
                   windowed_rate(kind_times(sim.log(), MetricKind::Disseminated), w, 0.0, dur));
    write_csv_file(series / "confirmation_rate.csv", "time,blocks_per_s",
                   windowed_rate(kind_times(sim.log(), MetricKind::Confirmed), w, 0.0, dur));

    std::vector<double> latencies;
    for (const auto& r : sim.log().records())
        if (r.kind == MetricKind::Disseminated && r.block_id >= 0)
            latencies.push_back(
                (r.time - sim.blocks().get(r.block_id).issue_timestamp).seconds());
    write_csv_file(series / "latency_cdf.csv", "latency_s,fraction",
                   latency_cdf(std::move(latencies)));

    // scaled rate: observed rate over the account's fair share of scheduler
    // throughput (scheduling rate weighted by token holdings)
    double total_tokens = 0.0;
    for (const auto& a : sim.accounts()) total_tokens += a.tokens;
    const double sched_rate = sim.config().scheduler.m / sim.config().scheduler.tau;
    for (int i = 0; i < sim.node_count(); ++i) {
        const double fair_share =
            sched_rate * sim.accounts()[static_cast<std::size_t>(i)].tokens / total_tokens;
        write_csv_file(
            series / ("scaled_dissemination_rate_node_" + std::to_string(i) + ".csv"),
            "time,scaled_rate",
            windowed_rate(kind_times_for_account(sim.log(), MetricKind::Disseminated, i), w, 0.0,
                          dur, 1.0, fair_share));
        write_csv_file(
            series / ("scaled_confirmation_rate_node_" + std::to_string(i) + ".csv"),
            "time,scaled_rate",
            windowed_rate(kind_times_for_account(sim.log(), MetricKind::Confirmed, i), w, 0.0,
                          dur, 1.0, fair_share));
    }
}

int run_to_directory(const ScenarioConfig& cfg, const std::string& out_dir) {
    try {
        Simulation sim(cfg);
        sim.run();
        write_outputs(sim, out_dir);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

}  // namespace dagsim
