#pragma once

#include <cstdint>
#include <set>
#include <unordered_map>
#include <vector>

#include "dagsim/rng.hpp"
#include "dagsim/sim_time.hpp"

namespace dagsim {

struct DagBlock {
    std::int64_t id = -1;
    int issuer = -1;  // -1 for genesis
    std::vector<std::int64_t> parents;
    SimTime issue_timestamp{};
    double work = 1.0;
    double credits_consumed = 0.0;
};

// Immutable pool of all blocks ever issued in a run, shared by every node's
// view. Ids are dense indexes into the pool.
class BlockStore {
public:
    std::int64_t add(DagBlock b);
    const DagBlock& get(std::int64_t id) const;
    std::int64_t size() const { return static_cast<std::int64_t>(blocks_.size()); }

private:
    std::vector<DagBlock> blocks_;
};

struct AttachOutcome {
    std::vector<std::int64_t> attached;  // newly attached, in attach order
    bool parked = false;                 // true when the block awaits parents
};

// One node's local copy of the ledger DAG: which blocks are attached, their
// cumulative weights, and the current tips. A block whose parents are not
// all attached parks until they are, then attaches and may cascade.
class DagView {
public:
    explicit DagView(const BlockStore* store, std::int64_t expected_capacity = 0);

    bool is_attached(std::int64_t id) const;
    bool is_parked(std::int64_t id) const;

    std::vector<std::int64_t> missing_parents(std::int64_t id) const;

    // Attaches id if its parents are attached, else parks it. Attaching adds
    // one unit of cumulative weight to every block in the past cone and may
    // release parked descendants.
    AttachOutcome attach(std::int64_t id);

    std::int64_t cumulative_weight(std::int64_t id) const;

    const std::set<std::int64_t>& tips() const { return tips_; }

    // Up to k distinct tips no older than `freshness`, drawn uniformly
    // without replacement. Falls back to the newest attached block when no
    // tip is fresh; the result is never empty on a non-empty view.
    std::vector<std::int64_t> select_tips(std::size_t k, SimTime now, SimTime freshness,
                                          RngStream& rng) const;

    std::size_t attached_count() const { return attached_ids_.size(); }
    const std::vector<std::int64_t>& attached_ids() const { return attached_ids_; }

    // Ids whose cumulative weight changed since the last call (plus fresh
    // attachments), each reported once, sorted.
    std::vector<std::int64_t> take_weight_updates();

private:
    enum class State : std::uint8_t { Unknown, Parked, Attached };

    void ensure_size(std::int64_t id) const;
    void mark_dirty(std::int64_t id);

    const BlockStore* store_;
    mutable std::vector<State> state_;
    mutable std::vector<std::int64_t> cw_;
    std::vector<std::int64_t> attached_ids_;  // in attach order
    std::set<std::int64_t> tips_;
    std::int64_t newest_ = -1;  // newest attached, by (timestamp, id)

    // parked bookkeeping
    std::unordered_map<std::int64_t, int> missing_count_;
    std::unordered_map<std::int64_t, std::vector<std::int64_t>> waiters_;

    // weight-change reporting
    std::vector<std::int64_t> dirty_;
    mutable std::vector<std::uint8_t> dirty_flag_;

    // scratch for past-cone walks
    mutable std::vector<std::uint64_t> visit_mark_;
    mutable std::uint64_t visit_epoch_ = 0;
    mutable std::vector<std::int64_t> walk_stack_;
};

// Tracks which attached blocks crossed the confirmation threshold.
class ConfirmationState {
public:
    explicit ConfirmationState(std::int64_t threshold);

    // Consumes the view's pending weight updates; returns newly confirmed
    // ids, sorted.
    std::vector<std::int64_t> update(DagView& view);

    bool is_confirmed(std::int64_t id) const;
    std::size_t confirmed_count() const { return count_; }
    std::int64_t threshold() const { return threshold_; }

private:
    std::int64_t threshold_;
    std::vector<std::uint8_t> flags_;
    std::size_t count_ = 0;
};

}  // namespace dagsim
