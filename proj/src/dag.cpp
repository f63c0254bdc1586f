#include "dagsim/dag.hpp"

#include <algorithm>
#include <stdexcept>

namespace dagsim {

std::int64_t BlockStore::add(DagBlock b) {
    const std::int64_t id = size();
    b.id = id;
    for (std::int64_t p : b.parents) {
        // Parents must already exist, which also rules out self-reference
        // and cycles: ids grow monotonically with issuance.
        if (p < 0 || p >= id) throw std::logic_error("BlockStore::add: parent id out of range");
    }
    blocks_.push_back(std::move(b));
    return id;
}

const DagBlock& BlockStore::get(std::int64_t id) const {
    if (id < 0 || id >= size()) throw std::out_of_range("BlockStore::get: unknown id");
    return blocks_[static_cast<std::size_t>(id)];
}

DagView::DagView(const BlockStore* store, std::int64_t expected_capacity) : store_(store) {
    if (!store_) throw std::invalid_argument("DagView: null store");
    if (expected_capacity > 0) {
        const auto cap = static_cast<std::size_t>(expected_capacity);
        state_.reserve(cap);
        cw_.reserve(cap);
        dirty_flag_.reserve(cap);
        visit_mark_.reserve(cap);
    }
}

void DagView::ensure_size(std::int64_t id) const {
    if (id < 0 || id >= store_->size())
        throw std::out_of_range("DagView: id not in block store");
    const auto need = static_cast<std::size_t>(id) + 1;
    if (state_.size() < need) {
        state_.resize(need, State::Unknown);
        cw_.resize(need, 0);
        dirty_flag_.resize(need, 0);
        visit_mark_.resize(need, 0);
    }
}

bool DagView::is_attached(std::int64_t id) const {
    if (id < 0 || id >= static_cast<std::int64_t>(state_.size())) return false;
    return state_[static_cast<std::size_t>(id)] == State::Attached;
}

bool DagView::is_parked(std::int64_t id) const {
    if (id < 0 || id >= static_cast<std::int64_t>(state_.size())) return false;
    return state_[static_cast<std::size_t>(id)] == State::Parked;
}

std::vector<std::int64_t> DagView::missing_parents(std::int64_t id) const {
    ensure_size(id);
    std::vector<std::int64_t> missing;
    for (std::int64_t p : store_->get(id).parents)
        if (!is_attached(p)) missing.push_back(p);
    return missing;
}

void DagView::mark_dirty(std::int64_t id) {
    auto& flag = dirty_flag_[static_cast<std::size_t>(id)];
    if (!flag) {
        flag = 1;
        dirty_.push_back(id);
    }
}

AttachOutcome DagView::attach(std::int64_t id) {
    ensure_size(id);
    AttachOutcome out;

    const State s = state_[static_cast<std::size_t>(id)];
    if (s == State::Attached || s == State::Parked) return out;  // duplicate: no-op

    std::vector<std::int64_t> missing = missing_parents(id);
    if (!missing.empty()) {
        state_[static_cast<std::size_t>(id)] = State::Parked;
        missing_count_[id] = static_cast<int>(missing.size());
        for (std::int64_t p : missing) waiters_[p].push_back(id);
        out.parked = true;
        return out;
    }

    // Attach id, then cascade over parked blocks it releases.
    std::vector<std::int64_t> ready{id};
    while (!ready.empty()) {
        const std::int64_t b = ready.front();
        ready.erase(ready.begin());

        state_[static_cast<std::size_t>(b)] = State::Attached;
        attached_ids_.push_back(b);
        out.attached.push_back(b);
        tips_.insert(b);
        mark_dirty(b);

        const DagBlock& blk = store_->get(b);
        if (newest_ < 0) {
            newest_ = b;
        } else {
            const DagBlock& cur = store_->get(newest_);
            if (blk.issue_timestamp > cur.issue_timestamp ||
                (blk.issue_timestamp == cur.issue_timestamp && b > newest_))
                newest_ = b;
        }

        for (std::int64_t p : blk.parents) tips_.erase(p);

        // One new unit of weight lands on every block in b's past cone.
        if (!blk.parents.empty()) {
            ++visit_epoch_;
            walk_stack_.assign(blk.parents.begin(), blk.parents.end());
            while (!walk_stack_.empty()) {
                const std::int64_t v = walk_stack_.back();
                walk_stack_.pop_back();
                auto& mark = visit_mark_[static_cast<std::size_t>(v)];
                if (mark == visit_epoch_) continue;
                mark = visit_epoch_;
                ++cw_[static_cast<std::size_t>(v)];
                mark_dirty(v);
                const DagBlock& pv = store_->get(v);
                walk_stack_.insert(walk_stack_.end(), pv.parents.begin(), pv.parents.end());
            }
        }

        // Release parked children whose last missing parent was b.
        auto w = waiters_.find(b);
        if (w != waiters_.end()) {
            for (std::int64_t child : w->second) {
                auto mc = missing_count_.find(child);
                if (mc == missing_count_.end()) continue;
                if (--mc->second == 0) {
                    missing_count_.erase(mc);
                    ready.push_back(child);
                }
            }
            waiters_.erase(w);
        }
    }
    return out;
}

std::int64_t DagView::cumulative_weight(std::int64_t id) const {
    if (!is_attached(id)) throw std::out_of_range("cumulative_weight: block not attached");
    return cw_[static_cast<std::size_t>(id)];
}

std::vector<std::int64_t> DagView::select_tips(std::size_t k, SimTime now, SimTime freshness,
                                               RngStream& rng) const {
    if (attached_ids_.empty()) throw std::logic_error("select_tips: empty view");

    std::vector<std::int64_t> fresh;
    fresh.reserve(tips_.size());
    for (std::int64_t t : tips_)
        if (now - store_->get(t).issue_timestamp <= freshness) fresh.push_back(t);

    if (fresh.empty()) return {newest_};

    if (fresh.size() <= k) return fresh;

    // Partial Fisher-Yates: uniform without replacement.
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t pick = j + static_cast<std::size_t>(
                                         rng.uniform_index(fresh.size() - j));
        std::swap(fresh[j], fresh[pick]);
    }
    fresh.resize(k);
    return fresh;
}

std::vector<std::int64_t> DagView::take_weight_updates() {
    std::vector<std::int64_t> out;
    out.swap(dirty_);
    for (std::int64_t id : out) dirty_flag_[static_cast<std::size_t>(id)] = 0;
    std::sort(out.begin(), out.end());
    return out;
}

ConfirmationState::ConfirmationState(std::int64_t threshold) : threshold_(threshold) {
    if (threshold < 1)
        throw std::invalid_argument("ConfirmationState: threshold must be >= 1");
}

std::vector<std::int64_t> ConfirmationState::update(DagView& view) {
    std::vector<std::int64_t> newly;
    for (std::int64_t id : view.take_weight_updates()) {
        const auto i = static_cast<std::size_t>(id);
        if (flags_.size() <= i) flags_.resize(i + 1, 0);
        if (flags_[i]) continue;
        if (view.cumulative_weight(id) >= threshold_) {
            flags_[i] = 1;
            ++count_;
            newly.push_back(id);
        }
    }
    return newly;
}

bool ConfirmationState::is_confirmed(std::int64_t id) const {
    const auto i = static_cast<std::size_t>(id);
    return i < flags_.size() && flags_[i] != 0;
}

}  // namespace dagsim
