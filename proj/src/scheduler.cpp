#include "dagsim/scheduler.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace dagsim {

double priority_score(double credits, double work) {
    if (work <= 0.0) throw std::invalid_argument("priority_score: work must be positive");
    if (credits < 0.0) throw std::invalid_argument("priority_score: credits must be >= 0");
    return credits / work;
}

bool ranks_above(const BufferEntry& a, const BufferEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.arrival_time != b.arrival_time) return a.arrival_time < b.arrival_time;
    return a.block_id < b.block_id;
}

bool SchedulerBuffer::BestFirst::operator()(const BufferEntry& a, const BufferEntry& b) const {
    return ranks_above(a, b);
}

SchedulerBuffer::SchedulerBuffer(std::size_t capacity, SimTime max_age)
    : capacity_(capacity), max_age_(max_age) {
    if (capacity == 0) throw std::invalid_argument("SchedulerBuffer: capacity must be positive");
}

EnqueueResult SchedulerBuffer::enqueue(const BufferEntry& e) {
    if (index_.count(e.block_id)) return {EnqueueStatus::Duplicate, {}};

    if (entries_.size() < capacity_) {
        auto [it, ok] = entries_.insert(e);
        (void)ok;
        index_.emplace(e.block_id, it);
        peak_ = std::max(peak_, entries_.size());
        return {EnqueueStatus::Accepted, {}};
    }

    // Full: the newcomer must outrank the worst entry to displace it.
    auto worst = std::prev(entries_.end());
    if (!ranks_above(e, *worst)) return {EnqueueStatus::Rejected, {}};

    const BufferEntry victim = *worst;
    index_.erase(victim.block_id);
    entries_.erase(worst);
    auto [it, ok] = entries_.insert(e);
    (void)ok;
    index_.emplace(e.block_id, it);
    return {EnqueueStatus::AcceptedReplacing, victim};
}

std::vector<BufferEntry> SchedulerBuffer::expire_stale(SimTime now) {
    std::vector<BufferEntry> dropped;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (now - it->arrival_time > max_age_) {
            dropped.push_back(*it);
            index_.erase(it->block_id);
            it = entries_.erase(it);
        } else {
            ++it;
        }
    }
    return dropped;
}

std::vector<BufferEntry> SchedulerBuffer::next_batch(double work_budget) {
    if (work_budget <= 0.0)
        throw std::invalid_argument("next_batch: work budget must be positive");
    std::vector<BufferEntry> batch;
    double used = 0.0;
    while (!entries_.empty()) {
        const BufferEntry& head = *entries_.begin();
        if (used + head.work > work_budget) break;  // head does not fit; stop, no skipping
        used += head.work;
        batch.push_back(head);
        index_.erase(head.block_id);
        entries_.erase(entries_.begin());
    }
    return batch;
}

std::vector<double> SchedulerBuffer::congestion_view(std::size_t k) const {
    if (k == 0) throw std::invalid_argument("congestion_view: k must be >= 1");
    std::vector<double> credits;
    credits.reserve(entries_.size());
    for (const auto& e : entries_) credits.push_back(e.credits_consumed);
    if (k == 1) {
        // hot path: issuers probing the single highest bid
        if (credits.empty()) return credits;
        return {*std::max_element(credits.begin(), credits.end())};
    }
    if (credits.size() > k) {
        std::nth_element(credits.begin(), credits.begin() + static_cast<std::ptrdiff_t>(k),
                         credits.end(), std::greater<double>());
        credits.resize(k);
    }
    std::sort(credits.begin(), credits.end(), std::greater<double>());
    return credits;
}

const BufferEntry* SchedulerBuffer::lowest_ranked() const {
    if (entries_.empty()) return nullptr;
    return &*std::prev(entries_.end());
}

}  // namespace dagsim
