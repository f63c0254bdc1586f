#pragma once

#include <cstdint>
#include <set>
#include <unordered_map>
#include <vector>

#include "dagsim/sim_time.hpp"

namespace dagsim {

// Priority of a buffered block: credits consumed per unit of work.
double priority_score(double credits, double work);

struct BufferEntry {
    std::int64_t block_id = 0;
    double score = 0.0;
    SimTime arrival_time{};
    double work = 1.0;
    double credits_consumed = 0.0;
};

// True when a outranks b: higher score first, then earlier arrival, then
// smaller id.
bool ranks_above(const BufferEntry& a, const BufferEntry& b);

enum class EnqueueStatus { Accepted, AcceptedReplacing, Rejected, Duplicate };

struct EnqueueResult {
    EnqueueStatus status = EnqueueStatus::Rejected;
    BufferEntry dropped;  // the displaced entry when status == AcceptedReplacing
};

// Bounded priority buffer. When full, a newcomer that outranks the lowest
// entry replaces it; otherwise the newcomer is rejected. Entries older than
// max_age are expired by the caller before each enqueue and service pass.
class SchedulerBuffer {
public:
    SchedulerBuffer(std::size_t capacity, SimTime max_age);

    EnqueueResult enqueue(const BufferEntry& e);

    // Removes every entry with now - arrival_time > max_age; returns them.
    std::vector<BufferEntry> expire_stale(SimTime now);

    // Removes the best-ranked entries whose work fits the budget, in rank
    // order, stopping at the first entry that does not fit.
    std::vector<BufferEntry> next_batch(double work_budget);

    // Top-k credits_consumed of buffered blocks, descending.
    std::vector<double> congestion_view(std::size_t k) const;

    bool contains(std::int64_t block_id) const { return index_.count(block_id) != 0; }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    SimTime max_age() const { return max_age_; }
    std::size_t peak_size() const { return peak_; }

    // Worst-ranked entry, or nullptr when empty.
    const BufferEntry* lowest_ranked() const;

private:
    struct BestFirst {
        bool operator()(const BufferEntry& a, const BufferEntry& b) const;
    };

    std::size_t capacity_;
    SimTime max_age_;
    std::set<BufferEntry, BestFirst> entries_;
    std::unordered_map<std::int64_t, std::set<BufferEntry, BestFirst>::iterator> index_;
    std::size_t peak_ = 0;
};

}  // namespace dagsim
