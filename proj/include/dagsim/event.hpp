#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <variant>
#include <vector>

#include "dagsim/sim_time.hpp"

namespace dagsim {

// Event payloads. The variant index doubles as the event kind.

struct BlockGenerated {
    int account;
};

struct SchedulerTick {
    int node;
};

enum class ArrivalChannel { Gossip, FetchResponse };

struct BlockArrival {
    int node;
    std::int64_t block;
    int sender;
    ArrivalChannel channel;
};

struct TrafficPhaseChange {
    int phase;
};

struct MetricSample {};

struct RetryTick {
    int node;
};

struct FetchRequest {
    int node;
    std::int64_t block;
    int requester;
};

struct TipAnnounce {
    int node;
    int sender;
    std::vector<std::int64_t> tips;
};

struct SyncTick {
    int node;
};

using EventPayload = std::variant<BlockGenerated, SchedulerTick, BlockArrival, TrafficPhaseChange,
                                  MetricSample, RetryTick, FetchRequest, TipAnnounce, SyncTick>;

enum class EventKind {
    BlockGenerated,
    SchedulerTick,
    BlockArrival,
    TrafficPhaseChange,
    MetricSample,
    RetryTick,
    FetchRequest,
    TipAnnounce,
    SyncTick,
};

struct Event {
    SimTime fire_at;
    std::uint64_t sequence;  // ties on fire_at resolve by insertion order
    EventPayload payload;

    EventKind kind() const { return static_cast<EventKind>(payload.index()); }
};

// Future-event queue with a virtual clock. Events fire in (time, sequence)
// order; handlers may schedule further events at or after the current time.
class Engine {
public:
    SimTime now() const { return clock_; }

    void schedule(SimTime at, EventPayload payload) {
        if (at < clock_) throw std::logic_error("schedule: event time precedes the clock");
        queue_.push(Event{at, next_seq_++, std::move(payload)});
    }

    std::size_t pending() const { return queue_.size(); }

    // Processes every event with fire_at <= end. The clock finishes at end
    // even if the queue empties early.
    template <typename Handler>
    void run_until(SimTime end, Handler&& handle) {
        if (end < clock_) throw std::logic_error("run_until: target precedes the clock");
        while (!queue_.empty() && queue_.top().fire_at <= end) {
            Event e = queue_.top();
            queue_.pop();
            clock_ = e.fire_at;
            handle(e);
        }
        clock_ = end;
    }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_at.us != b.fire_at.us) return a.fire_at.us > b.fire_at.us;
            return a.sequence > b.sequence;
        }
    };

    SimTime clock_{};
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace dagsim
