#include "doctest.h"

#include <algorithm>
#include <vector>

#include "dagsim/rng.hpp"
#include "dagsim/scheduler.hpp"

using namespace dagsim;

namespace {

BufferEntry entry(std::int64_t id, double credits, double arrival_s = 0.0, double work = 1.0) {
    BufferEntry e;
    e.block_id = id;
    e.score = priority_score(credits, work);
    e.arrival_time = seconds(arrival_s);
    e.work = work;
    e.credits_consumed = credits;
    return e;
}

// Mirror of the buffer's ordering for the sort oracle.
bool outranks(const BufferEntry& a, const BufferEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.arrival_time != b.arrival_time) return a.arrival_time < b.arrival_time;
    return a.block_id < b.block_id;
}

}  // namespace

TEST_CASE("priority score is credits per work unit") {
    CHECK(priority_score(30.0, 1.0) == doctest::Approx(30.0));
    CHECK(priority_score(0.0, 5.0) == 0.0);
    CHECK(priority_score(150.0, 3.0) == doctest::Approx(50.0));
    CHECK_THROWS(priority_score(1.0, 0.0));
    CHECK_THROWS(priority_score(1.0, -2.0));
}

TEST_CASE("ranking is by score, then arrival, then id") {
    CHECK(ranks_above(entry(1, 5.0), entry(2, 3.0)));
    CHECK_FALSE(ranks_above(entry(1, 3.0), entry(2, 5.0)));
    CHECK(ranks_above(entry(1, 5.0, 1.0), entry(2, 5.0, 2.0)));
    CHECK(ranks_above(entry(1, 5.0, 1.0), entry(2, 5.0, 1.0)));
    CHECK_FALSE(ranks_above(entry(2, 5.0, 1.0), entry(1, 5.0, 1.0)));
}

TEST_CASE("enqueue accepts, replaces the minimum, or rejects") {
    SchedulerBuffer buf(2, seconds(30.0));
    CHECK(buf.enqueue(entry(1, 5.0)).status == EnqueueStatus::Accepted);
    CHECK(buf.enqueue(entry(2, 3.0)).status == EnqueueStatus::Accepted);
    REQUIRE(buf.size() == 2);

    SUBCASE("a middle score replaces the minimum") {
        const auto res = buf.enqueue(entry(3, 4.0));
        CHECK(res.status == EnqueueStatus::AcceptedReplacing);
        CHECK(res.dropped.block_id == 2);
        CHECK(buf.size() == 2);
        CHECK(buf.contains(1));
        CHECK(buf.contains(3));
    }
    SUBCASE("a low score is rejected") {
        CHECK(buf.enqueue(entry(3, 2.0)).status == EnqueueStatus::Rejected);
        CHECK(buf.size() == 2);
        CHECK_FALSE(buf.contains(3));
    }
    SUBCASE("an equal score is rejected, FIFO favors the incumbent") {
        CHECK(buf.enqueue(entry(3, 3.0, 1.0)).status == EnqueueStatus::Rejected);
    }
    SUBCASE("duplicates are flagged") {
        CHECK(buf.enqueue(entry(1, 9.0)).status == EnqueueStatus::Duplicate);
        CHECK(buf.size() == 2);
    }
}

TEST_CASE("a buffer below capacity accepts anything") {
    SchedulerBuffer buf(500, seconds(30.0));
    for (int i = 0; i < 499; ++i)
        REQUIRE(buf.enqueue(entry(i, 100.0 + i)).status == EnqueueStatus::Accepted);
    CHECK(buf.enqueue(entry(999, 0.0)).status == EnqueueStatus::Accepted);
    CHECK(buf.size() == 500);
}

TEST_CASE("stale expiry is strict on the age boundary") {
    SchedulerBuffer buf(10, seconds(30.0));
    REQUIRE(buf.enqueue(entry(1, 5.0, 0.0)).status == EnqueueStatus::Accepted);

    CHECK(buf.expire_stale(seconds(30.0)).empty());
    CHECK(buf.contains(1));

    const auto dropped = buf.expire_stale(seconds(30.001));
    REQUIRE(dropped.size() == 1);
    CHECK(dropped[0].block_id == 1);
    CHECK(buf.size() == 0);
    CHECK(buf.expire_stale(seconds(100.0)).empty());
}

TEST_CASE("next_batch takes the best entries within the work budget") {
    SchedulerBuffer buf(10, seconds(30.0));
    REQUIRE(buf.enqueue(entry(1, 10.0)).status == EnqueueStatus::Accepted);
    REQUIRE(buf.enqueue(entry(2, 8.0)).status == EnqueueStatus::Accepted);
    REQUIRE(buf.enqueue(entry(3, 2.0)).status == EnqueueStatus::Accepted);

    const auto batch = buf.next_batch(2.0);
    REQUIRE(batch.size() == 2);
    CHECK(batch[0].block_id == 1);
    CHECK(batch[1].block_id == 2);
    CHECK(buf.size() == 1);
    CHECK(buf.contains(3));

    SUBCASE("a too-large head blocks the tick") {
        SchedulerBuffer b2(10, seconds(30.0));
        REQUIRE(b2.enqueue(entry(7, 10.0, 0.0, 3.0)).status == EnqueueStatus::Accepted);
        CHECK(b2.next_batch(2.0).empty());
        CHECK(b2.size() == 1);
    }
    SUBCASE("empty buffer yields an empty batch") {
        SchedulerBuffer b3(4, seconds(30.0));
        CHECK(b3.next_batch(1.0).empty());
    }
    SUBCASE("the budget must be positive") {
        CHECK_THROWS(buf.next_batch(0.0));
    }
}

TEST_CASE("congestion view lists top credit amounts, descending") {
    SchedulerBuffer buf(10, seconds(30.0));
    REQUIRE(buf.enqueue(entry(1, 20.0)).status == EnqueueStatus::Accepted);
    REQUIRE(buf.enqueue(entry(2, 30.0)).status == EnqueueStatus::Accepted);
    REQUIRE(buf.enqueue(entry(3, 10.0)).status == EnqueueStatus::Accepted);

    CHECK(buf.congestion_view(2) == std::vector<double>{30.0, 20.0});
    CHECK(buf.congestion_view(1) == std::vector<double>{30.0});
    CHECK(buf.congestion_view(20) == std::vector<double>{30.0, 20.0, 10.0});
    SchedulerBuffer empty(4, seconds(30.0));
    CHECK(empty.congestion_view(20).empty());
}

TEST_CASE("random operation sequences match a naive reference buffer") {
    RngStream rng(1234, "sched-prop");
    for (int round = 0; round < 20; ++round) {
        const std::size_t capacity = 1 + rng.uniform_index(40);
        SchedulerBuffer buf(capacity, seconds(30.0));
        std::vector<BufferEntry> ref;  // unsorted mirror
        double now = 0.0;
        std::int64_t next_id = 0;

        for (int step = 0; step < 400; ++step) {
            now += rng.uniform01();
            const auto op = rng.uniform_index(10);
            if (op < 6) {  // enqueue
                const auto e = entry(next_id++, rng.uniform(0.0, 50.0), now);
                const auto res = buf.enqueue(e);
                if (ref.size() < capacity) {
                    REQUIRE(res.status == EnqueueStatus::Accepted);
                    ref.push_back(e);
                } else {
                    auto worst = ref.begin();
                    for (auto it = ref.begin(); it != ref.end(); ++it)
                        if (outranks(*worst, *it)) worst = it;
                    if (outranks(e, *worst)) {
                        REQUIRE(res.status == EnqueueStatus::AcceptedReplacing);
                        REQUIRE(res.dropped.block_id == worst->block_id);
                        *worst = e;
                    } else {
                        REQUIRE(res.status == EnqueueStatus::Rejected);
                    }
                }
            } else if (op < 8) {  // expire
                const auto dropped = buf.expire_stale(seconds(now));
                std::vector<std::int64_t> expect;
                for (const auto& e : ref)
                    if (seconds(now) - e.arrival_time > seconds(30.0)) expect.push_back(e.block_id);
                std::vector<std::int64_t> got;
                for (const auto& e : dropped) got.push_back(e.block_id);
                std::sort(expect.begin(), expect.end());
                std::sort(got.begin(), got.end());
                REQUIRE(got == expect);
                std::erase_if(ref, [&](const BufferEntry& e) {
                    return seconds(now) - e.arrival_time > seconds(30.0);
                });
            } else {  // schedule a batch
                const double budget = 1.0 + static_cast<double>(rng.uniform_index(3));
                const auto batch = buf.next_batch(budget);
                std::sort(ref.begin(), ref.end(), outranks);
                double used = 0.0;
                std::size_t i = 0;
                for (; i < ref.size(); ++i) {
                    if (used + ref[i].work > budget) break;
                    used += ref[i].work;
                    REQUIRE(i < batch.size());
                    REQUIRE(batch[i].block_id == ref[i].block_id);
                }
                REQUIRE(batch.size() == i);
                ref.erase(ref.begin(), ref.begin() + static_cast<std::ptrdiff_t>(i));
            }
            REQUIRE(buf.size() == ref.size());
            REQUIRE(buf.size() <= capacity);
        }
    }
}
