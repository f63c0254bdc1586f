#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "dagsim/dag.hpp"
#include "dagsim/rng.hpp"

using namespace dagsim;

namespace {

std::int64_t add_block(BlockStore& store, std::vector<std::int64_t> parents, double ts = 0.0,
                       int issuer = 0) {
    DagBlock b;
    b.issuer = issuer;
    b.parents = std::move(parents);
    b.issue_timestamp = seconds(ts);
    return store.add(std::move(b));
}

// From-scratch cumulative weight: count attached blocks whose past cone
// contains id.
std::int64_t brute_cw(const BlockStore& store, const DagView& view, std::int64_t id) {
    std::int64_t cw = 0;
    for (std::int64_t b : view.attached_ids()) {
        if (b == id) continue;
        std::set<std::int64_t> seen;
        std::vector<std::int64_t> stack{b};
        bool reaches = false;
        while (!stack.empty() && !reaches) {
            const auto cur = stack.back();
            stack.pop_back();
            for (std::int64_t p : store.get(cur).parents) {
                if (p == id) reaches = true;
                if (seen.insert(p).second) stack.push_back(p);
            }
        }
        if (reaches) ++cw;
    }
    return cw;
}

}  // namespace

TEST_CASE("chain attachment counts ancestors") {
    BlockStore store;
    const auto genesis = add_block(store, {}, 0.0, -1);
    const auto a = add_block(store, {genesis}, 1.0);
    const auto b = add_block(store, {a}, 2.0);

    DagView view(&store);
    view.attach(genesis);
    view.attach(a);
    view.attach(b);

    CHECK(view.cumulative_weight(b) == 0);
    CHECK(view.cumulative_weight(a) == 1);
    CHECK(view.cumulative_weight(genesis) == 2);
    CHECK(view.tips() == std::set<std::int64_t>{b});
}

TEST_CASE("diamond counts each descendant once") {
    BlockStore store;
    const auto g = add_block(store, {}, 0.0, -1);
    const auto a = add_block(store, {g}, 1.0);
    const auto b = add_block(store, {g}, 1.0);
    const auto c = add_block(store, {a, b}, 2.0);

    DagView view(&store);
    for (auto id : {g, a, b, c}) view.attach(id);

    CHECK(view.cumulative_weight(g) == 3);  // a, b, and c once despite two paths
    CHECK(view.cumulative_weight(a) == 1);
    CHECK(view.cumulative_weight(b) == 1);
    CHECK(view.tips() == std::set<std::int64_t>{c});
}

TEST_CASE("a block with a missing parent parks until the parent attaches") {
    BlockStore store;
    const auto g = add_block(store, {}, 0.0, -1);
    const auto a = add_block(store, {g}, 1.0);
    const auto b = add_block(store, {a}, 2.0);

    DagView view(&store);
    view.attach(g);

    const auto parked = view.attach(b);
    CHECK(parked.parked);
    CHECK(parked.attached.empty());
    CHECK(view.is_parked(b));
    CHECK_FALSE(view.is_attached(b));
    CHECK(view.missing_parents(b) == std::vector<std::int64_t>{a});

    const auto out = view.attach(a);
    CHECK_FALSE(out.parked);
    CHECK(out.attached == std::vector<std::int64_t>{a, b});
    CHECK(view.is_attached(b));
    CHECK(view.cumulative_weight(g) == 2);
    CHECK(view.cumulative_weight(a) == 1);

    SUBCASE("duplicate attach is a no-op") {
        const auto dup = view.attach(b);
        CHECK_FALSE(dup.parked);
        CHECK(dup.attached.empty());
        CHECK(view.cumulative_weight(g) == 2);
    }
}

TEST_CASE("random DAGs under random arrival orders match the brute-force oracle") {
    RngStream rng(99, "dag-prop");
    for (int round = 0; round < 10; ++round) {
        BlockStore store;
        const auto g = add_block(store, {}, 0.0, -1);
        const int n = 20 + static_cast<int>(rng.uniform_index(180));
        for (int i = 1; i <= n; ++i) {
            const std::size_t k = 1 + rng.uniform_index(2);
            std::set<std::int64_t> parents;
            for (std::size_t j = 0; j < k; ++j)
                parents.insert(static_cast<std::int64_t>(rng.uniform_index(static_cast<std::size_t>(i))));
            add_block(store, {parents.begin(), parents.end()}, i);
        }

        // attach in a random permutation; parking must sort it out
        std::vector<std::int64_t> order;
        for (std::int64_t i = 0; i <= n; ++i) order.push_back(i);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_index(i)]);

        DagView view(&store);
        for (auto id : order) view.attach(id);

        REQUIRE(view.attached_count() == static_cast<std::size_t>(n + 1));
        for (std::int64_t id = 0; id <= n; ++id)
            REQUIRE(view.cumulative_weight(id) == brute_cw(store, view, id));

        // tips = attached blocks no attached block lists as parent
        std::set<std::int64_t> expect_tips;
        for (std::int64_t id = 0; id <= n; ++id) expect_tips.insert(id);
        for (std::int64_t id = 0; id <= n; ++id)
            for (auto p : store.get(id).parents) expect_tips.erase(p);
        REQUIRE(view.tips() == expect_tips);

        // parent timestamps strictly precede children (ids grow with time here)
        for (std::int64_t id = 1; id <= n; ++id)
            for (auto p : store.get(id).parents)
                REQUIRE(store.get(p).issue_timestamp < store.get(id).issue_timestamp);
    }
}

TEST_CASE("weight updates report each changed block once, sorted") {
    BlockStore store;
    const auto g = add_block(store, {}, 0.0, -1);
    const auto a = add_block(store, {g}, 1.0);
    const auto b = add_block(store, {a}, 2.0);

    DagView view(&store);
    view.attach(g);
    (void)view.take_weight_updates();

    view.attach(a);
    CHECK(view.take_weight_updates() == std::vector<std::int64_t>{g, a});
    view.attach(b);
    CHECK(view.take_weight_updates() == std::vector<std::int64_t>{g, a, b});
    CHECK(view.take_weight_updates().empty());
}

TEST_CASE("tip selection with a single candidate returns it") {
    BlockStore store;
    const auto g = add_block(store, {}, 0.0, -1);
    DagView view(&store);
    view.attach(g);
    RngStream rng(1, "tips");
    const auto tips = view.select_tips(2, seconds(5.0), seconds(30.0), rng);
    CHECK(tips == std::vector<std::int64_t>{g});
}

TEST_CASE("stale tips fall back to the newest attached block") {
    BlockStore store;
    const auto g = add_block(store, {}, 0.0, -1);
    const auto a = add_block(store, {g}, 1.0);
    const auto b = add_block(store, {g}, 2.0);
    DagView view(&store);
    for (auto id : {g, a, b}) view.attach(id);

    RngStream rng(1, "tips");
    // both tips (a, b) are 30+ seconds old at t=40
    const auto tips = view.select_tips(2, seconds(40.0), seconds(30.0), rng);
    CHECK(tips == std::vector<std::int64_t>{b});
}

TEST_CASE("tip pairs are drawn uniformly") {
    BlockStore store;
    const auto g = add_block(store, {}, 0.0, -1);
    std::vector<std::int64_t> tips5;
    for (int i = 0; i < 5; ++i) tips5.push_back(add_block(store, {g}, 1.0));
    DagView view(&store);
    view.attach(g);
    for (auto id : tips5) view.attach(id);
    REQUIRE(view.tips().size() == 5);

    RngStream rng(42, "tips");
    std::map<std::pair<std::int64_t, std::int64_t>, int> freq;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        auto pick = view.select_tips(2, seconds(2.0), seconds(30.0), rng);
        REQUIRE(pick.size() == 2);
        REQUIRE(pick[0] != pick[1]);
        if (pick[0] > pick[1]) std::swap(pick[0], pick[1]);
        ++freq[{pick[0], pick[1]}];
    }
    REQUIRE(freq.size() == 10);  // C(5,2) unordered pairs
    const double expect = draws / 10.0;
    double chi2 = 0.0;
    for (const auto& [pair, count] : freq) chi2 += (count - expect) * (count - expect) / expect;
    // chi-square critical value at p=0.999, 9 degrees of freedom
    CHECK(chi2 < 27.877164871256568);
}

TEST_CASE("confirmation triggers once when weight crosses the threshold") {
    BlockStore store;
    std::vector<std::int64_t> chain;
    chain.push_back(add_block(store, {}, 0.0, -1));
    for (int i = 1; i <= 101; ++i) chain.push_back(add_block(store, {chain.back()}, i));

    DagView view(&store);
    ConfirmationState conf(100);

    std::vector<std::int64_t> reported;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        view.attach(chain[i]);
        for (auto id : conf.update(view)) reported.push_back(id);
    }
    // 101 attached blocks: the root has weight 100 and confirms, nothing else
    CHECK(view.cumulative_weight(chain[0]) == 100);
    CHECK(reported == std::vector<std::int64_t>{chain[0]});
    CHECK(conf.is_confirmed(chain[0]));
    CHECK_FALSE(conf.is_confirmed(chain[1]));

    // pushing weight past the threshold does not re-report
    view.attach(chain.back());
    CHECK(conf.update(view) == std::vector<std::int64_t>{chain[1]});
    CHECK(view.cumulative_weight(chain[0]) == 101);
    CHECK(conf.confirmed_count() == 2);
}

TEST_CASE("block store validates parent references") {
    BlockStore store;
    const auto g = add_block(store, {}, 0.0, -1);
    CHECK_THROWS(add_block(store, {5}));   // unknown parent
    CHECK_THROWS(add_block(store, {-1}));  // negative parent
    CHECK_NOTHROW(add_block(store, {g}));
    CHECK_THROWS(store.get(99));
}
