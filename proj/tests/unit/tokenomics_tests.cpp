#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dagsim/tokenomics.hpp"

using namespace dagsim;

namespace {
Account make_account(double tokens) {
    Account a;
    a.id = 0;
    a.tokens = tokens;
    return a;
}
}  // namespace

TEST_CASE("linear accrual matches rate * tokens * elapsed") {
    CreditGenParams p;  // linear, rate 0.1
    auto a = make_account(25.0);
    const double added = accrue_credits(a, seconds(1.0), p);
    CHECK(added == doctest::Approx(2.5));
    CHECK(a.credit_balance == doctest::Approx(2.5));
    CHECK(a.last_generation_time == seconds(1.0));

    SUBCASE("zero elapsed adds nothing") {
        CHECK(accrue_credits(a, seconds(1.0), p) == 0.0);
    }
    SUBCASE("the clock may not run backwards") {
        CHECK_THROWS(accrue_credits(a, seconds(0.5), p));
    }
}

TEST_CASE("linear accrual is additive over splits") {
    CreditGenParams p;
    auto once = make_account(10.0);
    auto split = make_account(10.0);
    accrue_credits(once, seconds(7.0), p);
    accrue_credits(split, seconds(3.0), p);
    accrue_credits(split, seconds(7.0), p);
    CHECK(once.credit_balance == doctest::Approx(split.credit_balance).epsilon(1e-12));
}

TEST_CASE("concave accrual saturates at cap_scale * tokens") {
    CreditGenParams p;
    p.mode = CreditMode::Concave;
    p.gamma = 1.0;
    p.cap_scale = 1.0;

    auto a = make_account(10.0);
    accrue_credits(a, seconds(1.0), p);
    CHECK(a.credit_balance == doctest::Approx(10.0 * (1.0 - std::exp(-1.0))));

    accrue_credits(a, seconds(1000.0), p);
    CHECK(a.credit_balance == doctest::Approx(10.0));

    SUBCASE("additive over splits") {
        auto split = make_account(10.0);
        accrue_credits(split, seconds(0.3), p);
        accrue_credits(split, seconds(0.7), p);
        accrue_credits(split, seconds(1.0), p);
        auto once = make_account(10.0);
        accrue_credits(once, seconds(1.0), p);
        CHECK(split.credit_balance == doctest::Approx(once.credit_balance).epsilon(1e-12));
    }
}

TEST_CASE("consume refuses overdrafts and rejects negative amounts") {
    auto a = make_account(1.0);
    a.credit_balance = 10.0;
    CHECK(consume_credits(a, 4.0));
    CHECK(a.credit_balance == doctest::Approx(6.0));
    CHECK_FALSE(consume_credits(a, 6.5));
    CHECK(a.credit_balance == doctest::Approx(6.0));
    CHECK(consume_credits(a, 6.0));
    CHECK(a.credit_balance == doctest::Approx(0.0));
    CHECK_THROWS(static_cast<void>(consume_credits(a, -1.0)));

    reimburse_credits(a, 2.5);
    CHECK(a.credit_balance == doctest::Approx(2.5));
}

TEST_CASE("token sampling is bounded below and hits the power-law median") {
    RngStream rng(42, "tokens");
    const auto xs = sample_token_distribution(100000, 2.0, 10.0, rng);
    REQUIRE(xs.size() == 100000);
    for (double x : xs) REQUIRE(x >= 10.0);

    auto sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    // alpha=2 puts the median at x_min * 2^(1/(alpha-1)) = 20
    CHECK(median == doctest::Approx(20.0).epsilon(0.02));

    CHECK_THROWS(sample_token_distribution(10, 1.0, 10.0, rng));
    CHECK_THROWS(sample_token_distribution(10, 2.0, 0.0, rng));
}

TEST_CASE("optimal allotment count matches the swept oracle") {
    auto c = optimal_allot_count(100.0, 10.0, 5.0, 1.0, 100);
    CHECK(c.n == 28);
    CHECK(c.credits == doctest::Approx(700.916895349635).epsilon(1e-12));

    c = optimal_allot_count(50.0, 2.0, 1.0, 0.5, 40);
    CHECK(c.n == 5);
    CHECK(c.credits == doctest::Approx(40.31731173050454).epsilon(1e-12));

    c = optimal_allot_count(10.0, 100.0, 0.5, 0.2, 60);
    CHECK(c.n == 56);
    CHECK(c.credits == doctest::Approx(140.183379069927).epsilon(1e-12));

    SUBCASE("the optimum can sit on the n_max boundary") {
        c = optimal_allot_count(200.0, 1.0, 0.01, 3.0, 50);
        CHECK(c.n == 50);
        CHECK(c.credits == doctest::Approx(581.8546641575128).epsilon(1e-12));
    }
    SUBCASE("free splitting always uses every allotment") {
        c = optimal_allot_count(100.0, 10.0, 0.0, 1.0, 37);
        CHECK(c.n == 37);
    }
}

TEST_CASE("the credit ledger replays balances and minima") {
    CreditLedger ledger;
    ledger.record(0, CreditEventKind::Accrue, 10.0);
    ledger.record(0, CreditEventKind::Consume, 7.0);
    ledger.record(1, CreditEventKind::Accrue, 100.0);
    ledger.record(0, CreditEventKind::Consume, 3.0);
    ledger.record(0, CreditEventKind::Reimburse, 5.0);

    CHECK(ledger.replay_balance(0) == doctest::Approx(5.0));
    CHECK(ledger.replay_balance(1) == doctest::Approx(100.0));
    CHECK(ledger.replay_balance(7) == 0.0);
    CHECK(ledger.replay_min_balance(0) == doctest::Approx(0.0));
    CHECK(ledger.replay_min_balance(7) == 0.0);
}
