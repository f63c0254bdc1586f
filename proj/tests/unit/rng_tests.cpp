#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dagsim/rng.hpp"

using dagsim::RngStream;

TEST_CASE("same seed and stream reproduce the same sequence") {
    RngStream a(42, "traffic/0");
    RngStream b(42, "traffic/0");
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams from one seed are decorrelated") {
    RngStream a(42, "traffic/0");
    RngStream b(42, "traffic/1");
    RngStream c(42, "strategy/0");
    int equal_ab = 0, equal_ac = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        if (x == b.next_u64()) ++equal_ab;
        if (x == c.next_u64()) ++equal_ac;
    }
    CHECK(equal_ab == 0);
    CHECK(equal_ac == 0);
}

TEST_CASE("different seeds differ on the same stream") {
    RngStream a(1, "x");
    RngStream b(2, "x");
    CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("uniform01 lies in [0,1) and is uniform by KS distance") {
    RngStream rng(7, "ks");
    const int n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) {
        x = rng.uniform01();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
    }
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        ks = std::max({ks, std::abs(xs[static_cast<std::size_t>(i)] - lo),
                       std::abs(xs[static_cast<std::size_t>(i)] - hi)});
    }
    CHECK(ks < 0.01);
}

TEST_CASE("uniform_index covers all cells without bias") {
    RngStream rng(11, "idx");
    const std::size_t cells = 10;
    const int draws = 100000;
    std::vector<int> counts(cells, 0);
    for (int i = 0; i < draws; ++i) {
        const std::size_t k = rng.uniform_index(cells);
        REQUIRE(k < cells);
        ++counts[k];
    }
    const double expect = static_cast<double>(draws) / cells;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
    // chi-square critical value at p=0.999, 9 degrees of freedom
    CHECK(chi2 < 27.877164871256568);
}

TEST_CASE("uniform respects its bounds") {
    RngStream rng(3, "u");
    for (int i = 0; i < 10000; ++i) {
        const double x = rng.uniform(2.5, 7.5);
        REQUIRE(x >= 2.5);
        REQUIRE(x <= 7.5);
    }
}

TEST_CASE("exponential has the right mean and rejects bad rates") {
    RngStream rng(5, "exp");
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.exponential(4.0);
        REQUIRE(x >= 0.0);
        sum += x;
    }
    const double mean = sum / n;  // expect 1/4; sd of the mean ~ 0.25/sqrt(n)
    CHECK(mean == doctest::Approx(0.25).epsilon(0.02));
    CHECK_THROWS(rng.exponential(0.0));
    CHECK_THROWS(rng.exponential(-1.0));
}
