#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "dagsim/metrics.hpp"
#include "dagsim/rng.hpp"

using namespace dagsim;

namespace {

std::vector<std::pair<double, double>> naive_moving_average(
    const std::vector<std::pair<double, double>>& series, double window) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < series.size(); ++i) {
        double sum = 0.0;
        int n = 0;
        for (std::size_t j = 0; j <= i; ++j) {
            if (series[j].first > series[i].first - window && series[j].first <= series[i].first) {
                sum += series[j].second;
                ++n;
            }
        }
        out.emplace_back(series[i].first, sum / n);
    }
    return out;
}

double naive_rate_at(const std::vector<double>& times, double t, double window, double divisor) {
    int n = 0;
    for (double x : times)
        if (x > t - window && x <= t) ++n;
    return n / window / divisor;
}

}  // namespace

TEST_CASE("metric kinds serialize to their csv names") {
    CHECK(std::string(metric_kind_name(MetricKind::Issued)) == "issued");
    CHECK(std::string(metric_kind_name(MetricKind::Enqueued)) == "enqueued");
    CHECK(std::string(metric_kind_name(MetricKind::Scheduled)) == "scheduled");
    CHECK(std::string(metric_kind_name(MetricKind::DroppedFull)) == "dropped_full");
    CHECK(std::string(metric_kind_name(MetricKind::DroppedStale)) == "dropped_stale");
    CHECK(std::string(metric_kind_name(MetricKind::DroppedRejected)) == "dropped_rejected");
    CHECK(std::string(metric_kind_name(MetricKind::Disseminated)) == "disseminated");
    CHECK(std::string(metric_kind_name(MetricKind::LocallyConfirmed)) == "locally_confirmed");
    CHECK(std::string(metric_kind_name(MetricKind::Confirmed)) == "confirmed");
}

TEST_CASE("the events csv has a fixed header and empty cells for absent fields") {
    MetricsLog log;
    MetricRecord a;
    a.time = seconds(1.5);
    a.kind = MetricKind::Issued;
    a.block_id = 7;
    a.node_id = 0;
    a.account_id = 3;
    a.credits = 12.25;
    log.record(a);

    MetricRecord b;
    b.time = seconds(2.0);
    b.kind = MetricKind::Scheduled;
    b.block_id = 7;
    b.node_id = 0;
    b.account_id = 3;
    b.credits = 12.25;
    b.sojourn_s = 0.5;
    log.record(b);

    MetricRecord c;
    c.time = seconds(3.0);
    c.kind = MetricKind::Disseminated;
    c.block_id = 7;
    c.account_id = 3;
    log.record(c);

    std::ostringstream out;
    log.write_events_csv(out);
    CHECK(out.str() ==
          "time,kind,block_id,node_id,account_id,credits,sojourn\n"
          "1.500000,issued,7,0,3,12.250000,\n"
          "2.000000,scheduled,7,0,3,12.250000,0.500000\n"
          "3.000000,disseminated,7,,3,,\n");

    CHECK(log.count(MetricKind::Issued) == 1);
    CHECK(log.count(MetricKind::DroppedFull) == 0);
}

TEST_CASE("moving average matches the quadratic reference") {
    RngStream rng(5, "ma");
    std::vector<std::pair<double, double>> series;
    double t = 0.0;
    for (int i = 0; i < 500; ++i) {
        t += rng.uniform01() * 2.0;
        series.emplace_back(t, rng.uniform(-10.0, 10.0));
    }
    const auto fast = moving_average(series, 7.5);
    const auto slow = naive_moving_average(series, 7.5);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
        REQUIRE(fast[i].first == slow[i].first);
        REQUIRE(fast[i].second == doctest::Approx(slow[i].second).epsilon(1e-9));
    }
    CHECK(moving_average({}, 5.0).empty());
    CHECK_THROWS(moving_average({{2.0, 1.0}, {1.0, 1.0}}, 5.0));
}

TEST_CASE("windowed rate matches the point-by-point reference") {
    RngStream rng(6, "rate");
    std::vector<double> times;
    double t = 0.0;
    for (int i = 0; i < 300; ++i) {
        t += rng.exponential(3.0);
        times.push_back(t);
    }
    const auto series = windowed_rate(times, 10.0, 0.0, 120.0, 1.0, 2.0);
    REQUIRE(series.size() == 121);
    for (const auto& [st, v] : series) {
        REQUIRE(v == doctest::Approx(naive_rate_at(times, st, 10.0, 2.0)).epsilon(1e-9));
    }
    CHECK(series.front().first == 0.0);
    CHECK(series.back().first == doctest::Approx(120.0));

    SUBCASE("fractional steps keep an exact grid") {
        const auto fine = windowed_rate(times, 10.0, 0.0, 60.0, 0.25);
        REQUIRE(fine.size() == 241);
        CHECK(fine[1].first == doctest::Approx(0.25));
        CHECK(fine.back().first == doctest::Approx(60.0));
    }
}

TEST_CASE("the latency cdf steps once per distinct value") {
    const auto cdf = latency_cdf({3.0, 1.0, 2.0, 2.0});
    REQUIRE(cdf.size() == 3);
    CHECK(cdf[0] == std::pair{1.0, 0.25});
    CHECK(cdf[1] == std::pair{2.0, 0.75});
    CHECK(cdf[2] == std::pair{3.0, 1.0});
    CHECK(latency_cdf({}).empty());

    const auto single = latency_cdf({5.0});
    REQUIRE(single.size() == 1);
    CHECK(single[0] == std::pair{5.0, 1.0});
}

TEST_CASE("series csv rows carry six decimals") {
    std::ostringstream out;
    write_series_csv(out, "time,value", {{0.0, 1.5}, {1.0, 2.25}});
    CHECK(out.str() ==
          "time,value\n"
          "0.000000,1.500000\n"
          "1.000000,2.250000\n");
}
