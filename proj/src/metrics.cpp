#include "dagsim/metrics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dagsim {

const char* metric_kind_name(MetricKind k) {
    switch (k) {
        case MetricKind::Issued: return "issued";
        case MetricKind::Enqueued: return "enqueued";
        case MetricKind::Scheduled: return "scheduled";
        case MetricKind::DroppedFull: return "dropped_full";
        case MetricKind::DroppedStale: return "dropped_stale";
        case MetricKind::DroppedRejected: return "dropped_rejected";
        case MetricKind::Disseminated: return "disseminated";
        case MetricKind::LocallyConfirmed: return "locally_confirmed";
        case MetricKind::Confirmed: return "confirmed";
    }
    return "?";
}

std::size_t MetricsLog::count(MetricKind k) const {
    std::size_t c = 0;
    for (const auto& r : records_)
        if (r.kind == k) ++c;
    return c;
}

static void append_time(std::string& line, SimTime t) {
    char buf[40];
    const std::int64_t whole = t.us / 1000000;
    const std::int64_t frac = t.us % 1000000;
    std::snprintf(buf, sizeof buf, "%" PRId64 ".%06" PRId64, whole, frac);
    line += buf;
}

static void append_double(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    line += buf;
}

void MetricsLog::write_events_csv(std::ostream& out) const {
    out << "time,kind,block_id,node_id,account_id,credits,sojourn\n";
    std::string line;
    for (const auto& r : records_) {
        line.clear();
        append_time(line, r.time);
        line += ',';
        line += metric_kind_name(r.kind);
        line += ',';
        if (r.block_id >= 0) line += std::to_string(r.block_id);
        line += ',';
        if (r.node_id >= 0) line += std::to_string(r.node_id);
        line += ',';
        if (r.account_id >= 0) line += std::to_string(r.account_id);
        line += ',';
        if (r.credits) append_double(line, *r.credits);
        line += ',';
        if (r.sojourn_s) append_double(line, *r.sojourn_s);
        line += '\n';
        out << line;
    }
}

std::vector<std::pair<double, double>> moving_average(
    const std::vector<std::pair<double, double>>& series, double window_s) {
    if (window_s <= 0.0) throw std::invalid_argument("moving_average: window must be positive");

    std::vector<std::pair<double, double>> out;
    out.reserve(series.size());
    std::size_t lo = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (i > 0 && series[i].first < series[i - 1].first)
            throw std::invalid_argument("moving_average: series not sorted by time");
        sum += series[i].second;
        // keep points with time in (t_i - window, t_i]
        while (series[lo].first <= series[i].first - window_s) {
            sum -= series[lo].second;
            ++lo;
        }
        out.emplace_back(series[i].first, sum / static_cast<double>(i - lo + 1));
    }
    return out;
}

std::vector<std::pair<double, double>> latency_cdf(std::vector<double> latencies_s) {
    std::vector<std::pair<double, double>> out;
    if (latencies_s.empty()) return out;
    std::sort(latencies_s.begin(), latencies_s.end());
    const double n = static_cast<double>(latencies_s.size());
    for (std::size_t i = 0; i < latencies_s.size(); ++i) {
        const bool last_of_value =
            i + 1 == latencies_s.size() || latencies_s[i + 1] != latencies_s[i];
        if (last_of_value)
            out.emplace_back(latencies_s[i], static_cast<double>(i + 1) / n);
    }
    return out;
}

std::vector<std::pair<double, double>> windowed_rate(const std::vector<double>& event_times_s,
                                                     double window_s, double t_begin,
                                                     double t_end, double step_s,
                                                     double divisor) {
    if (window_s <= 0.0) throw std::invalid_argument("windowed_rate: window must be positive");
    if (step_s <= 0.0) throw std::invalid_argument("windowed_rate: step must be positive");
    if (divisor <= 0.0) throw std::invalid_argument("windowed_rate: divisor must be positive");

    std::vector<std::pair<double, double>> out;
    std::size_t lo = 0, hi = 0;
    const long steps = std::lround((t_end - t_begin) / step_s);
    for (long i = 0; i <= steps; ++i) {
        const double t = t_begin + static_cast<double>(i) * step_s;
        // events in (t - window, t]
        while (hi < event_times_s.size() && event_times_s[hi] <= t) ++hi;
        while (lo < hi && event_times_s[lo] <= t - window_s) ++lo;
        const double count = static_cast<double>(hi - lo);
        out.emplace_back(t, count / window_s / divisor);
    }
    return out;
}

void write_series_csv(std::ostream& out, const char* header,
                      const std::vector<std::pair<double, double>>& series) {
    out << header << '\n';
    std::string line;
    char buf[64];
    for (const auto& [t, v] : series) {
        line.clear();
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", t, v);
        line += buf;
        out << line;
    }
}

}  // namespace dagsim
