#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "dagsim/sim_time.hpp"

namespace dagsim {

enum class MetricKind {
    Issued,
    Enqueued,
    Scheduled,
    DroppedFull,
    DroppedStale,
    DroppedRejected,
    Disseminated,
    LocallyConfirmed,
    Confirmed,
};

const char* metric_kind_name(MetricKind k);

struct MetricRecord {
    SimTime time{};
    MetricKind kind = MetricKind::Issued;
    std::int64_t block_id = -1;             // -1 when not applicable
    int node_id = -1;                       // -1 when not applicable
    int account_id = -1;                    // -1 when not applicable
    std::optional<double> credits;
    std::optional<double> sojourn_s;
};

// Append-only event log for one run. Records are appended in simulation
// order, which is already sorted by time.
class MetricsLog {
public:
    void record(MetricRecord r) { records_.push_back(std::move(r)); }
    const std::vector<MetricRecord>& records() const { return records_; }
    std::size_t count(MetricKind k) const;

    // CSV columns: time,kind,block_id,node_id,account_id,credits,sojourn.
    // Missing fields serialize as empty cells; times as seconds with six
    // decimals.
    void write_events_csv(std::ostream& out) const;

private:
    std::vector<MetricRecord> records_;
};

// Trailing moving average: for each input point (t, v), the mean of all
// values with time in (t - window, t]. Input must be sorted by time.
std::vector<std::pair<double, double>> moving_average(
    const std::vector<std::pair<double, double>>& series, double window_s);

// Empirical CDF points (value, fraction <= value), one per distinct value.
std::vector<std::pair<double, double>> latency_cdf(std::vector<double> latencies_s);

// Event rate over a trailing window, sampled every step seconds across
// [t_begin, t_end]; each value is count-in-window / window / divisor.
// Event times must be sorted ascending.
std::vector<std::pair<double, double>> windowed_rate(const std::vector<double>& event_times_s,
                                                     double window_s, double t_begin,
                                                     double t_end, double step_s = 1.0,
                                                     double divisor = 1.0);

// Writes `header` (e.g. "time,value" or "latency,fraction") then one
// "%.6f,%.6f" row per point.
void write_series_csv(std::ostream& out, const char* header,
                      const std::vector<std::pair<double, double>>& series);

}  // namespace dagsim
