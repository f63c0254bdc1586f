#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dagsim/config.hpp"
#include "dagsim/metrics.hpp"
#include "dagsim/scheduler.hpp"
#include "dagsim/simulation.hpp"
#include "dagsim/tokenomics.hpp"

namespace py = pybind11;
using namespace dagsim;

namespace {

const char* status_name(EnqueueStatus s) {
    switch (s) {
        case EnqueueStatus::Accepted: return "accepted";
        case EnqueueStatus::AcceptedReplacing: return "accepted_replacing";
        case EnqueueStatus::Rejected: return "rejected";
        case EnqueueStatus::Duplicate: return "duplicate";
    }
    return "unknown";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Core simulator operations: scoring, credit generation, scheduling, metrics.";

    m.def("priority_score", &priority_score, py::arg("credits"), py::arg("work"),
          "Credits consumed divided by work; the scheduling key.");

    m.def(
        "sample_token_distribution",
        [](int n, double alpha, double x_min, std::uint64_t seed) {
            RngStream rng(seed, "tokens");
            return sample_token_distribution(n, alpha, x_min, rng);
        },
        py::arg("n"), py::arg("alpha"), py::arg("x_min"), py::arg("seed") = 42,
        "Power-law token holdings, deterministic in the seed.");

    m.def(
        "optimal_allot_count",
        [](double tokens, double hold_time, double per_allot_cost, double gamma, int n_max) {
            const AllotChoice c =
                optimal_allot_count(tokens, hold_time, per_allot_cost, gamma, n_max);
            return py::make_tuple(c.n, c.credits);
        },
        py::arg("tokens"), py::arg("hold_time"), py::arg("per_allot_cost"), py::arg("gamma"),
        py::arg("n_max"),
        "Best number of equal token allotments under the concave rule; returns (n, credits).");

    m.def("moving_average", &moving_average, py::arg("series"), py::arg("window"),
          "Trailing mean over (t - window, t] for each input point.");
    m.def("latency_cdf", &latency_cdf, py::arg("latencies"),
          "Empirical CDF points (value, fraction <= value).");
    m.def("windowed_rate", &windowed_rate, py::arg("event_times"), py::arg("window"),
          py::arg("t_begin"), py::arg("t_end"), py::arg("step") = 1.0, py::arg("divisor") = 1.0,
          "Trailing event rate sampled on a fixed grid.");

    m.def("preset_names", &preset_names, "Available preset scenario names.");
    m.def(
        "preset_config", [](const std::string& name) { return preset_config(name).dump(); },
        py::arg("name"), "Preset scenario config as a JSON string.");

    m.def(
        "validate_config",
        [](const std::string& text) {
            std::vector<std::string> errors;
            try {
                parse_config(nlohmann::json::parse(text));
            } catch (const ConfigValidationError& e) {
                for (const auto& err : e.errors()) errors.push_back(err.path + ": " + err.message);
            } catch (const std::exception& e) {
                errors.push_back(e.what());
            }
            return errors;
        },
        py::arg("config_json"),
        "All validation errors for a JSON config string; empty means valid.");

    m.def(
        "run_scenario",
        [](const std::string& config_json, const std::string& out_dir) {
            ScenarioConfig cfg = parse_config(nlohmann::json::parse(config_json));
            Simulation sim(std::move(cfg));
            sim.run();
            if (!out_dir.empty()) write_outputs(sim, out_dir);
            return sim.summary().dump();
        },
        py::arg("config_json"), py::arg("out_dir") = "",
        "Run a scenario; writes outputs when out_dir is given; returns the summary as JSON.");

    py::class_<SchedulerBuffer>(m, "SchedulerBuffer")
        .def(py::init([](std::size_t capacity, double max_age_s) {
                 return SchedulerBuffer(capacity, seconds(max_age_s));
             }),
             py::arg("capacity"), py::arg("max_age"))
        .def(
            "enqueue",
            [](SchedulerBuffer& b, std::int64_t block_id, double credits, double work,
               double arrival_s) {
                BufferEntry e;
                e.block_id = block_id;
                e.score = priority_score(credits, work);
                e.arrival_time = seconds(arrival_s);
                e.work = work;
                e.credits_consumed = credits;
                const EnqueueResult r = b.enqueue(e);
                return py::make_tuple(status_name(r.status),
                                      r.status == EnqueueStatus::AcceptedReplacing
                                          ? py::object(py::int_(r.dropped.block_id))
                                          : py::object(py::none()));
            },
            py::arg("block_id"), py::arg("credits"), py::arg("work") = 1.0,
            py::arg("arrival") = 0.0, "Returns (status, dropped_block_id_or_None).")
        .def(
            "next_batch",
            [](SchedulerBuffer& b, double work_budget) {
                std::vector<std::int64_t> ids;
                for (const auto& e : b.next_batch(work_budget)) ids.push_back(e.block_id);
                return ids;
            },
            py::arg("work_budget") = 1.0)
        .def(
            "expire_stale",
            [](SchedulerBuffer& b, double now_s) {
                std::vector<std::int64_t> ids;
                for (const auto& e : b.expire_stale(seconds(now_s))) ids.push_back(e.block_id);
                return ids;
            },
            py::arg("now"))
        .def("congestion_view", &SchedulerBuffer::congestion_view, py::arg("k"))
        .def("contains", &SchedulerBuffer::contains, py::arg("block_id"))
        .def("__len__", [](const SchedulerBuffer& b) { return b.size(); })
        .def_property_readonly("capacity", &SchedulerBuffer::capacity);
}
