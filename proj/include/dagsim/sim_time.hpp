#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace dagsim {

// Simulation timestamp in integer microseconds. Integer arithmetic keeps
// event ordering exact and serialized output stable across platforms.
struct SimTime {
    std::int64_t us = 0;

    static SimTime from_seconds(double s) {
        return SimTime{static_cast<std::int64_t>(std::llround(s * 1e6))};
    }
    double seconds() const { return static_cast<double>(us) * 1e-6; }

    auto operator<=>(const SimTime&) const = default;

    SimTime& operator+=(SimTime o) {
        us += o.us;
        return *this;
    }
    friend SimTime operator+(SimTime a, SimTime b) { return SimTime{a.us + b.us}; }
    friend SimTime operator-(SimTime a, SimTime b) { return SimTime{a.us - b.us}; }
};

inline SimTime seconds(double s) { return SimTime::from_seconds(s); }

}  // namespace dagsim
