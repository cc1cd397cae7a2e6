#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "redzone/system.hpp"

namespace redzone {

enum class EventKind { failure, replace, rotate, dp, system_death };

std::string to_string(EventKind kind);

struct TraceEvent {
    double time;
    EventKind kind;
    std::optional<UnitId> unit;
    std::optional<int> slot;  // absent for shelf events and system-level events
};

// Unit occupying a slot during one configuration interval.
struct IntervalUnit {
    UnitId id;
    double hazard_age_at_start;
    double wearout_shift;
};

/**
 * Span of calendar time over which the set of slot units is fixed. Cumulative
 * hazards in the composition are measured from `t_start`.
 */
struct ConfigurationInterval {
    double t_start;
    double t_end;
    std::vector<IntervalUnit> units;
    bool spare_available;
};

// One simulated system life.
struct Trace {
    std::uint64_t seed = 0;
    std::vector<double> lifetimes;  // indexed by UnitId
    std::vector<TraceEvent> events;
    std::vector<ConfigurationInterval> intervals;
    double trdd = 0.0;
    double tdt = 0.0;
    std::optional<double> dp;
    bool censored = false;
};

}  // namespace redzone
