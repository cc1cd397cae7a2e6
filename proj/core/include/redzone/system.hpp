#pragma once

// Unit age accounting, redundant-configuration composition and the
// deterministic two-mains-plus-spare scenario generator.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "redzone/curve.hpp"
#include "redzone/hazards.hpp"

namespace redzone {

enum class UnitId : std::uint8_t { controller_1 = 0, controller_2 = 1, controller_3 = 2 };

std::string to_string(UnitId id);

enum class UnitStatus { in_slot, on_shelf, failed };

/**
 * One controller unit. Ages are recorded as of calendar time `as_of`; from
 * there the unit ages at rate 1 in a slot and at the shelf-aging factor on the
 * shelf.
 *
 * `stagger` is a signed offset added to the hazard age (the analytic
 * f(t + delta) shift). `wearout_shift` moves this unit's wear-out onset so it
 * tracks a sampled lifetime.
 */
struct Unit {
    UnitId id = UnitId::controller_1;
    double lifetime = 0.0;
    double onjob_age = 0.0;
    double shelf_age = 0.0;
    double lab_burnin_credit = 0.0;
    double stagger = 0.0;
    double wearout_shift = 0.0;
    UnitStatus status = UnitStatus::in_slot;
    double as_of = 0.0;
};

// lab credit + alpha * shelf age + on-job age.
double effective_age(const Unit& unit, double alpha);

// Life budget consumed: alpha * shelf age + on-job age. Lab burn-in shifts the
// hazard clock but does not consume the lifetime budget.
double consumed_life(const Unit& unit, double alpha);

// The unit with its ages carried forward to calendar time t (t >= as_of).
Unit advance(const Unit& unit, double t);

struct SystemConfig {
    SystemConfig(BathtubModel hazard, LifetimeDistribution unit_lifetime);

    BathtubModel hazard;
    LifetimeDistribution unit_lifetime;
    std::optional<SoftwareHazardModel> software;
    std::optional<OperatorHazard> operator_hazard;
    double shelf_aging_factor = 0.0;
    double lab_burnin = 2.0;
    double warranty = 104.0;  // reported only
    int active_units = 2;
    int spares = 1;

    void validate() const;
    std::vector<std::string> warnings() const;
};

// Built-in defaults: see README for the parameter table.
BathtubModel default_bathtub();
SystemConfig default_system_config();

// Hazard age at calendar time t: effective age carried to t plus stagger, >= 0.
double hazard_age(const Unit& unit, double t, double alpha);

// Failure rate of `unit` at calendar time t. Software and operator terms only
// apply while the unit is in a slot. Throws StateError for a failed unit.
double unit_hazard(const Unit& unit, double t, const SystemConfig& config);

// Integral of unit_hazard over calendar time [from, to].
double unit_cumulative(const Unit& unit, double from, double to, const SystemConfig& config);

struct UnitRisk {
    double hazard;
    double cumulative;
};

/**
 * Exact 1-out-of-k active-parallel system hazard:
 *
 *   h_sys = sum_i f_i prod_{j!=i} F_j / (1 - prod_i F_i),
 *   F_i = 1 - exp(-H_i),  f_i = h_i exp(-H_i).
 *
 * Evaluated in log space so that neither the numerator nor the denominator
 * cancels when the survival probabilities are tiny. k == 1 returns h_1.
 * Throws CompositionError when every unit has infinite cumulative hazard.
 */
double compose_parallel(std::span<const UnitRisk> units);

enum class Composition { parallel, single };

std::string to_string(Composition c);

struct ActiveUnit {
    UnitId id;
    LifePhase phase;
};

struct ScenarioSegment {
    double t_start;
    double t_end;
    std::vector<ActiveUnit> active;
    Composition composition;
    // Instant the current set of slot units was established; cumulative
    // hazards for the composition are measured from here.
    double config_start;
    std::vector<std::string> markers;  // boundary labels at t_start
};

struct ScenarioTimeline {
    std::vector<ScenarioSegment> segments;
    double t0;       // wear-out onset of controller_1
    double tf1;      // first main failure, spare installed
    double tf2;      // second main failure (both mains gone: T1)
    double t2;       // spare leaves burn-in
    double tdt;      // last unit failure
    double terminal_wearout_start;  // final unit alone and in wear-out
    double delta;
    std::array<Unit, 3> units;  // controller_3 as installed at tf1
    bool spare_installed;
};

// Deterministic Type_1 timeline with lifetimes mu (controller_1) and mu + delta
// (controller_2, carried as stagger = -delta). Uses the config lifetime mean and
// its sd as delta unless `delta` is given.
ScenarioTimeline scenario_timeline(const SystemConfig& config,
                                   std::optional<double> delta = std::nullopt);

// Composed system failure rate on the grid t = 0, dt, 2dt, ... < tdt.
Curve system_hazard_curve(const ScenarioTimeline& timeline, const SystemConfig& config, double dt);

}  // namespace redzone
