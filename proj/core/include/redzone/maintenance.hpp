#pragma once

// Maintenance policies and decision-point rules.
//
// Type_1 installs the shelf spare only when a slot unit fails. Type_2 also
// rotates the shelf unit into service every `rotation_period` weeks, swapping
// out the slot unit with the greatest effective age, so all three units consume
// their life budgets together.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "redzone/system.hpp"
#include "redzone/trace.hpp"

namespace redzone {

enum class PolicyKind { type1, type2 };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& s);

struct Policy {
    PolicyKind kind = PolicyKind::type1;
    double rotation_period = 0.0;  // type2 only
    double dp_warn_factor = 0.8;   // type1 DP = commissioning + factor * vendor MTBF
    std::optional<double> vendor_mtbf;  // defaults to the unit lifetime mean

    static Policy type1();
    static Policy type2(double rotation_period);

    void validate() const;
};

// Recommended rotation period: a sixth of the unit lifetime.
double default_rotation_period(double unit_life);

enum class ActionKind { replace_failed, rotate };

std::string to_string(ActionKind kind);

struct MaintenanceAction {
    double time;
    ActionKind kind;
    int slot;
    UnitId unit_in;
    std::optional<UnitId> unit_out;
};

struct UnitView {
    UnitId id;
    double effective_age;
    bool failed;
};

// Snapshot the simulator hands to the planners. Slots and shelf hold indices
// into `units`.
struct SystemState {
    double time = 0.0;
    std::vector<UnitView> units;
    std::array<std::optional<std::size_t>, 2> slots;
    std::optional<std::size_t> shelf;
    int slot_count = 2;

    bool shelf_ready() const;
};

// Install the shelf unit into `failed_slot` if it is available.
std::optional<MaintenanceAction> plan_type1(const SystemState& state, int failed_slot);

// Rotation at an epoch: swap the shelf unit with the oldest slot unit (ties go
// to the lower slot index). Returns nothing when the shelf is empty or failed.
std::optional<MaintenanceAction> plan_type2(const SystemState& state, double t);

enum class DpRule { vendor_mtbf, shelf_empty };

std::string to_string(DpRule rule);

struct DecisionPoint {
    double time;
    DpRule rule;
    std::optional<double> margin;  // Tdr = Tdt - DP, filled in post hoc
};

DecisionPoint decision_point_type1(double commissioning, double vendor_mtbf, double warn_factor);

// First instant both slots hold working units and nothing is left on the shelf.
std::optional<DecisionPoint> decision_point_type2(const Trace& trace);

// The red zone exists when the lifetime spread is below the wear-out duration.
bool red_zone_condition(double delta_spread, double th3);

}  // namespace redzone
