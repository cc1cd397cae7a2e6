#include "redzone/maintenance.hpp"

#include <cmath>

#include "redzone/error.hpp"

namespace redzone {

std::string to_string(PolicyKind kind) { return kind == PolicyKind::type1 ? "type1" : "type2"; }

PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "type1") return PolicyKind::type1;
    if (s == "type2") return PolicyKind::type2;
    throw ConfigError("expected \"type1\" or \"type2\", got \"" + s + "\"", "policy.kind");
}

Policy Policy::type1() { return Policy{}; }

Policy Policy::type2(double rotation_period) {
    Policy p;
    p.kind = PolicyKind::type2;
    p.rotation_period = rotation_period;
    return p;
}

void Policy::validate() const {
    if (kind == PolicyKind::type2 && (!(rotation_period > 0.0) || !std::isfinite(rotation_period))) {
        throw ConfigError("must be > 0 for type2", "policy.rotation_period_weeks");
    }
    if (!(dp_warn_factor > 0.0) || !std::isfinite(dp_warn_factor)) {
        throw ConfigError("must be > 0", "policy.dp_warn_factor");
    }
    if (vendor_mtbf && (!(*vendor_mtbf > 0.0) || !std::isfinite(*vendor_mtbf))) {
        throw ConfigError("must be > 0", "policy.vendor_mtbf_weeks");
    }
}

double default_rotation_period(double unit_life) {
    if (!(unit_life > 0.0)) {
        throw DomainError("unit life must be > 0");
    }
    return unit_life / 6.0;
}

std::string to_string(ActionKind kind) {
    return kind == ActionKind::replace_failed ? "replace_failed" : "rotate";
}

bool SystemState::shelf_ready() const { return shelf && !units.at(*shelf).failed; }

std::optional<MaintenanceAction> plan_type1(const SystemState& state, int failed_slot) {
    if (failed_slot < 0 || failed_slot >= state.slot_count) return std::nullopt;
    if (!state.shelf_ready()) return std::nullopt;
    std::optional<UnitId> out;
    if (const auto& occupant = state.slots[static_cast<std::size_t>(failed_slot)]) {
        out = state.units.at(*occupant).id;
    }
    return MaintenanceAction{state.time, ActionKind::replace_failed, failed_slot,
                             state.units.at(*state.shelf).id, out};
}

std::optional<MaintenanceAction> plan_type2(const SystemState& state, double t) {
    if (!state.shelf_ready()) return std::nullopt;
    std::optional<int> target;
    double oldest = -1.0;
    for (int s = 0; s < state.slot_count; ++s) {
        const auto& idx = state.slots[static_cast<std::size_t>(s)];
        if (!idx) continue;
        const auto& u = state.units.at(*idx);
        if (u.failed) continue;
        if (u.effective_age > oldest) {
            oldest = u.effective_age;
            target = s;
        }
    }
    if (!target) return std::nullopt;
    const auto& occupant = state.units.at(*state.slots[static_cast<std::size_t>(*target)]);
    return MaintenanceAction{t, ActionKind::rotate, *target, state.units.at(*state.shelf).id,
                             occupant.id};
}

std::string to_string(DpRule rule) { return rule == DpRule::vendor_mtbf ? "vendor_mtbf" : "shelf_empty"; }

DecisionPoint decision_point_type1(double commissioning, double vendor_mtbf, double warn_factor) {
    if (!(vendor_mtbf > 0.0) || !(warn_factor > 0.0)) {
        throw DomainError("vendor MTBF and warn factor must be > 0");
    }
    return DecisionPoint{commissioning + warn_factor * vendor_mtbf, DpRule::vendor_mtbf, std::nullopt};
}

std::optional<DecisionPoint> decision_point_type2(const Trace& trace) {
    for (const auto& e : trace.events) {
        if (e.kind == EventKind::dp) {
            DecisionPoint dp{e.time, DpRule::shelf_empty, std::nullopt};
            if (!trace.censored) dp.margin = trace.tdt - e.time;
            return dp;
        }
    }
    return std::nullopt;
}

bool red_zone_condition(double delta_spread, double th3) {
    if (!(delta_spread >= 0.0) || !(th3 > 0.0)) {
        throw DomainError("red-zone condition needs delta >= 0 and th3 > 0");
    }
    return delta_spread < th3;
}

}  // namespace redzone
