#include "redzone/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "redzone/error.hpp"

namespace redzone {

std::string to_string(UnitId id) {
    switch (id) {
        case UnitId::controller_1:
            return "controller_1";
        case UnitId::controller_2:
            return "controller_2";
        case UnitId::controller_3:
            return "controller_3";
    }
    return "unknown";
}

std::string to_string(Composition c) { return c == Composition::parallel ? "parallel" : "single"; }

double effective_age(const Unit& unit, double alpha) {
    return unit.lab_burnin_credit + alpha * unit.shelf_age + unit.onjob_age;
}

double consumed_life(const Unit& unit, double alpha) {
    return alpha * unit.shelf_age + unit.onjob_age;
}

Unit advance(const Unit& unit, double t) {
    if (!(t >= unit.as_of)) {
        throw DomainError("cannot move a unit backwards in time");
    }
    Unit out = unit;
    const double dt = t - unit.as_of;
    if (unit.status == UnitStatus::in_slot) {
        out.onjob_age += dt;
    } else if (unit.status == UnitStatus::on_shelf) {
        out.shelf_age += dt;
    }
    out.as_of = t;
    return out;
}

SystemConfig::SystemConfig(BathtubModel hz, LifetimeDistribution lifetime)
    : hazard(std::move(hz)), unit_lifetime(lifetime) {}

void SystemConfig::validate() const {
    if (!std::isfinite(shelf_aging_factor) || shelf_aging_factor < 0.0 || shelf_aging_factor > 1.0) {
        throw ConfigError("must lie in [0, 1]", "system.shelf_aging_factor");
    }
    if (!std::isfinite(lab_burnin) || lab_burnin < 0.0) {
        throw ConfigError("must be >= 0", "system.lab_burnin_weeks");
    }
    if (!std::isfinite(warranty) || warranty < 0.0) {
        throw ConfigError("must be >= 0", "system.warranty_weeks");
    }
    if (active_units != 1 && active_units != 2) {
        throw ConfigError("must be 1 or 2", "system.active_units");
    }
    if (spares != 0 && spares != 1) {
        throw ConfigError("must be 0 or 1", "system.spares");
    }
}

std::vector<std::string> SystemConfig::warnings() const {
    std::vector<std::string> out = hazard.warnings();
    if (lab_burnin > hazard.phases().burnin) {
        out.push_back("lab burn-in exceeds the declared burn-in phase Th1");
    }
    return out;
}

BathtubModel default_bathtub() {
    return BathtubModel(0.001, WeibullTerm(0.018, 0.5), WeibullTerm(1e-6, 3.0),
                        PhaseDurations{20.0, 160.0, 40.0});
}

SystemConfig default_system_config() {
    return SystemConfig(default_bathtub(), LifetimeDistribution::lognormal(220.0, 4.0));
}

double hazard_age(const Unit& unit, double t, double alpha) {
    const Unit now = advance(unit, t);
    return std::max(0.0, effective_age(now, alpha) + unit.stagger);
}

double unit_hazard(const Unit& unit, double t, const SystemConfig& config) {
    if (unit.status == UnitStatus::failed) {
        throw StateError(to_string(unit.id) + " has failed; its hazard is undefined");
    }
    const double alpha = config.shelf_aging_factor;
    double h = config.hazard.hazard(hazard_age(unit, t, alpha), unit.wearout_shift);
    if (unit.status == UnitStatus::in_slot) {
        if (config.software) h += config.software->hazard(t);
        if (config.operator_hazard) h += config.operator_hazard->rate;
    }
    return h;
}

double unit_cumulative(const Unit& unit, double from, double to, const SystemConfig& config) {
    if (unit.status == UnitStatus::failed) {
        throw StateError(to_string(unit.id) + " has failed; its hazard is undefined");
    }
    if (!(to >= from)) {
        throw DomainError("cumulative hazard interval must satisfy from <= to");
    }
    const double alpha = config.shelf_aging_factor;
    const auto& hw = config.hazard;
    double cum = hw.cumulative(hazard_age(unit, to, alpha), unit.wearout_shift) -
                 hw.cumulative(hazard_age(unit, from, alpha), unit.wearout_shift);
    if (unit.status == UnitStatus::in_slot) {
        if (config.software) cum += config.software->cumulative(to) - config.software->cumulative(from);
        if (config.operator_hazard) cum += config.operator_hazard->rate * (to - from);
    }
    return std::max(0.0, cum);
}

namespace {

// log(1 - exp(-x)) for x >= 0 without cancellation.
double log1mexp(double x) {
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (std::isinf(x)) return 0.0;
    return x > M_LN2 ? std::log1p(-std::exp(-x)) : std::log(-std::expm1(-x));
}

}  // namespace

double compose_parallel(std::span<const UnitRisk> units) {
    if (units.empty()) {
        throw DomainError("parallel composition needs at least one unit");
    }
    for (const auto& u : units) {
        if (!(u.hazard >= 0.0) || std::isinf(u.hazard) || !(u.cumulative >= 0.0)) {
            throw DomainError("unit hazards must be finite and >= 0, cumulatives >= 0");
        }
    }
    if (units.size() == 1) {
        return units[0].hazard;
    }

    const std::size_t k = units.size();
    std::vector<double> log_f(k);
    double log_all = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        log_f[i] = log1mexp(units[i].cumulative);
        log_all += log_f[i];
    }

    double numerator = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double log_others = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j != i) log_others += log_f[j];
        }
        numerator += units[i].hazard * std::exp(-units[i].cumulative + log_others);
    }
    const double denominator = -std::expm1(log_all);
    if (denominator > 0.0) {
        return numerator / denominator;
    }

    // Every survival probability underflowed. In the limit all F_j -> 1 and the
    // ratio reduces to a survival-weighted mean of the unit hazards.
    double h_min = std::numeric_limits<double>::infinity();
    for (const auto& u : units) h_min = std::min(h_min, u.cumulative);
    if (std::isinf(h_min)) {
        throw CompositionError("all units have failed; system hazard undefined");
    }
    double num = 0.0;
    double den = 0.0;
    for (const auto& u : units) {
        const double w = std::exp(-(u.cumulative - h_min));
        num += u.hazard * w;
        den += w;
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// Deterministic scenario

ScenarioTimeline scenario_timeline(const SystemConfig& config, std::optional<double> delta_opt) {
    config.validate();
    if (config.active_units != 2 || config.spares != 1) {
        throw ConfigError("scenario needs two active units and one spare", "system");
    }
    const auto& hz = config.hazard;
    const double mu = config.unit_lifetime.mean();
    const double delta = delta_opt.value_or(config.unit_lifetime.sd());
    const double alpha = config.shelf_aging_factor;
    if (!std::isfinite(delta) || delta < 0.0) {
        throw ConfigError("stagger must be finite and >= 0", "system.lifetime.sd_weeks");
    }
    const double t0 = hz.wearout_onset();
    if (mu < t0) {
        throw ConfigError("mean lifetime is shorter than the wear-out onset Th1 + Th2",
                          "system.lifetime.mean_weeks");
    }

    ScenarioTimeline tl{};
    tl.delta = delta;
    tl.t0 = t0;
    tl.tf1 = mu;
    tl.tf2 = mu + delta;

    Unit c1{UnitId::controller_1, mu};
    Unit c2{UnitId::controller_2, mu};
    c2.stagger = -delta;
    Unit c3{UnitId::controller_3, mu};
    c3.status = UnitStatus::on_shelf;
    c3.lab_burnin_credit = config.lab_burnin;

    // Spare installed at the first main failure, unless it already wore out on the shelf.
    const double shelf_consumed = alpha * tl.tf1;
    tl.spare_installed = shelf_consumed < mu;
    double spare_death = tl.tf1;
    if (tl.spare_installed) {
        c3 = advance(c3, tl.tf1);
        c3.status = UnitStatus::in_slot;
        spare_death = tl.tf1 + (mu - shelf_consumed);
        const double age_at_install = effective_age(c3, alpha);
        tl.t2 = tl.tf1 + std::max(0.0, hz.phases().burnin - age_at_install);
    } else {
        c3.status = UnitStatus::failed;
        tl.t2 = tl.tf1;
    }
    tl.units = {c1, c2, c3};
    tl.tdt = std::max(tl.tf2, spare_death);

    if (tl.spare_installed && spare_death > tl.tf2) {
        const double onset_time = tl.tf1 + (t0 - effective_age(c3, alpha));
        tl.terminal_wearout_start = std::max(tl.tf2, onset_time);
    } else {
        tl.terminal_wearout_start = std::max(spare_death, t0 + delta);
    }
    tl.terminal_wearout_start = std::min(tl.terminal_wearout_start, tl.tdt);

    std::vector<double> cuts{0.0, tl.tf1, tl.tf2, tl.tdt};
    if (t0 > 0.0 && t0 < tl.tf1) cuts.push_back(t0);
    if (tl.spare_installed && spare_death < tl.tdt) cuts.push_back(spare_death);
    if (tl.spare_installed && tl.t2 > tl.tf1 && tl.t2 < tl.tdt) cuts.push_back(tl.t2);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        if (!(a < b)) continue;
        const double mid = 0.5 * (a + b);
        ScenarioSegment seg{a, b, {}, Composition::single, 0.0, {}};
        auto add = [&](const Unit& u) {
            seg.active.push_back({u.id, hz.phase(hazard_age(u, mid, alpha))});
        };
        if (mid < tl.tf1) add(c1);
        if (mid < tl.tf2) add(c2);
        if (tl.spare_installed && mid >= tl.tf1 && mid < spare_death) add(c3);
        seg.composition = seg.active.size() > 1 ? Composition::parallel : Composition::single;

        // Reconfigurations happen at tf1 (spare in) and at each later death.
        double cfg = 0.0;
        for (double ev : {tl.tf1, tl.tf2, spare_death}) {
            if (ev <= a && ev > cfg) cfg = ev;
        }
        seg.config_start = cfg;

        if (a == t0) seg.markers.push_back("T0");
        if (a == tl.tf1) seg.markers.push_back("Tf1");
        if (a == tl.tf2) seg.markers.push_back("T1");
        if (tl.spare_installed && a == tl.t2) seg.markers.push_back("T2");
        tl.segments.push_back(std::move(seg));
    }
    return tl;
}

Curve system_hazard_curve(const ScenarioTimeline& timeline, const SystemConfig& config, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("grid step must be > 0");
    }
    Curve curve;
    std::size_t seg_index = 0;
    std::vector<UnitRisk> risks;
    for (std::size_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (!(t < timeline.tdt)) break;
        while (seg_index + 1 < timeline.segments.size() && t >= timeline.segments[seg_index].t_end) {
            ++seg_index;
        }
        const auto& seg = timeline.segments[seg_index];
        risks.clear();
        for (const auto& active : seg.active) {
            const Unit& u = timeline.units[static_cast<std::size_t>(active.id)];
            const double from = std::max(seg.config_start, u.as_of);
            risks.push_back({unit_hazard(u, t, config), unit_cumulative(u, from, t, config)});
        }
        curve.push_back({t, compose_parallel(risks)});
    }
    return curve;
}

}  // namespace redzone
