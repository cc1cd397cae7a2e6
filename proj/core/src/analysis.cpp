#include "redzone/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "redzone/error.hpp"

namespace redzone {

namespace {

bool in_window(double t, std::optional<double> start, std::optional<double> end) {
    return (!start || t >= *start) && (!end || t < *end);
}

double grid_step(const Curve& curve) {
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const double d = curve[i].t - curve[i - 1].t;
        if (d > 0.0) step = std::min(step, d);
    }
    return std::isfinite(step) ? step : 0.0;
}

}  // namespace

std::optional<RedZone> detect_red_zone(const Curve& curve, double baseline, double k,
                                       std::optional<double> scan_start, std::optional<double> scan_end) {
    if (curve.empty()) throw DomainError("red-zone detection needs a non-empty curve");
    if (!(baseline > 0.0) || !std::isfinite(baseline)) throw DomainError("baseline must be > 0");
    if (!(k > 1.0) || !std::isfinite(k)) throw DomainError("threshold k must be > 1");

    const double threshold = k * baseline;
    std::optional<std::size_t> peak;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!in_window(curve[i].t, scan_start, scan_end) || !(curve[i].value > threshold)) continue;
        if (!peak || curve[i].value > curve[*peak].value) peak = i;
    }
    if (!peak) return std::nullopt;

    const double dt = grid_step(curve);
    auto hot = [&](std::size_t i) {
        return in_window(curve[i].t, scan_start, scan_end) && curve[i].value > threshold;
    };
    std::size_t lo = *peak;
    while (lo > 0 && hot(lo - 1) && curve[lo].t - curve[lo - 1].t <= 1.5 * dt) --lo;
    std::size_t hi = *peak;
    while (hi + 1 < curve.size() && hot(hi + 1) && curve[hi + 1].t - curve[hi].t <= 1.5 * dt) ++hi;

    return RedZone{curve[lo].t, curve[hi].t + dt, curve[*peak].value / baseline, baseline};
}

std::optional<double> peak_ratio(const Curve& curve, double baseline, std::optional<double> scan_start,
                                 std::optional<double> scan_end) {
    if (!(baseline > 0.0)) throw DomainError("baseline must be > 0");
    std::optional<double> peak;
    for (const auto& p : curve) {
        if (!in_window(p.t, scan_start, scan_end)) continue;
        if (!peak || p.value > *peak) peak = p.value;
    }
    if (!peak) return std::nullopt;
    return *peak / baseline;
}

double lifetime_extension(double trdd_1, double trdd_2) {
    if (!(trdd_1 > 0.0) || !std::isfinite(trdd_1) || !std::isfinite(trdd_2)) {
        throw DomainError("lifetime extension needs finite trdd_1 > 0");
    }
    return (trdd_2 - trdd_1) / trdd_1;
}

std::optional<double> decision_margin(double tdt, std::optional<double> dp) {
    if (!dp) return std::nullopt;
    return tdt - *dp;
}

std::vector<SweepRow> delta_sweep(const SystemConfig& base, std::span<const double> deltas,
                                  const Policy& policy, const SimConfig& sim) {
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0) || !std::isfinite(deltas[i])) throw DomainError("sweep deltas must be > 0");
        if (i > 0 && !(deltas[i] > deltas[i - 1])) throw DomainError("sweep deltas must be increasing");
    }
    SimConfig run = sim;
    run.hazard_curve = true;
    const double scan_start = sim.red_zone.scan_start.value_or(base.hazard.wearout_onset());
    const double baseline = sim.red_zone.baseline.value_or(base.hazard.useful_rate());

    std::vector<SweepRow> rows;
    for (double delta : deltas) {
        SystemConfig cfg = base;
        cfg.unit_lifetime = LifetimeDistribution::lognormal(base.unit_lifetime.mean(), delta);
        const Metrics m = run_ensemble(cfg, policy, run);
        SweepRow row{delta, red_zone_condition(delta, base.hazard.phases().wearout), m.red_zone.has_value(),
                     std::nullopt, std::nullopt, m.red_zone};
        if (!m.hazard_curve.empty()) {
            row.severity = peak_ratio(m.hazard_curve, baseline, scan_start, sim.red_zone.scan_end);
        }
        if (m.trdd) row.trdd_mean = m.trdd->mean;
        rows.push_back(std::move(row));
    }
    return rows;
}

ComparisonReport compare_policies(const SystemConfig& config, const Policy& type2, const SimConfig& sim) {
    if (type2.kind != PolicyKind::type2) {
        throw ConfigError("comparison needs a type2 policy", "policy.kind");
    }
    Policy type1 = type2;
    type1.kind = PolicyKind::type1;
    type1.rotation_period = 0.0;

    ComparisonReport report{run_ensemble(config, type1, sim), run_ensemble(config, type2, sim), {}, {}, {}};
    if (report.type1.trdd && report.type2.trdd && report.type1.trdd->mean > 0.0) {
        report.extension_ratio = lifetime_extension(report.type1.trdd->mean, report.type2.trdd->mean);
    }
    if (report.type1.tdr) report.tdr_1 = report.type1.tdr->mean;
    if (report.type2.tdr) report.tdr_2 = report.type2.tdr->mean;
    return report;
}

ScenarioAnalysis analyze_scenario(const SystemConfig& config, std::optional<double> delta, double dt,
                                  const RedZoneOptions& options) {
    ScenarioAnalysis out{scenario_timeline(config, delta), {}, std::nullopt};
    out.curve = system_hazard_curve(out.timeline, config, dt);
    if (!out.curve.empty()) {
        out.red_zone = detect_red_zone(out.curve, options.baseline.value_or(config.hazard.useful_rate()),
                                       options.k, options.scan_start.value_or(out.timeline.t0),
                                       options.scan_end.value_or(out.timeline.terminal_wearout_start));
    }
    return out;
}

}  // namespace redzone
