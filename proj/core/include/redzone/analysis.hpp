#pragma once

// Red-zone detection, lifetime-extension and decision-margin metrics, and
// delta sweeps.

#include <optional>
#include <span>
#include <vector>

#include "redzone/curve.hpp"
#include "redzone/maintenance.hpp"
#include "redzone/montecarlo.hpp"
#include "redzone/system.hpp"

namespace redzone {

/**
 * Contiguous run of grid points with h > k * baseline that contains the
 * highest such point, restricted to the window [scan_start, scan_end). A gap
 * wider than 1.5 grid steps breaks a run; `end` is the last point plus one
 * step. Returns none when no point in the window exceeds the threshold.
 */
std::optional<RedZone> detect_red_zone(const Curve& curve, double baseline, double k,
                                       std::optional<double> scan_start = std::nullopt,
                                       std::optional<double> scan_end = std::nullopt);

// max h / baseline over the window; none if the window holds no points.
std::optional<double> peak_ratio(const Curve& curve, double baseline,
                                 std::optional<double> scan_start = std::nullopt,
                                 std::optional<double> scan_end = std::nullopt);

// (trdd_2 - trdd_1) / trdd_1.
double lifetime_extension(double trdd_1, double trdd_2);

// Tdr = Tdt - DP, absent when DP is.
std::optional<double> decision_margin(double tdt, std::optional<double> dp);

struct SweepRow {
    double delta;
    bool predicted;  // delta < Th3
    bool detected;
    std::optional<double> severity;  // peak ratio over the scan window
    std::optional<double> trdd_mean;
    std::optional<RedZone> red_zone;
};

// One ensemble per lifetime spread delta (lognormal sd), all from the same
// master seed. Deltas must be > 0 and increasing.
std::vector<SweepRow> delta_sweep(const SystemConfig& base, std::span<const double> deltas,
                                  const Policy& policy, const SimConfig& sim);

struct ComparisonReport {
    Metrics type1;
    Metrics type2;
    std::optional<double> extension_ratio;  // from mean Trdd
    std::optional<double> tdr_1;
    std::optional<double> tdr_2;
};

// Runs Type_1 and the given Type_2 policy from the same master seed.
ComparisonReport compare_policies(const SystemConfig& config, const Policy& type2, const SimConfig& sim);

struct ScenarioAnalysis {
    ScenarioTimeline timeline;
    Curve curve;
    std::optional<RedZone> red_zone;  // scanned over [T0, terminal wear-out start)
};

ScenarioAnalysis analyze_scenario(const SystemConfig& config, std::optional<double> delta, double dt,
                                  const RedZoneOptions& options = {});

}  // namespace redzone
