#pragma once

// Run configuration documents and the CSV/JSON emitters behind the `redzone`
// command-line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "redzone/analysis.hpp"
#include "redzone/maintenance.hpp"
#include "redzone/montecarlo.hpp"
#include "redzone/system.hpp"

namespace redzone::cli {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
    RunConfig();

    SystemConfig system;
    PolicyKind policy_kind = PolicyKind::type1;
    std::optional<double> rotation_period;  // weeks; "auto" resolves to mu / 6
    bool rotation_auto = false;
    double dp_warn_factor = 0.8;
    std::optional<double> vendor_mtbf;
    SimConfig simulation;
    double scenario_dt = 0.1;
    std::optional<double> stagger;  // scenario delta; lifetime sd when absent
    std::vector<double> sweep_fractions{0.1, 0.5, 1.0, 2.0, 4.0};  // multiples of Th3

    // Policy of the given kind; type2 needs a rotation period (ConfigError otherwise).
    Policy policy(PolicyKind kind) const;
};

// Parses and validates a JSON document. Throws ConfigError with a field path.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Shortest representation that round-trips to the same double.
std::string format_double(double v);

std::string hazard_csv(const RunConfig& config, double t_max, double dt);

struct ScenarioOutput {
    std::string segments_csv;
    std::string curve_csv;
};

ScenarioOutput scenario_csv(const ScenarioAnalysis& analysis);

std::string simulate_json(const Policy& policy, const SimConfig& sim, const Metrics& metrics);
std::string events_csv(const Metrics& metrics);
std::string compare_json(const Policy& type2, const SimConfig& sim, const ComparisonReport& report);
std::string sweep_csv(const std::vector<SweepRow>& rows, double th3);

// Derives "<stem>.curve.csv" next to `out`.
std::filesystem::path curve_path_for(const std::filesystem::path& out);

}  // namespace redzone::cli
