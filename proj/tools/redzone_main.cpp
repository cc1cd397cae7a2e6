// redzone: bathtub hazards, scenario curves, maintenance-policy simulation and
// red-zone sweeps for a two-controller + shelf-spare system.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "redzone/cli.hpp"
#include "redzone/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

const char* kFooter = R"(Configuration (JSON, schema/run_config.schema.json). Every section is optional
except "schema_version": 1. Defaults:
  hazard.useful_rate 0.001/wk, hazard.burnin {scale 0.018, shape 0.5},
  hazard.wearout {scale 1e-6, shape 3}, hazard.phases_weeks {burnin 20, useful 160, wearout 40}
  system {active_units 2, spares 1, shelf_aging_factor 0, lab_burnin_weeks 2, warranty_weeks 104,
          lifetime {distribution lognormal, mean_weeks 220, sd_weeks 4}}
  policy {kind type1, rotation_period_weeks (required for type2; number or "auto" = mean/6),
          dp_warn_factor 0.8, vendor_mtbf_weeks = lifetime mean}
  simulation {replications 1000, seed 1, horizon_weeks 5*mean, bin_width_weeks 20, curve_dt_weeks 1,
              threads 0 = all cores}
  analysis {threshold_k 2, baseline = hazard.useful_rate, scan_start_weeks = burnin + useful,
            scenario_dt_weeks 0.1, stagger_weeks = lifetime sd, sweep_delta_fractions [0.1,0.5,1,2,4]}
Unknown keys are rejected.)";

struct Options {
    std::string config;
    std::string out;
    std::string events;
    std::string policy;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replications;
    std::optional<unsigned> threads;
    std::optional<double> t_max;
    std::optional<double> dt;
};

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path);
}

redzone::cli::RunConfig load(const Options& o) {
    auto rc = o.config.empty() ? redzone::cli::RunConfig() : redzone::cli::load_run_config(o.config);
    for (const auto& w : rc.system.warnings()) std::cerr << "warning: " << w << '\n';
    return rc;
}

redzone::SimConfig sim_config(const redzone::cli::RunConfig& rc, const Options& o) {
    redzone::SimConfig sim = rc.simulation;
    if (o.seed) sim.master_seed = *o.seed;
    if (o.replications) sim.replications = *o.replications;
    if (o.threads) sim.threads = *o.threads;
    sim.validate();
    return sim;
}

redzone::PolicyKind policy_kind(const redzone::cli::RunConfig& rc, const Options& o) {
    return o.policy.empty() ? rc.policy_kind : redzone::policy_kind_from_string(o.policy);
}

int cmd_hazard(const Options& o) {
    const auto rc = load(o);
    const double t_max = o.t_max.value_or(2.0 * rc.system.unit_lifetime.mean());
    const double dt = o.dt.value_or(1.0);
    if (!(dt > 0.0)) throw redzone::ConfigError("must be > 0", "--dt");
    if (!(t_max >= 0.0)) throw redzone::ConfigError("must be >= 0", "--t-max");
    write_output(o.out, redzone::cli::hazard_csv(rc, t_max, dt));
    return kExitOk;
}

int cmd_scenario(const Options& o) {
    const auto rc = load(o);
    if (policy_kind(rc, o) != redzone::PolicyKind::type1) {
        throw redzone::ConfigError("scenario timelines are defined for type1 only", "--policy");
    }
    const double dt = o.dt.value_or(rc.scenario_dt);
    if (!(dt > 0.0)) throw redzone::ConfigError("must be > 0", "--dt");
    const auto analysis = redzone::analyze_scenario(rc.system, rc.stagger, dt, rc.simulation.red_zone);
    const auto csv = redzone::cli::scenario_csv(analysis);
    if (o.out.empty() || o.out == "-") {
        write_output("", csv.segments_csv + "\n" + csv.curve_csv);
    } else {
        write_output(o.out, csv.segments_csv);
        write_output(redzone::cli::curve_path_for(o.out).string(), csv.curve_csv);
    }
    return kExitOk;
}

int cmd_simulate(const Options& o) {
    const auto rc = load(o);
    auto sim = sim_config(rc, o);
    sim.keep_traces = !o.events.empty();
    const auto policy = rc.policy(policy_kind(rc, o));
    const auto metrics = redzone::run_ensemble(rc.system, policy, sim);
    write_output(o.out, redzone::cli::simulate_json(policy, sim, metrics));
    if (!o.events.empty()) write_output(o.events, redzone::cli::events_csv(metrics));
    return kExitOk;
}

int cmd_compare(const Options& o) {
    const auto rc = load(o);
    const auto sim = sim_config(rc, o);
    const auto type2 = rc.policy(redzone::PolicyKind::type2);
    const auto report = redzone::compare_policies(rc.system, type2, sim);
    write_output(o.out, redzone::cli::compare_json(type2, sim, report));
    return kExitOk;
}

int cmd_redzone(const Options& o) {
    const auto rc = load(o);
    const auto sim = sim_config(rc, o);
    const auto policy = rc.policy(policy_kind(rc, o));
    const double th3 = rc.system.hazard.phases().wearout;
    std::vector<double> deltas;
    for (double f : rc.sweep_fractions) deltas.push_back(f * th3);
    const auto rows = redzone::delta_sweep(rc.system, deltas, policy, sim);
    write_output(o.out, redzone::cli::sweep_csv(rows, th3));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reliability of a two-controller + shelf-spare system: hazards, red zone, maintenance policies"};
    app.footer(kFooter);
    app.require_subcommand(1);

    Options o;
    auto common = [&](CLI::App* sub, bool simulation) {
        sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output file (default: stdout)");
        if (simulation) {
            sub->add_option("--policy", o.policy, "Maintenance policy (overrides policy.kind)")
                ->check(CLI::IsMember({"type1", "type2"}));
            sub->add_option("--seed", o.seed, "Master seed (overrides simulation.seed)");
            sub->add_option("--replications", o.replications, "Replications (overrides simulation.replications)");
            sub->add_option("--threads", o.threads, "Worker threads, 0 = all cores (results do not depend on it)");
        }
    };

    auto* hazard = app.add_subcommand("hazard", "Per-component hazard curves as CSV");
    common(hazard, false);
    hazard->add_option("--t-max", o.t_max, "Last grid time in weeks (default 2 * lifetime mean)");
    hazard->add_option("--dt", o.dt, "Grid step in weeks (default 1)");

    auto* scenario = app.add_subcommand("scenario", "Deterministic type1 timeline segments and composed curve");
    common(scenario, false);
    scenario->add_option("--policy", o.policy, "Only type1 is supported")->check(CLI::IsMember({"type1", "type2"}));
    scenario->add_option("--dt", o.dt, "Curve grid step in weeks (default analysis.scenario_dt_weeks)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble summary as JSON");
    common(simulate, true);
    simulate->add_option("--events", o.events, "Also write every trace's events as CSV");

    auto* compare = app.add_subcommand("compare", "Type1 vs type2 from the same seed as JSON");
    common(compare, true);

    auto* redzone_cmd = app.add_subcommand("redzone", "Red-zone detection over a lifetime-spread sweep as CSV");
    common(redzone_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*hazard) return cmd_hazard(o);
        if (*scenario) return cmd_scenario(o);
        if (*simulate) return cmd_simulate(o);
        if (*compare) return cmd_compare(o);
        if (*redzone_cmd) return cmd_redzone(o);
    } catch (const redzone::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
