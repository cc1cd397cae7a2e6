#include "redzone/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "redzone/error.hpp"

namespace redzone::cli {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError("expected an object", path.empty() ? "$" : path);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    require_object(j, path);
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError("unknown key", join(path, key));
    }
}

std::optional<double> opt_number(const json& j, const std::string& path, std::string_view key) {
    auto it = j.find(std::string(key));
    if (it == j.end()) return std::nullopt;
    if (!it->is_number()) throw ConfigError("expected a number", join(path, key));
    return it->get<double>();
}

double number(const json& j, const std::string& path, std::string_view key, double fallback) {
    return opt_number(j, path, key).value_or(fallback);
}

std::optional<std::uint64_t> opt_unsigned(const json& j, const std::string& path, std::string_view key) {
    auto it = j.find(std::string(key));
    if (it == j.end()) return std::nullopt;
    if (!it->is_number_unsigned()) throw ConfigError("expected a non-negative integer", join(path, key));
    return it->get<std::uint64_t>();
}

std::optional<std::string> opt_string(const json& j, const std::string& path, std::string_view key) {
    auto it = j.find(std::string(key));
    if (it == j.end()) return std::nullopt;
    if (!it->is_string()) throw ConfigError("expected a string", join(path, key));
    return it->get<std::string>();
}

const json* opt_object(const json& j, const std::string& path, std::string_view key) {
    auto it = j.find(std::string(key));
    if (it == j.end() || it->is_null()) return nullptr;
    require_object(*it, join(path, key));
    return &*it;
}

// Re-raises a model validation error with the document path prepended.
template <typename F>
auto scoped(const std::string& prefix, F&& make) {
    try {
        return make();
    } catch (const ConfigError& e) {
        throw ConfigError(e.detail(), e.path().empty() ? prefix : join(prefix, e.path()));
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), prefix);
    }
}

BathtubModel parse_hazard(const json& j) {
    const std::string p = "hazard";
    check_keys(j, p, {"useful_rate", "burnin", "wearout", "phases_weeks", "clamp_fraction"});
    const BathtubModel d = default_bathtub();
    auto term = [&](std::string_view key, const WeibullTerm& fallback) {
        const json* t = opt_object(j, p, key);
        if (!t) return fallback;
        const std::string tp = join(p, key);
        check_keys(*t, tp, {"scale", "shape"});
        return scoped(tp, [&] {
            return WeibullTerm(number(*t, tp, "scale", fallback.scale()), number(*t, tp, "shape", fallback.shape()));
        });
    };
    const WeibullTerm burnin = term("burnin", d.burnin());
    const WeibullTerm wearout = term("wearout", d.wearout());
    PhaseDurations phases = d.phases();
    if (const json* ph = opt_object(j, p, "phases_weeks")) {
        const std::string pp = join(p, "phases_weeks");
        check_keys(*ph, pp, {"burnin", "useful", "wearout"});
        phases = {number(*ph, pp, "burnin", phases.burnin), number(*ph, pp, "useful", phases.useful),
                  number(*ph, pp, "wearout", phases.wearout)};
    }
    return scoped(p, [&] {
        return BathtubModel(number(j, p, "useful_rate", d.useful_rate()), burnin, wearout, phases,
                            number(j, p, "clamp_fraction", BathtubModel::kDefaultClampFraction));
    });
}

SoftwareHazardModel parse_software(const json& j) {
    const std::string p = "software";
    check_keys(j, p, {"steady_floor", "update_amplitude", "update_decay_tau_weeks", "upgrade_events"});
    std::vector<UpgradeEvent> upgrades;
    if (auto it = j.find("upgrade_events"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("expected an array", join(p, "upgrade_events"));
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string ep = join(p, "upgrade_events") + "[" + std::to_string(i) + "]";
            const json& e = (*it)[i];
            check_keys(e, ep, {"time_weeks", "kind", "pulse_amplitude", "pulse_decay_tau_weeks"});
            const auto time = opt_number(e, ep, "time_weeks");
            if (!time) throw ConfigError("required", join(ep, "time_weeks"));
            const std::string kind = opt_string(e, ep, "kind").value_or("minor");
            if (kind != "minor" && kind != "major") {
                throw ConfigError("expected \"minor\" or \"major\"", join(ep, "kind"));
            }
            upgrades.push_back({*time, kind == "minor" ? UpgradeEvent::Kind::minor : UpgradeEvent::Kind::major,
                                number(e, ep, "pulse_amplitude", 0.0), number(e, ep, "pulse_decay_tau_weeks", 0.0)});
        }
    }
    // The model reports its own "software.<field>" paths.
    return SoftwareHazardModel(number(j, p, "steady_floor", 0.0), number(j, p, "update_amplitude", 0.0),
                               number(j, p, "update_decay_tau_weeks", 0.0), std::move(upgrades));
}

LifetimeDistribution parse_lifetime(const json& j, const std::string& p) {
    check_keys(j, p, {"distribution", "mean_weeks", "sd_weeks"});
    const std::string dist = opt_string(j, p, "distribution").value_or("lognormal");
    const double mean = number(j, p, "mean_weeks", 220.0);
    if (!(mean > 0.0) || !std::isfinite(mean)) throw ConfigError("must be > 0", join(p, "mean_weeks"));
    if (dist == "lognormal") {
        const double sd = number(j, p, "sd_weeks", 4.0);
        if (!(sd >= 0.0) || !std::isfinite(sd)) throw ConfigError("must be >= 0", join(p, "sd_weeks"));
        return LifetimeDistribution::lognormal(mean, sd);
    }
    if (dist == "exponential") {
        if (j.contains("sd_weeks")) throw ConfigError("not used by the exponential distribution", join(p, "sd_weeks"));
        return LifetimeDistribution::exponential(mean);
    }
    throw ConfigError("expected \"lognormal\" or \"exponential\"", join(p, "distribution"));
}

void parse_system(const json& j, RunConfig& rc) {
    const std::string p = "system";
    check_keys(j, p, {"active_units", "spares", "shelf_aging_factor", "lab_burnin_weeks", "warranty_weeks",
                      "lifetime"});
    SystemConfig& s = rc.system;
    if (auto v = opt_unsigned(j, p, "active_units")) s.active_units = static_cast<int>(std::min<std::uint64_t>(*v, 99));
    if (auto v = opt_unsigned(j, p, "spares")) s.spares = static_cast<int>(std::min<std::uint64_t>(*v, 99));
    s.shelf_aging_factor = number(j, p, "shelf_aging_factor", s.shelf_aging_factor);
    s.lab_burnin = number(j, p, "lab_burnin_weeks", s.lab_burnin);
    s.warranty = number(j, p, "warranty_weeks", s.warranty);
    if (const json* lt = opt_object(j, p, "lifetime")) s.unit_lifetime = parse_lifetime(*lt, join(p, "lifetime"));
}

void parse_policy(const json& j, RunConfig& rc) {
    const std::string p = "policy";
    check_keys(j, p, {"kind", "rotation_period_weeks", "dp_warn_factor", "vendor_mtbf_weeks"});
    if (auto k = opt_string(j, p, "kind")) {
        rc.policy_kind = scoped("", [&] { return policy_kind_from_string(*k); });
    }
    if (auto it = j.find("rotation_period_weeks"); it != j.end()) {
        if (it->is_string() && it->get<std::string>() == "auto") {
            rc.rotation_auto = true;
        } else if (it->is_number()) {
            rc.rotation_period = it->get<double>();
        } else {
            throw ConfigError("expected a number or \"auto\"", join(p, "rotation_period_weeks"));
        }
    }
    rc.dp_warn_factor = number(j, p, "dp_warn_factor", rc.dp_warn_factor);
    rc.vendor_mtbf = opt_number(j, p, "vendor_mtbf_weeks");
}

void parse_simulation(const json& j, RunConfig& rc) {
    const std::string p = "simulation";
    check_keys(j, p, {"replications", "seed", "horizon_weeks", "dt_event_weeks", "bin_width_weeks",
                      "curve_dt_weeks", "threads"});
    SimConfig& s = rc.simulation;
    if (auto v = opt_unsigned(j, p, "replications")) s.replications = *v;
    if (auto v = opt_unsigned(j, p, "seed")) s.master_seed = *v;
    s.horizon = opt_number(j, p, "horizon_weeks");
    s.dt_event = number(j, p, "dt_event_weeks", s.dt_event);
    s.bin_width = number(j, p, "bin_width_weeks", s.bin_width);
    s.curve_dt = number(j, p, "curve_dt_weeks", s.curve_dt);
    if (auto v = opt_unsigned(j, p, "threads")) s.threads = static_cast<unsigned>(std::min<std::uint64_t>(*v, 1024));
}

void parse_analysis(const json& j, RunConfig& rc) {
    const std::string p = "analysis";
    check_keys(j, p, {"threshold_k", "baseline", "scan_start_weeks", "scan_end_weeks", "scenario_dt_weeks",
                      "stagger_weeks", "sweep_delta_fractions"});
    auto& rz = rc.simulation.red_zone;
    rz.k = number(j, p, "threshold_k", rz.k);
    rz.baseline = opt_number(j, p, "baseline");
    rz.scan_start = opt_number(j, p, "scan_start_weeks");
    rz.scan_end = opt_number(j, p, "scan_end_weeks");
    rc.scenario_dt = number(j, p, "scenario_dt_weeks", rc.scenario_dt);
    rc.stagger = opt_number(j, p, "stagger_weeks");
    if (auto it = j.find("sweep_delta_fractions"); it != j.end()) {
        const std::string fp = join(p, "sweep_delta_fractions");
        if (!it->is_array()) throw ConfigError("expected an array", fp);
        rc.sweep_fractions.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& v = (*it)[i];
            if (!v.is_number() || !(v.get<double>() > 0.0)) {
                throw ConfigError("expected a number > 0", fp + "[" + std::to_string(i) + "]");
            }
            if (i > 0 && !(v.get<double>() > rc.sweep_fractions.back())) {
                throw ConfigError("must be increasing", fp + "[" + std::to_string(i) + "]");
            }
            rc.sweep_fractions.push_back(v.get<double>());
        }
    }
}

void validate(const RunConfig& rc) {
    rc.system.validate();
    rc.simulation.validate();
    if (!(rc.scenario_dt > 0.0)) throw ConfigError("must be > 0", "analysis.scenario_dt_weeks");
    if (rc.stagger && !(*rc.stagger >= 0.0)) throw ConfigError("must be >= 0", "analysis.stagger_weeks");
    if (rc.rotation_period && !(*rc.rotation_period > 0.0)) {
        throw ConfigError("must be > 0", "policy.rotation_period_weeks");
    }
    if (rc.policy_kind == PolicyKind::type2) rc.policy(PolicyKind::type2).validate();
    Policy probe = rc.policy(PolicyKind::type1);
    probe.validate();
}

// ---------------------------------------------------------------------------
// Output helpers

void append_double(std::string& out, double v) { out += format_double(v); }

void append_optional(std::string& out, const std::optional<double>& v) {
    if (v) append_double(out, *v);
}

ordered_json summary_json(const std::optional<Summary>& s) {
    if (!s) return nullptr;
    ordered_json j;
    j["mean"] = s->mean;
    j["std"] = s->std;
    j["ci95"] = {s->ci95_low, s->ci95_high};
    j["count"] = s->count;
    return j;
}

ordered_json red_zone_json(const std::optional<RedZone>& rz) {
    if (!rz) return nullptr;
    ordered_json j;
    j["start"] = rz->start;
    j["end"] = rz->end;
    j["severity"] = rz->severity;
    j["baseline"] = rz->baseline;
    return j;
}

ordered_json optional_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

ordered_json metrics_json(const Metrics& m) {
    ordered_json j;
    j["trdd_weeks"] = summary_json(m.trdd);
    j["tdt_weeks"] = summary_json(m.tdt);
    j["dp_weeks"] = summary_json(m.dp);
    j["tdr_weeks"] = summary_json(m.tdr);
    j["red_zone"] = red_zone_json(m.red_zone);
    j["censored_count"] = m.censored_count;
    j["usable"] = m.usable;
    return j;
}

}  // namespace

RunConfig::RunConfig() : system(default_system_config()) {}

Policy RunConfig::policy(PolicyKind kind) const {
    Policy p;
    p.kind = kind;
    p.dp_warn_factor = dp_warn_factor;
    p.vendor_mtbf = vendor_mtbf;
    if (kind == PolicyKind::type2) {
        if (rotation_auto) {
            p.rotation_period = default_rotation_period(system.unit_lifetime.mean());
        } else if (rotation_period) {
            p.rotation_period = *rotation_period;
        } else {
            throw ConfigError("required for type2 (a number of weeks or \"auto\")", "policy.rotation_period_weeks");
        }
    }
    return p;
}

RunConfig parse_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what(), "$");
    }
    check_keys(doc, "", {"schema_version", "hazard", "software", "operator", "system", "policy", "simulation",
                         "analysis"});
    const auto version = doc.find("schema_version");
    if (version == doc.end()) throw ConfigError("required", "schema_version");
    if (!version->is_number_integer() || version->get<std::int64_t>() != kSchemaVersion) {
        throw ConfigError("unsupported version (expected " + std::to_string(kSchemaVersion) + ")", "schema_version");
    }

    RunConfig rc;
    if (const json* h = opt_object(doc, "", "hazard")) rc.system.hazard = parse_hazard(*h);
    if (const json* s = opt_object(doc, "", "system")) parse_system(*s, rc);
    if (const json* s = opt_object(doc, "", "software")) rc.system.software = parse_software(*s);
    if (const json* o = opt_object(doc, "", "operator")) {
        check_keys(*o, "operator", {"rate"});
        rc.system.operator_hazard = scoped("", [&] { return OperatorHazard(number(*o, "operator", "rate", 0.0)); });
    }
    if (const json* p = opt_object(doc, "", "policy")) parse_policy(*p, rc);
    if (const json* s = opt_object(doc, "", "simulation")) parse_simulation(*s, rc);
    if (const json* a = opt_object(doc, "", "analysis")) parse_analysis(*a, rc);
    validate(rc);
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string(), "$");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string hazard_csv(const RunConfig& config, double t_max, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("--dt must be > 0");
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw DomainError("--t-max must be >= 0");
    const auto& sys = config.system;
    std::string out = "t_weeks,h_hardware,h_software,h_operate,h_system\n";
    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double hw = sys.hazard.hazard(t);
        const double sw = sys.software ? sys.software->hazard(t) : 0.0;
        const double op = sys.operator_hazard ? sys.operator_hazard->rate : 0.0;
        const double total = hw + sw + op;
        if (!std::isfinite(total)) throw std::runtime_error("non-finite hazard at t = " + format_double(t));
        append_double(out, t);
        out += ',';
        append_double(out, hw);
        out += ',';
        append_double(out, sw);
        out += ',';
        append_double(out, op);
        out += ',';
        append_double(out, total);
        out += '\n';
    }
    return out;
}

ScenarioOutput scenario_csv(const ScenarioAnalysis& analysis) {
    const auto& rz = analysis.red_zone;
    auto in_zone = [&](double a, double b) { return rz && a < rz->end && b > rz->start; };

    ScenarioOutput out;
    out.segments_csv = "t_start_weeks,t_end_weeks,composition,active_units,phases,markers,red_zone\n";
    for (const auto& seg : analysis.timeline.segments) {
        std::string units, phases, markers;
        for (std::size_t i = 0; i < seg.active.size(); ++i) {
            if (i > 0) {
                units += ';';
                phases += ';';
            }
            units += to_string(seg.active[i].id);
            phases += to_string(seg.active[i].phase);
        }
        for (std::size_t i = 0; i < seg.markers.size(); ++i) {
            if (i > 0) markers += ';';
            markers += seg.markers[i];
        }
        auto& s = out.segments_csv;
        append_double(s, seg.t_start);
        s += ',';
        append_double(s, seg.t_end);
        s += ',' + to_string(seg.composition) + ',' + units + ',' + phases + ',' + markers + ',';
        s += in_zone(seg.t_start, seg.t_end) ? "1\n" : "0\n";
    }

    out.curve_csv = "t_weeks,h_system,red_zone\n";
    const double dt = analysis.curve.size() > 1 ? analysis.curve[1].t - analysis.curve[0].t : 0.0;
    for (const auto& p : analysis.curve) {
        append_double(out.curve_csv, p.t);
        out.curve_csv += ',';
        append_double(out.curve_csv, p.value);
        out.curve_csv += in_zone(p.t, p.t + dt) && p.t >= rz->start ? ",1\n" : ",0\n";
    }
    return out;
}

std::string simulate_json(const Policy& policy, const SimConfig& sim, const Metrics& metrics) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "simulate";
    j["policy"] = to_string(policy.kind);
    if (policy.kind == PolicyKind::type2) j["rotation_period_weeks"] = policy.rotation_period;
    j["seed"] = sim.master_seed;
    j["replications"] = sim.replications;
    const ordered_json body = metrics_json(metrics);
    for (const auto& [key, value] : body.items()) j[key] = value;
    return j.dump(2) + "\n";
}

std::string events_csv(const Metrics& metrics) {
    std::string out = "replication,seed,time_weeks,event,unit,slot\n";
    for (std::size_t r = 0; r < metrics.traces.size(); ++r) {
        const auto& tr = metrics.traces[r];
        for (const auto& e : tr.events) {
            out += std::to_string(r) + ',' + std::to_string(tr.seed) + ',';
            append_double(out, e.time);
            out += ',' + to_string(e.kind) + ',';
            if (e.unit) out += to_string(*e.unit);
            out += ',';
            if (e.slot) out += std::to_string(*e.slot + 1);
            out += '\n';
        }
    }
    return out;
}

std::string compare_json(const Policy& type2, const SimConfig& sim, const ComparisonReport& report) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "compare";
    j["seed"] = sim.master_seed;
    j["replications"] = sim.replications;
    j["rotation_period_weeks"] = type2.rotation_period;
    j["extension_ratio"] = optional_json(report.extension_ratio);
    j["tdr_1_weeks"] = optional_json(report.tdr_1);
    j["tdr_2_weeks"] = optional_json(report.tdr_2);
    j["type1"] = metrics_json(report.type1);
    j["type2"] = metrics_json(report.type2);
    return j.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows, double th3) {
    std::string out =
        "delta_weeks,delta_over_th3,predicted,detected,severity,red_zone_start_weeks,red_zone_end_weeks,"
        "trdd_mean_weeks\n";
    for (const auto& r : rows) {
        append_double(out, r.delta);
        out += ',';
        append_double(out, r.delta / th3);
        out += r.predicted ? ",1" : ",0";
        out += r.detected ? ",1," : ",0,";
        append_optional(out, r.severity);
        out += ',';
        if (r.red_zone) append_double(out, r.red_zone->start);
        out += ',';
        if (r.red_zone) append_double(out, r.red_zone->end);
        out += ',';
        append_optional(out, r.trdd_mean);
        out += '\n';
    }
    return out;
}

std::filesystem::path curve_path_for(const std::filesystem::path& out) {
    auto p = out;
    p.replace_extension(".curve.csv");
    return p;
}

}  // namespace redzone::cli
