#include "redzone/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "redzone/analysis.hpp"
#include "redzone/error.hpp"

namespace redzone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kBlockSize = 256;

int kind_rank(EventKind kind) {
    switch (kind) {
        case EventKind::failure:
            return 0;
        case EventKind::replace:
            return 1;
        case EventKind::rotate:
            return 2;
        case EventKind::dp:
            return 3;
        case EventKind::system_death:
            return 4;
    }
    return 5;
}

}  // namespace

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::failure:
            return "failure";
        case EventKind::replace:
            return "replace";
        case EventKind::rotate:
            return "rotate";
        case EventKind::dp:
            return "dp";
        case EventKind::system_death:
            return "system_death";
    }
    return "unknown";
}

void SimConfig::validate() const {
    if (replications < 1) throw ConfigError("must be >= 1", "simulation.replications");
    if (horizon && (!(*horizon > 0.0) || !std::isfinite(*horizon))) {
        throw ConfigError("must be > 0", "simulation.horizon_weeks");
    }
    if (!(dt_event > 0.0)) throw ConfigError("must be > 0", "simulation.dt_event_weeks");
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
        throw ConfigError("must be > 0", "simulation.bin_width_weeks");
    }
    if (!(curve_dt > 0.0) || !std::isfinite(curve_dt)) {
        throw ConfigError("must be > 0", "simulation.curve_dt_weeks");
    }
    if (!(red_zone.k > 1.0) || !std::isfinite(red_zone.k)) {
        throw ConfigError("must be > 1", "analysis.threshold_k");
    }
    if (red_zone.baseline && !(*red_zone.baseline > 0.0)) {
        throw ConfigError("must be > 0", "analysis.baseline");
    }
}

double SimConfig::horizon_for(const SystemConfig& system) const {
    return horizon.value_or(5.0 * system.unit_lifetime.mean());
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication_index) {
    std::uint64_t z = master_seed + (replication_index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Event loop

namespace {

class Simulation {
  public:
    Simulation(const SystemConfig& cfg, const Policy& pol, std::span<const double> lifetimes,
               const SimConfig& sim)
        : cfg_(cfg), pol_(pol), alpha_(cfg.shelf_aging_factor), horizon_(sim.horizon_for(cfg)) {
        const auto n = static_cast<std::size_t>(cfg.active_units + cfg.spares);
        if (lifetimes.size() < n) {
            throw DomainError("need one lifetime per unit");
        }
        const double mu = cfg.unit_lifetime.mean();
        for (std::size_t i = 0; i < n; ++i) {
            if (!(lifetimes[i] > 0.0) || !std::isfinite(lifetimes[i])) {
                throw DomainError("unit lifetimes must be finite and > 0");
            }
            Unit u;
            u.id = static_cast<UnitId>(i);
            u.lifetime = lifetimes[i];
            u.wearout_shift = lifetimes[i] - mu;
            if (i < static_cast<std::size_t>(cfg.active_units)) {
                slots_[i] = i;
            } else {
                u.status = UnitStatus::on_shelf;
                u.lab_burnin_credit = cfg.lab_burnin;
                shelf_ = i;
            }
            units_.push_back(u);
            trace_.lifetimes.push_back(lifetimes[i]);
        }
    }

    Trace run() {
        open_interval();
        if (cfg_.active_units < 2) {
            trace_.trdd = 0.0;
            trdd_set_ = true;
        }
        check_dp();
        for (;;) {
            const double tf = next_failure();
            const double tr = next_rotation();
            const double tn = std::min(tf, tr);
            if (tn > horizon_) {
                advance_all(horizon_);
                trace_.censored = true;
                trace_.tdt = horizon_;
                if (!trdd_set_) trace_.trdd = horizon_;
                close_interval();
                break;
            }
            step(tn, tf == tn, tr == tn);
            if (unfailed_in_slots() == 0) {
                trace_.tdt = t_;
                trace_.events.push_back({t_, EventKind::system_death, std::nullopt, std::nullopt});
                break;
            }
        }
        if (pol_.kind == PolicyKind::type1) add_type1_dp();
        return std::move(trace_);
    }

  private:
    double failure_time(std::size_t i) const {
        const Unit& u = units_[i];
        if (u.status == UnitStatus::failed) return kInf;
        const double rate = u.status == UnitStatus::in_slot ? 1.0 : alpha_;
        if (rate == 0.0) return kInf;
        const double remaining = u.lifetime - consumed_life(u, alpha_);
        return t_ + std::max(0.0, remaining) / rate;
    }

    double next_failure() const {
        double tf = kInf;
        for (std::size_t i = 0; i < units_.size(); ++i) tf = std::min(tf, failure_time(i));
        return tf;
    }

    double next_rotation() const {
        if (pol_.kind != PolicyKind::type2 || !shelf_ready()) return kInf;
        return static_cast<double>(epoch_) * pol_.rotation_period;
    }

    bool shelf_ready() const { return shelf_ && units_[*shelf_].status != UnitStatus::failed; }

    int unfailed_in_slots() const {
        int n = 0;
        for (const auto& s : slots_) {
            if (s && units_[*s].status != UnitStatus::failed) ++n;
        }
        return n;
    }

    void advance_all(double t) {
        for (auto& u : units_) {
            if (u.status != UnitStatus::failed) u = advance(u, t);
        }
        t_ = t;
    }

    SystemState snapshot() const {
        SystemState s;
        s.time = t_;
        s.slot_count = cfg_.active_units;
        for (const auto& u : units_) {
            s.units.push_back({u.id, effective_age(u, alpha_), u.status == UnitStatus::failed});
        }
        s.slots = slots_;
        s.shelf = shelf_;
        return s;
    }

    void step(double tn, bool failures, bool rotation) {
        std::vector<double> due(units_.size());
        for (std::size_t i = 0; i < units_.size(); ++i) due[i] = failure_time(i);
        advance_all(tn);
        bool reconfigured = false;

        std::vector<int> failed_slots;
        if (failures) {
            for (int s = 0; s < cfg_.active_units; ++s) {
                const auto idx = slots_[static_cast<std::size_t>(s)];
                if (idx && units_[*idx].status != UnitStatus::failed && due[*idx] <= tn) {
                    units_[*idx].status = UnitStatus::failed;
                    trace_.events.push_back({t_, EventKind::failure, units_[*idx].id, s});
                    failed_slots.push_back(s);
                }
            }
            if (shelf_ && units_[*shelf_].status != UnitStatus::failed && due[*shelf_] <= tn) {
                units_[*shelf_].status = UnitStatus::failed;
                trace_.events.push_back({t_, EventKind::failure, units_[*shelf_].id, std::nullopt});
                shelf_.reset();
            }
            for (int s : failed_slots) {
                reconfigured = true;
                if (auto action = plan_type1(snapshot(), s)) {
                    slots_[static_cast<std::size_t>(s)] = shelf_;
                    units_[*shelf_].status = UnitStatus::in_slot;
                    shelf_.reset();
                    trace_.events.push_back({t_, EventKind::replace, action->unit_in, s});
                } else {
                    slots_[static_cast<std::size_t>(s)].reset();
                }
            }
        }
        if (rotation) {
            ++epoch_;
            if (auto action = plan_type2(snapshot(), t_)) {
                auto& slot = slots_[static_cast<std::size_t>(action->slot)];
                const std::size_t out = *slot;
                slot = shelf_;
                units_[*shelf_].status = UnitStatus::in_slot;
                units_[out].status = UnitStatus::on_shelf;
                shelf_ = out;
                trace_.events.push_back({t_, EventKind::rotate, action->unit_in, action->slot});
                reconfigured = true;
            }
        }
        if (reconfigured) {
            close_interval();
            if (unfailed_in_slots() > 0) open_interval();
        }
        if (!trdd_set_ && unfailed_in_slots() < 2 && !shelf_ready()) {
            trace_.trdd = t_;
            trdd_set_ = true;
        }
        check_dp();
    }

    void check_dp() {
        if (pol_.kind != PolicyKind::type2 || trace_.dp) return;
        if (cfg_.active_units == 2 && unfailed_in_slots() == 2 && !shelf_ready()) {
            trace_.dp = t_;
            trace_.events.push_back({t_, EventKind::dp, std::nullopt, std::nullopt});
        }
    }

    void add_type1_dp() {
        const double mtbf = pol_.vendor_mtbf.value_or(cfg_.unit_lifetime.mean());
        const double dp = decision_point_type1(0.0, mtbf, pol_.dp_warn_factor).time;
        if (dp > trace_.tdt) return;
        trace_.dp = dp;
        auto pos = std::find_if(trace_.events.begin(), trace_.events.end(), [&](const TraceEvent& e) {
            return e.time > dp || (e.time == dp && kind_rank(e.kind) > kind_rank(EventKind::dp));
        });
        trace_.events.insert(pos, TraceEvent{dp, EventKind::dp, std::nullopt, std::nullopt});
    }

    void open_interval() {
        ConfigurationInterval iv{t_, t_, {}, shelf_ready()};
        for (const auto& s : slots_) {
            if (!s || units_[*s].status == UnitStatus::failed) continue;
            const Unit& u = units_[*s];
            iv.units.push_back({u.id, effective_age(u, alpha_) + u.stagger, u.wearout_shift});
        }
        trace_.intervals.push_back(std::move(iv));
        open_ = true;
    }

    void close_interval() {
        if (!open_) return;
        trace_.intervals.back().t_end = t_;
        if (!(trace_.intervals.back().t_end > trace_.intervals.back().t_start)) {
            trace_.intervals.pop_back();
        }
        open_ = false;
    }

    const SystemConfig& cfg_;
    const Policy& pol_;
    double alpha_;
    double horizon_;
    double t_ = 0.0;
    std::size_t epoch_ = 1;
    std::vector<Unit> units_;
    std::array<std::optional<std::size_t>, 2> slots_;
    std::optional<std::size_t> shelf_;
    Trace trace_;
    bool trdd_set_ = false;
    bool open_ = false;
};

}  // namespace

Trace simulate_lifetimes(const SystemConfig& config, const Policy& policy,
                         std::span<const double> lifetimes, const SimConfig& sim) {
    config.validate();
    policy.validate();
    return Simulation(config, policy, lifetimes, sim).run();
}

Trace run_replication(const SystemConfig& config, const Policy& policy, std::uint64_t seed,
                      const SimConfig& sim) {
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(config.active_units + config.spares);
    std::array<double, 3> lifetimes{};
    for (std::size_t i = 0; i < n; ++i) lifetimes[i] = config.unit_lifetime.sample(rng.uniform());
    Trace trace = simulate_lifetimes(config, policy, std::span<const double>(lifetimes.data(), n), sim);
    trace.seed = seed;
    return trace;
}

// ---------------------------------------------------------------------------
// Per-trace hazard

namespace {

std::optional<double> interval_hazard(const ConfigurationInterval& iv, const SystemConfig& config,
                                      double t) {
    const auto& hz = config.hazard;
    const double elapsed = t - iv.t_start;
    std::array<UnitRisk, 2> risks{};
    std::size_t k = 0;
    for (const auto& u : iv.units) {
        const double age = u.hazard_age_at_start + elapsed;
        if (iv.units.size() == 1 && !iv.spare_available &&
            age >= std::max(0.0, hz.wearout_onset() + u.wearout_shift)) {
            return std::nullopt;
        }
        double h = hz.hazard(age, u.wearout_shift);
        double cum = hz.cumulative(age, u.wearout_shift) - hz.cumulative(u.hazard_age_at_start, u.wearout_shift);
        if (config.software) {
            h += config.software->hazard(t);
            cum += config.software->cumulative(t) - config.software->cumulative(iv.t_start);
        }
        if (config.operator_hazard) {
            h += config.operator_hazard->rate;
            cum += config.operator_hazard->rate * elapsed;
        }
        risks[k++] = {h, std::max(0.0, cum)};
    }
    if (k == 0) return std::nullopt;
    return compose_parallel(std::span<const UnitRisk>(risks.data(), k));
}

// Adds this trace's curve on the grid (i + 0.5) * dt into sum/count.
void accumulate_curve(const Trace& trace, const SystemConfig& config, double dt,
                      std::vector<double>& sum, std::vector<double>& count) {
    std::size_t iv = 0;
    for (std::size_t i = 0; i < sum.size(); ++i) {
        const double t = (static_cast<double>(i) + 0.5) * dt;
        if (!(t < trace.tdt)) break;
        while (iv < trace.intervals.size() && !(t < trace.intervals[iv].t_end)) ++iv;
        if (iv == trace.intervals.size()) break;
        if (t < trace.intervals[iv].t_start) continue;
        if (auto h = interval_hazard(trace.intervals[iv], config, t)) {
            sum[i] += *h;
            count[i] += 1.0;
        }
    }
}

}  // namespace

std::optional<double> trace_hazard(const Trace& trace, const SystemConfig& config, double t) {
    if (!(t >= 0.0) || !(t < trace.tdt)) return std::nullopt;
    auto it = std::upper_bound(trace.intervals.begin(), trace.intervals.end(), t,
                               [](double v, const ConfigurationInterval& iv) { return v < iv.t_end; });
    if (it == trace.intervals.end() || t < it->t_start) return std::nullopt;
    return interval_hazard(*it, config, t);
}

// ---------------------------------------------------------------------------
// Ensemble

std::optional<Summary> summarize(std::span<const double> values) {
    if (values.empty()) return std::nullopt;
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const double half = 1.96 * sd / std::sqrt(n);
    return Summary{mean, sd, mean - half, mean + half, values.size()};
}

Metrics run_ensemble(const SystemConfig& config, const Policy& policy, const SimConfig& sim) {
    config.validate();
    policy.validate();
    sim.validate();

    const std::size_t n = sim.replications;
    const double horizon = sim.horizon_for(config);
    const std::size_t grid = sim.hazard_curve
                                 ? static_cast<std::size_t>(std::ceil(horizon / sim.curve_dt - 0.5))
                                 : 0;
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;

    Metrics m;
    m.master_seed = sim.master_seed;
    m.replications.resize(n);
    if (sim.keep_traces) m.traces.resize(n);
    std::vector<std::vector<double>> block_sum(blocks), block_count(blocks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        try {
            for (std::size_t b = next++; b < blocks; b = next++) {
                std::vector<double> sum(grid, 0.0), count(grid, 0.0);
                const std::size_t end = std::min(n, (b + 1) * kBlockSize);
                for (std::size_t i = b * kBlockSize; i < end; ++i) {
                    Trace trace = run_replication(config, policy, derive_seed(sim.master_seed, i), sim);
                    auto& r = m.replications[i];
                    r.trdd = trace.trdd;
                    r.tdt = trace.tdt;
                    r.dp = trace.dp;
                    r.censored = trace.censored;
                    if (trace.dp && !trace.censored) r.tdr = trace.tdt - *trace.dp;
                    if (grid > 0) accumulate_curve(trace, config, sim.curve_dt, sum, count);
                    if (sim.keep_traces) m.traces[i] = std::move(trace);
                }
                block_sum[b] = std::move(sum);
                block_count[b] = std::move(count);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = blocks;
        }
    };

    unsigned threads = sim.threads ? sim.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    std::vector<double> trdd, tdt, dp, tdr;
    for (const auto& r : m.replications) {
        if (r.censored) {
            ++m.censored_count;
            continue;
        }
        trdd.push_back(r.trdd);
        tdt.push_back(r.tdt);
        if (r.dp) dp.push_back(*r.dp);
        if (r.tdr) tdr.push_back(*r.tdr);
    }
    m.usable = m.censored_count < n;
    m.trdd = summarize(trdd);
    m.tdt = summarize(tdt);
    m.dp = summarize(dp);
    m.tdr = summarize(tdr);

    if (grid > 0) {
        std::vector<double> sum(grid, 0.0), count(grid, 0.0);
        for (std::size_t b = 0; b < blocks; ++b) {
            for (std::size_t i = 0; i < grid; ++i) {
                sum[i] += block_sum[b][i];
                count[i] += block_count[b][i];
            }
        }
        for (std::size_t i = 0; i < grid; ++i) {
            if (count[i] > 0.0) {
                m.hazard_curve.push_back({(static_cast<double>(i) + 0.5) * sim.curve_dt, sum[i] / count[i]});
            }
        }
        if (!m.hazard_curve.empty()) {
            const auto& opt = sim.red_zone;
            m.red_zone = detect_red_zone(m.hazard_curve, opt.baseline.value_or(config.hazard.useful_rate()),
                                         opt.k, opt.scan_start.value_or(config.hazard.wearout_onset()),
                                         opt.scan_end);
        }
    }
    return m;
}

std::vector<HazardBin> empirical_hazard(std::span<const ReplicationResult> results, double bin_width) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
        throw DomainError("bin width must be > 0");
    }
    double t_max = 0.0;
    bool any_death = false;
    for (const auto& r : results) {
        t_max = std::max(t_max, r.tdt);
        any_death = any_death || !r.censored;
    }
    if (!any_death) {
        throw DomainError("empirical hazard needs at least one uncensored replication");
    }
    const auto bins = static_cast<std::size_t>(std::floor(t_max / bin_width)) + 1;
    std::vector<double> exposure(bins, 0.0);
    std::vector<std::size_t> deaths(bins, 0);
    for (const auto& r : results) {
        const auto last = std::min(bins - 1, static_cast<std::size_t>(std::floor(r.tdt / bin_width)));
        for (std::size_t j = 0; j < last; ++j) exposure[j] += bin_width;
        exposure[last] += r.tdt - static_cast<double>(last) * bin_width;
        if (!r.censored) ++deaths[last];
    }
    std::vector<HazardBin> out;
    for (std::size_t j = 0; j < bins; ++j) {
        if (!(exposure[j] > 0.0)) continue;
        const double d = static_cast<double>(deaths[j]);
        out.push_back({(static_cast<double>(j) + 0.5) * bin_width, d / exposure[j], std::sqrt(d) / exposure[j],
                       deaths[j], exposure[j]});
    }
    return out;
}

}  // namespace redzone
