#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "../oracles.hpp"
#include "redzone/error.hpp"
#include "redzone/montecarlo.hpp"

using namespace redzone;

namespace {

// Reference splitmix64 step, written out independently.
std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

SystemConfig deterministic_config(double mu) {
    SystemConfig c = default_system_config();
    c.unit_lifetime = LifetimeDistribution::lognormal(mu, 0.0);
    return c;
}

SimConfig quiet_sim(std::size_t n = 1000) {
    SimConfig s;
    s.replications = n;
    s.threads = 1;
    s.hazard_curve = false;
    return s;
}

bool same_events(const Trace& a, const Trace& b) {
    if (a.events.size() != b.events.size()) return false;
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        const auto &x = a.events[i], &y = b.events[i];
        if (x.time != y.time || x.kind != y.kind || x.unit != y.unit || x.slot != y.slot) return false;
    }
    return true;
}

void check_trace_invariants(const Trace& tr, double tolerance) {
    for (std::size_t i = 1; i < tr.events.size(); ++i) ASSERT_LE(tr.events[i - 1].time, tr.events[i].time);
    EXPECT_LE(tr.trdd, tr.tdt);
    if (tr.dp) EXPECT_LE(*tr.dp, tr.tdt);
    // Budget conservation with alpha = 0: on-job time at failure equals the lifetime.
    std::map<UnitId, double> since, onjob;
    since[UnitId::controller_1] = 0.0;
    since[UnitId::controller_2] = 0.0;
    std::map<int, UnitId> slot_unit{{0, UnitId::controller_1}, {1, UnitId::controller_2}};
    for (const auto& e : tr.events) {
        if (e.kind == EventKind::failure && e.slot) {
            onjob[*e.unit] += e.time - since[*e.unit];
            EXPECT_NEAR(onjob[*e.unit], tr.lifetimes[static_cast<std::size_t>(*e.unit)], tolerance);
        } else if (e.kind == EventKind::replace) {
            since[*e.unit] = e.time;
            slot_unit[*e.slot] = *e.unit;
        } else if (e.kind == EventKind::rotate) {
            const UnitId out = slot_unit[*e.slot];
            onjob[out] += e.time - since[out];
            since[*e.unit] = e.time;
            slot_unit[*e.slot] = *e.unit;
        }
    }
    int deaths = 0;
    for (const auto& e : tr.events) deaths += e.kind == EventKind::system_death;
    EXPECT_EQ(deaths + (tr.censored ? 1 : 0), 1);
}

}  // namespace

TEST(DeriveSeed, DeterministicAndDistinct) {
    EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
    EXPECT_NE(derive_seed(42, 0), derive_seed(42, 1));
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i <= 1000000; ++i) seen.insert(derive_seed(0xDEADBEEF, i));
    EXPECT_EQ(seen.size(), 1000001u);
}

TEST(DeriveSeed, GoldenVectors) {
    // splitmix64 finalizer of master + (i + 1) * gamma, i.e. the (i + 1)-th
    // output of a splitmix64 stream started at `master`.
    std::uint64_t state = 2024;
    for (std::uint64_t i = 0; i < 5; ++i) {
        EXPECT_EQ(derive_seed(2024, i), splitmix(state));
        state += 0x9E3779B97F4A7C15ULL;
    }
    EXPECT_EQ(derive_seed(0, 0), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(derive_seed(1, 0), 0x910A2DEC89025CC1ULL);
    EXPECT_EQ(derive_seed(1, 1), 0xBEEB8DA1658EEC67ULL);
}

TEST(Rng, GoldenUniforms) {
    // std::mt19937_64 is fully specified; 9981545732273789042 is its
    // 10000th output for the default seed.
    std::mt19937_64 ref;
    ref.discard(9999);
    EXPECT_EQ(ref(), 9981545732273789042ULL);
    Rng r(5489);
    std::mt19937_64 same(5489);
    for (int i = 0; i < 100; ++i) {
        const double u = r.uniform();
        EXPECT_EQ(u, (static_cast<double>(same() >> 11) + 0.5) * 0x1.0p-53);
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Replication, DeterministicType1HandTrace) {
    const auto cfg = deterministic_config(200.0);
    const std::array<double, 3> life{200.0, 200.0, 200.0};
    const Trace tr = simulate_lifetimes(cfg, Policy::type1(), life, quiet_sim());
    ASSERT_EQ(tr.events.size(), 6u);
    EXPECT_EQ(tr.events[0].kind, EventKind::dp);
    EXPECT_EQ(tr.events[0].time, 160.0);
    EXPECT_EQ(tr.events[1].kind, EventKind::failure);
    EXPECT_EQ(tr.events[1].slot, 0);
    EXPECT_EQ(tr.events[2].kind, EventKind::failure);
    EXPECT_EQ(tr.events[2].slot, 1);
    EXPECT_EQ(tr.events[3].kind, EventKind::replace);
    EXPECT_EQ(tr.events[3].unit, UnitId::controller_3);
    EXPECT_EQ(tr.events[3].slot, 0);
    EXPECT_EQ(tr.events[4].time, 400.0);
    EXPECT_EQ(tr.events[5].kind, EventKind::system_death);
    EXPECT_EQ(tr.trdd, 200.0);
    EXPECT_EQ(tr.tdt, 400.0);
    EXPECT_EQ(tr.dp, 160.0);
    EXPECT_FALSE(tr.censored);
}

TEST(Replication, DeterministicType2HandTrace) {
    // Three 200-week budgets consumed two at a time: the system runs out at 300.
    const auto cfg = deterministic_config(200.0);
    const std::array<double, 3> life{200.0, 200.0, 200.0};
    const double p = 200.0 / 6.0;
    const Trace tr = simulate_lifetimes(cfg, Policy::type2(p), life, quiet_sim());
    check_trace_invariants(tr, 1e-9);
    EXPECT_NEAR(tr.trdd, 300.0, 1e-9);
    EXPECT_NEAR(tr.tdt, 300.0, 1e-9);
    ASSERT_TRUE(tr.dp);
    EXPECT_NEAR(*tr.dp, 800.0 / 3.0, 1e-9);
    const auto first_rotation = std::find_if(tr.events.begin(), tr.events.end(),
                                             [](const TraceEvent& e) { return e.kind == EventKind::rotate; });
    ASSERT_NE(first_rotation, tr.events.end());
    EXPECT_NEAR(first_rotation->time, p, 1e-12);
    EXPECT_EQ(first_rotation->slot, 0);
}

TEST(Replication, SameSeedBitIdentical) {
    const auto cfg = default_system_config();
    for (auto pol : {Policy::type1(), Policy::type2(36.0)}) {
        const Trace a = run_replication(cfg, pol, 987654321, quiet_sim());
        const Trace b = run_replication(cfg, pol, 987654321, quiet_sim());
        EXPECT_TRUE(same_events(a, b));
        EXPECT_EQ(a.lifetimes, b.lifetimes);
        EXPECT_EQ(a.tdt, b.tdt);
    }
}

TEST(Replication, InvariantsOverManySeeds) {
    auto cfg = default_system_config();
    cfg.unit_lifetime = LifetimeDistribution::lognormal(220.0, 30.0);
    for (std::uint64_t i = 0; i < 500; ++i) {
        for (auto pol : {Policy::type1(), Policy::type2(20.0), Policy::type2(500.0)}) {
            const Trace tr = run_replication(cfg, pol, derive_seed(77, i), quiet_sim());
            check_trace_invariants(tr, 1e-6);
        }
    }
}

TEST(Replication, PoliciesAgreeBeforeDivergence) {
    auto cfg = default_system_config();
    cfg.unit_lifetime = LifetimeDistribution::lognormal(220.0, 60.0);
    const double p = 150.0;
    for (std::uint64_t i = 0; i < 300; ++i) {
        const Trace a = run_replication(cfg, Policy::type1(), derive_seed(5, i), quiet_sim());
        const Trace b = run_replication(cfg, Policy::type2(p), derive_seed(5, i), quiet_sim());
        double first_failure = 1e300;
        for (const auto& e : a.events) {
            if (e.kind == EventKind::failure) first_failure = std::min(first_failure, e.time);
        }
        const double cut = std::min(p, first_failure);
        auto before = [&](const Trace& t) {
            std::vector<TraceEvent> out;
            for (const auto& e : t.events) {
                if (e.time < cut && e.kind != EventKind::dp) out.push_back(e);
            }
            return out;
        };
        const auto ea = before(a), eb = before(b);
        ASSERT_EQ(ea.size(), eb.size());
        for (std::size_t k = 0; k < ea.size(); ++k) {
            EXPECT_EQ(ea[k].time, eb[k].time);
            EXPECT_EQ(ea[k].kind, eb[k].kind);
        }
    }
}

TEST(Replication, ShelfAgingCanKillTheSpare) {
    auto cfg = deterministic_config(100.0);
    cfg.shelf_aging_factor = 1.0;
    const std::array<double, 3> life{150.0, 150.0, 60.0};
    const Trace tr = simulate_lifetimes(cfg, Policy::type1(), life, quiet_sim());
    ASSERT_FALSE(tr.events.empty());
    EXPECT_EQ(tr.events[0].kind, EventKind::failure);
    EXPECT_EQ(tr.events[0].unit, UnitId::controller_3);
    EXPECT_FALSE(tr.events[0].slot);
    EXPECT_EQ(tr.events[0].time, 60.0);
    EXPECT_EQ(tr.trdd, 150.0);
    EXPECT_EQ(tr.tdt, 150.0);
}

TEST(Replication, Censoring) {
    auto cfg = deterministic_config(200.0);
    SimConfig sim = quiet_sim(4);
    sim.horizon = 300.0;
    const auto m = run_ensemble(cfg, Policy::type1(), sim);
    EXPECT_EQ(m.censored_count, 4u);
    EXPECT_FALSE(m.usable);
    EXPECT_FALSE(m.tdt);
}

TEST(Replication, SingleSlotTrddIsZero) {
    auto cfg = deterministic_config(200.0);
    cfg.active_units = 1;
    cfg.spares = 1;
    const std::array<double, 2> life{200.0, 200.0};
    const Trace tr = simulate_lifetimes(cfg, Policy::type1(), life, quiet_sim());
    EXPECT_EQ(tr.trdd, 0.0);
    EXPECT_EQ(tr.tdt, 400.0);
}

TEST(Ensemble, SingleReplication) {
    const auto cfg = default_system_config();
    SimConfig sim = quiet_sim(1);
    sim.master_seed = 99;
    const auto m = run_ensemble(cfg, Policy::type1(), sim);
    const Trace tr = run_replication(cfg, Policy::type1(), derive_seed(99, 0), sim);
    ASSERT_TRUE(m.tdt);
    EXPECT_EQ(m.tdt->mean, tr.tdt);
    EXPECT_EQ(m.tdt->std, 0.0);
    EXPECT_EQ(m.trdd->mean, tr.trdd);
    EXPECT_EQ(m.tdt->count, 1u);
}

TEST(Ensemble, ThreadCountDoesNotChangeResults) {
    const auto cfg = default_system_config();
    SimConfig sim;
    sim.replications = 1500;
    sim.master_seed = 3;
    sim.threads = 1;
    const auto a = run_ensemble(cfg, Policy::type2(36.0), sim);
    sim.threads = 8;
    const auto b = run_ensemble(cfg, Policy::type2(36.0), sim);
    EXPECT_EQ(a.trdd->mean, b.trdd->mean);
    EXPECT_EQ(a.tdt->std, b.tdt->std);
    EXPECT_EQ(a.tdr->mean, b.tdr->mean);
    ASSERT_EQ(a.hazard_curve.size(), b.hazard_curve.size());
    for (std::size_t i = 0; i < a.hazard_curve.size(); ++i) {
        EXPECT_EQ(a.hazard_curve[i].value, b.hazard_curve[i].value);
    }
    EXPECT_EQ(a.red_zone.has_value(), b.red_zone.has_value());
}

TEST(Ensemble, ExponentialSingleUnitMean) {
    auto cfg = default_system_config();
    cfg.unit_lifetime = LifetimeDistribution::exponential(100.0);
    cfg.active_units = 1;
    cfg.spares = 0;
    SimConfig sim = quiet_sim(100000);
    sim.horizon = 1e5;
    const auto m = run_ensemble(cfg, Policy::type1(), sim);
    ASSERT_TRUE(m.tdt);
    EXPECT_NEAR(m.tdt->mean, 100.0, 2.0);
    EXPECT_EQ(m.censored_count, 0u);
    EXPECT_LE(m.tdt->ci95_low, m.tdt->mean);
    EXPECT_GE(m.tdt->ci95_high, m.tdt->mean);
}

TEST(Ensemble, RedundancyBenefit) {
    SimConfig sim = quiet_sim(10000);
    auto full = default_system_config();
    auto pair = full;
    pair.spares = 0;
    auto single = pair;
    single.active_units = 1;
    const auto a = run_ensemble(full, Policy::type1(), sim);
    const auto b = run_ensemble(pair, Policy::type1(), sim);
    const auto c = run_ensemble(single, Policy::type1(), sim);
    auto se = [](const Summary& s) { return s.std / std::sqrt(static_cast<double>(s.count)); };
    EXPECT_GT(a.tdt->mean - b.tdt->mean, 3.0 * std::hypot(se(*a.tdt), se(*b.tdt)));
    EXPECT_GT(b.tdt->mean - c.tdt->mean, 3.0 * std::hypot(se(*b.tdt), se(*c.tdt)));
}

TEST(Ensemble, Summaries) {
    const double v[] = {1.0, 2.0, 3.0, 4.0};
    const auto s = summarize(v);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->mean, 2.5);
    EXPECT_NEAR(s->std, std::sqrt(5.0 / 3.0), 1e-15);
    EXPECT_NEAR(s->ci95_high - s->mean, 1.96 * s->std / 2.0, 1e-15);
    EXPECT_FALSE(summarize(std::span<const double>()));
}

TEST(TraceHazard, FollowsConfiguration) {
    const auto cfg = deterministic_config(220.0);
    const std::array<double, 3> life{220.0, 224.0, 220.0};
    const Trace tr = simulate_lifetimes(cfg, Policy::type1(), life, quiet_sim());
    // Before the first failure both mains run from commissioning.
    const double t = 100.0;
    const double shift2 = 4.0;
    const double expect = oracle::parallel_two(cfg.hazard.hazard(t), cfg.hazard.cumulative(t),
                                               cfg.hazard.hazard(t, shift2), cfg.hazard.cumulative(t, shift2));
    EXPECT_NEAR(*trace_hazard(tr, cfg, t), expect, 1e-12 * expect);
    // After the spare goes in, its hazard starts from the lab credit.
    const double t2 = 222.0;
    const double a3 = 2.0 + (t2 - 220.0);
    const double h = *trace_hazard(tr, cfg, t2);
    const double expect2 = oracle::parallel_two(
        cfg.hazard.hazard(t2, shift2), cfg.hazard.cumulative(t2, shift2) - cfg.hazard.cumulative(220.0, shift2),
        cfg.hazard.hazard(a3), cfg.hazard.cumulative(a3) - cfg.hazard.cumulative(2.0));
    EXPECT_NEAR(h, expect2, 1e-12 * expect2);
    EXPECT_FALSE(trace_hazard(tr, cfg, tr.tdt + 1.0));
    // Terminal phase: controller_3 alone and in its own wear-out.
    EXPECT_FALSE(trace_hazard(tr, cfg, tr.tdt - 1.0));
}

TEST(EmpiricalHazard, ExponentialBins) {
    auto cfg = default_system_config();
    cfg.unit_lifetime = LifetimeDistribution::exponential(100.0);
    cfg.active_units = 1;
    cfg.spares = 0;
    SimConfig sim = quiet_sim(20000);
    sim.horizon = 1e5;
    const auto m = run_ensemble(cfg, Policy::type1(), sim);
    const auto bins = empirical_hazard(m.replications, 20.0);
    for (const auto& b : bins) {
        if (b.t_mid > 100.0) break;
        EXPECT_NEAR(b.rate, 0.01, 3.0 * 0.01 / std::sqrt(static_cast<double>(b.deaths))) << b.t_mid;
    }
}

TEST(EmpiricalHazard, OmitsEmptyBins) {
    const ReplicationResult r[] = {{0, 10.0, {}, {}, false}, {0, 15.0, {}, {}, false}};
    const auto bins = empirical_hazard(r, 20.0);
    ASSERT_EQ(bins.size(), 1u);
    EXPECT_EQ(bins[0].deaths, 2u);
    EXPECT_EQ(bins[0].exposure, 25.0);
    const ReplicationResult censored[] = {{0, 10.0, {}, {}, true}};
    EXPECT_THROW(empirical_hazard(censored, 20.0), DomainError);
    EXPECT_THROW(empirical_hazard(r, 0.0), DomainError);
}

TEST(EmpiricalHazard, RedZonePeak) {
    auto cfg = default_system_config();
    cfg.unit_lifetime = LifetimeDistribution::lognormal(220.0, 4.0);
    const auto m = run_ensemble(cfg, Policy::type1(), quiet_sim(5000));
    const auto bins = empirical_hazard(m.replications, 20.0);
    double peak = 0.0, useful = 0.0;
    for (const auto& b : bins) {
        peak = std::max(peak, b.rate);
        if (b.t_mid > 20.0 && b.t_mid < 180.0) useful = std::max(useful, b.rate);
    }
    EXPECT_GT(peak, 0.0);
    EXPECT_GE(peak, 2.0 * useful);
}

TEST(SimConfig, Validation) {
    SimConfig s;
    s.replications = 0;
    EXPECT_THROW(s.validate(), ConfigError);
    SimConfig t;
    t.bin_width = 0.0;
    EXPECT_THROW(t.validate(), ConfigError);
    SimConfig k;
    k.red_zone.k = 1.0;
    EXPECT_THROW(k.validate(), ConfigError);
}
