#pragma once

// Seeded event-driven simulation of system lifetimes and ensemble statistics.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "redzone/curve.hpp"
#include "redzone/maintenance.hpp"
#include "redzone/system.hpp"
#include "redzone/trace.hpp"

namespace redzone {

struct SimConfig {
    std::size_t replications = 1000;
    std::uint64_t master_seed = 1;
    std::optional<double> horizon;  // default 5 * lifetime mean
    double dt_event = 1e-6;         // reporting tolerance for budget crossings
    double bin_width = 20.0;        // empirical hazard bins
    double curve_dt = 1.0;          // ensemble hazard-curve grid step
    unsigned threads = 0;           // 0 = hardware concurrency
    bool hazard_curve = true;       // build the ensemble hazard curve and detect a red zone
    bool keep_traces = false;
    RedZoneOptions red_zone;

    void validate() const;
    double horizon_for(const SystemConfig& system) const;
};

// splitmix64 finalizer applied to master + (index + 1) * golden gamma.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication_index);

// 64-bit Mersenne Twister (period 2^19937 - 1) with a fixed uniform mapping.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Open interval (0, 1): (top 53 bits + 0.5) * 2^-53.
    double uniform();

  private:
    std::mt19937_64 engine_;
};

// Core event loop for fixed unit lifetimes (indexed by UnitId).
Trace simulate_lifetimes(const SystemConfig& config, const Policy& policy,
                         std::span<const double> lifetimes, const SimConfig& sim);

// Samples one lifetime per unit from the config distribution, then simulates.
Trace run_replication(const SystemConfig& config, const Policy& policy, std::uint64_t seed,
                      const SimConfig& sim);

/**
 * Composed system failure rate of one trace at calendar time t, following the
 * trace's configuration history. Empty when t is outside [0, Tdt) or in the
 * terminal phase (one unit left, no usable spare, that unit in its own wear-out).
 */
std::optional<double> trace_hazard(const Trace& trace, const SystemConfig& config, double t);

struct Summary {
    double mean;
    double std;  // sample standard deviation, 0 for a single value
    double ci95_low;
    double ci95_high;
    std::size_t count;
};

// Mean, std and normal-approximation 95% interval; empty input gives none.
std::optional<Summary> summarize(std::span<const double> values);

struct ReplicationResult {
    double trdd;
    double tdt;
    std::optional<double> dp;
    std::optional<double> tdr;
    bool censored;
};

struct Metrics {
    std::uint64_t master_seed = 0;
    std::vector<ReplicationResult> replications;
    // Summaries over uncensored replications (dp/tdr: those with a DP).
    std::optional<Summary> trdd;
    std::optional<Summary> tdt;
    std::optional<Summary> dp;
    std::optional<Summary> tdr;
    std::size_t censored_count = 0;
    bool usable = false;  // false when every replication is censored
    Curve hazard_curve;   // mean over replications in service, terminal phase excluded
    std::optional<RedZone> red_zone;
    std::vector<Trace> traces;  // only with keep_traces
};

Metrics run_ensemble(const SystemConfig& config, const Policy& policy, const SimConfig& sim);

struct HazardBin {
    double t_mid;
    double rate;
    double std_error;  // sqrt(deaths) / exposure
    std::size_t deaths;
    double exposure;
};

// Binned deaths / at-risk time of system lifetimes. Bins with no exposure are
// omitted. Needs at least one uncensored replication.
std::vector<HazardBin> empirical_hazard(std::span<const ReplicationResult> results,
                                        double bin_width);

}  // namespace redzone
