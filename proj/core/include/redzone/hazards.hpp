#pragma once

// Hazard-rate and lifetime-distribution kernels. All times are in weeks and
// all rates in failures per week.

#include <optional>
#include <string>
#include <vector>

namespace redzone {

/**
 * Weibull hazard term h(t) = scale * shape * t^(shape - 1).
 *
 * shape < 1 gives a decreasing (burn-in) hazard, shape == 1 a constant one and
 * shape > 1 an increasing (wear-out) hazard. A zero scale disables the term.
 */
class WeibullTerm {
  public:
    WeibullTerm(double scale, double shape);

    double scale() const noexcept { return scale_; }
    double shape() const noexcept { return shape_; }

    // Throws DomainError for non-finite t, t < 0, or t == 0 with shape < 1.
    double hazard(double t) const;
    // Evaluates at max(t, t_min); the clamp keeps shape < 1 finite at t = 0.
    double hazard(double t, double t_min) const;
    // scale * t^shape, exact. Throws DomainError for t < 0.
    double cumulative(double t) const;

  private:
    double scale_;
    double shape_;
};

double weibull_hazard(double t, const WeibullTerm& term,
                      std::optional<double> t_min = std::nullopt);
double weibull_cumulative(double t, const WeibullTerm& term);

struct PhaseDurations {
    double burnin;   // Th1
    double useful;   // Th2
    double wearout;  // Th3
};

enum class LifePhase { burnin, useful, wearout };

std::string to_string(LifePhase phase);

/**
 * Additive bathtub: a constant useful-life rate plus a decreasing Weibull term
 * from age 0 and an increasing Weibull term starting at the wear-out onset
 * (Th1 + Th2). The wear-out term vanishes at its onset because its shape is
 * above 1, so the curve is continuous.
 *
 * The declared phase durations label ages and bound scenarios; they are not
 * derived from the terms. `warnings()` reports declared phases that disagree
 * with the term decay.
 */
class BathtubModel {
  public:
    static constexpr double kDefaultClampFraction = 1e-6;

    BathtubModel(double useful_rate, WeibullTerm burnin, WeibullTerm wearout,
                 PhaseDurations phases, double clamp_fraction = kDefaultClampFraction);

    double useful_rate() const noexcept { return useful_rate_; }
    const WeibullTerm& burnin() const noexcept { return burnin_; }
    const WeibullTerm& wearout() const noexcept { return wearout_; }
    const PhaseDurations& phases() const noexcept { return phases_; }
    double wearout_onset() const noexcept { return phases_.burnin + phases_.useful; }
    double t_min() const noexcept { return t_min_; }

    // `onset_shift` moves the wear-out onset of one particular unit, letting
    // its wear-out window follow its own sampled lifetime.
    double hazard(double age, double onset_shift = 0.0) const;
    double cumulative(double age, double onset_shift = 0.0) const;

    LifePhase phase(double age) const noexcept;
    std::vector<std::string> warnings() const;

  private:
    double useful_rate_;
    WeibullTerm burnin_;
    WeibullTerm wearout_;
    PhaseDurations phases_;
    double t_min_;
};

double bathtub_hazard(double t, const BathtubModel& model);
double bathtub_cumulative(double t, const BathtubModel& model);

/**
 * Unit lifetime distribution, parameterized by its mean and standard deviation
 * in weeks. A zero standard deviation is the deterministic point mass at the
 * mean. The exponential kind has sd == mean.
 */
class LifetimeDistribution {
  public:
    enum class Kind { lognormal, degenerate, exponential };

    static LifetimeDistribution lognormal(double mean, double sd);
    static LifetimeDistribution exponential(double mean);

    Kind kind() const noexcept { return kind_; }
    double mean() const noexcept { return mean_; }
    double sd() const noexcept { return sd_; }
    // Log-space parameters; zero for non-lognormal kinds.
    double location() const noexcept { return location_; }
    double scale() const noexcept { return scale_; }

    // Inverse-transform sample for u in (0,1).
    double sample(double u) const;

  private:
    LifetimeDistribution(Kind kind, double mean, double sd, double location, double scale)
        : kind_(kind), mean_(mean), sd_(sd), location_(location), scale_(scale) {}

    Kind kind_;
    double mean_;
    double sd_;
    double location_;
    double scale_;
};

LifetimeDistribution lognormal_from_mean_sd(double mean, double sd);
double lognormal_sample(const LifetimeDistribution& dist, double u);

// Standard normal quantile (Wichura, AS 241 PPND16); |error| < 1e-15 over (0,1).
double normal_quantile(double p);

struct UpgradeEvent {
    enum class Kind { minor, major };
    double time;
    Kind kind;
    double pulse_amplitude = 0.0;
    double pulse_decay_tau = 0.0;
};

/**
 * Software failure rate: steady floor + decaying update term + upgrade pulses.
 * A minor upgrade adds an exponentially decaying pulse; a major upgrade restarts
 * the update decay from its full amplitude.
 */
class SoftwareHazardModel {
  public:
    SoftwareHazardModel() = default;
    SoftwareHazardModel(double steady_floor, double update_amplitude, double update_decay_tau,
                        std::vector<UpgradeEvent> upgrades = {});

    double steady_floor() const noexcept { return floor_; }
    const std::vector<UpgradeEvent>& upgrades() const noexcept { return upgrades_; }

    double hazard(double t) const;
    // Integral of hazard over [0, t].
    double cumulative(double t) const;

  private:
    double floor_ = 0.0;
    double amplitude_ = 0.0;
    double tau_ = 0.0;
    std::vector<UpgradeEvent> upgrades_;
};

double software_hazard(double t, const SoftwareHazardModel& model);

struct OperatorHazard {
    explicit OperatorHazard(double rate = 0.0);
    double rate;
};

// Hardware (bathtub at age t) + software + operator contributions.
double component_total_hazard(double t, const BathtubModel& hw, const SoftwareHazardModel& sw,
                              const OperatorHazard& op);

}  // namespace redzone
