#include "redzone/hazards.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "redzone/error.hpp"

namespace redzone {

namespace {

void require_finite(double t, const char* what) {
    if (!std::isfinite(t)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

}  // namespace

WeibullTerm::WeibullTerm(double scale, double shape) : scale_(scale), shape_(shape) {
    if (!std::isfinite(scale) || scale < 0.0) {
        throw ConfigError("Weibull scale must be finite and >= 0", "scale");
    }
    if (!std::isfinite(shape) || shape <= 0.0) {
        throw ConfigError("Weibull shape must be finite and > 0", "shape");
    }
}

double WeibullTerm::hazard(double t) const {
    require_finite(t, "time");
    if (t < 0.0) {
        throw DomainError("Weibull hazard needs t >= 0");
    }
    if (shape_ == 1.0) {
        return scale_;
    }
    if (t == 0.0) {
        if (shape_ < 1.0) {
            throw DomainError("Weibull hazard with shape < 1 is singular at t = 0; supply a clamp");
        }
        return 0.0;
    }
    return scale_ * shape_ * std::pow(t, shape_ - 1.0);
}

double WeibullTerm::hazard(double t, double t_min) const {
    require_finite(t, "time");
    if (!(t_min > 0.0) || !std::isfinite(t_min)) {
        throw DomainError("clamp t_min must be finite and > 0");
    }
    if (t < 0.0) {
        throw DomainError("Weibull hazard needs t >= 0");
    }
    return hazard(std::max(t, t_min));
}

double WeibullTerm::cumulative(double t) const {
    require_finite(t, "time");
    if (t < 0.0) {
        throw DomainError("Weibull cumulative hazard needs t >= 0");
    }
    if (t == 0.0) {
        return 0.0;
    }
    if (shape_ == 1.0) {
        return scale_ * t;
    }
    return scale_ * std::pow(t, shape_);
}

double weibull_hazard(double t, const WeibullTerm& term, std::optional<double> t_min) {
    return t_min ? term.hazard(t, *t_min) : term.hazard(t);
}

double weibull_cumulative(double t, const WeibullTerm& term) { return term.cumulative(t); }

std::string to_string(LifePhase phase) {
    switch (phase) {
        case LifePhase::burnin:
            return "burn-in";
        case LifePhase::useful:
            return "useful";
        case LifePhase::wearout:
            return "wear-out";
    }
    return "unknown";
}

BathtubModel::BathtubModel(double useful_rate, WeibullTerm burnin, WeibullTerm wearout,
                           PhaseDurations phases, double clamp_fraction)
    : useful_rate_(useful_rate), burnin_(burnin), wearout_(wearout), phases_(phases) {
    if (!std::isfinite(useful_rate) || useful_rate < 0.0) {
        throw ConfigError("must be finite and >= 0", "useful_rate");
    }
    if (!(burnin.shape() < 1.0)) {
        throw ConfigError("burn-in shape must lie in (0, 1)", "burnin.shape");
    }
    if (!(wearout.shape() > 1.0)) {
        throw ConfigError("wear-out shape must be > 1", "wearout.shape");
    }
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(phases.burnin)) throw ConfigError("must be > 0", "phases_weeks.burnin");
    if (!positive(phases.useful)) throw ConfigError("must be > 0", "phases_weeks.useful");
    if (!positive(phases.wearout)) throw ConfigError("must be > 0", "phases_weeks.wearout");
    if (!positive(clamp_fraction) || clamp_fraction >= 1.0) {
        throw ConfigError("must lie in (0, 1)", "clamp_fraction");
    }
    t_min_ = clamp_fraction * phases.burnin;
}

double BathtubModel::hazard(double age, double onset_shift) const {
    require_finite(age, "age");
    if (age < 0.0) {
        throw DomainError("bathtub hazard needs age >= 0");
    }
    const double onset = std::max(0.0, wearout_onset() + onset_shift);
    double h = useful_rate_ + burnin_.hazard(age, t_min_);
    if (age > onset) {
        h += wearout_.hazard(age - onset);
    }
    return h;
}

double BathtubModel::cumulative(double age, double onset_shift) const {
    require_finite(age, "age");
    if (age < 0.0) {
        throw DomainError("bathtub cumulative hazard needs age >= 0");
    }
    const double onset = std::max(0.0, wearout_onset() + onset_shift);
    double cum = useful_rate_ * age + burnin_.cumulative(age);
    if (age > onset) {
        cum += wearout_.cumulative(age - onset);
    }
    return cum;
}

LifePhase BathtubModel::phase(double age) const noexcept {
    if (age < phases_.burnin) return LifePhase::burnin;
    if (age < wearout_onset()) return LifePhase::useful;
    return LifePhase::wearout;
}

std::vector<std::string> BathtubModel::warnings() const {
    std::vector<std::string> out;
    const double residue = burnin_.hazard(phases_.burnin);
    if (residue > 0.01 * useful_rate_) {
        std::ostringstream msg;
        msg << "burn-in term at Th1 (" << residue << "/week) exceeds 1% of the useful rate ("
            << useful_rate_ << "/week); declared burn-in ends before the term decays";
        out.push_back(msg.str());
    }
    return out;
}

double bathtub_hazard(double t, const BathtubModel& model) { return model.hazard(t); }

double bathtub_cumulative(double t, const BathtubModel& model) { return model.cumulative(t); }

// ---------------------------------------------------------------------------
// Lifetime distribution

LifetimeDistribution LifetimeDistribution::lognormal(double mean, double sd) {
    if (!std::isfinite(mean) || mean <= 0.0) {
        throw DomainError("lifetime mean must be finite and > 0");
    }
    if (!std::isfinite(sd) || sd < 0.0) {
        throw DomainError("lifetime standard deviation must be finite and >= 0");
    }
    if (sd == 0.0) {
        return {Kind::degenerate, mean, 0.0, 0.0, 0.0};
    }
    const double cv = sd / mean;
    const double scale2 = std::log1p(cv * cv);
    const double location = std::log(mean) - 0.5 * scale2;
    return {Kind::lognormal, mean, sd, location, std::sqrt(scale2)};
}

LifetimeDistribution LifetimeDistribution::exponential(double mean) {
    if (!std::isfinite(mean) || mean <= 0.0) {
        throw DomainError("lifetime mean must be finite and > 0");
    }
    return {Kind::exponential, mean, mean, 0.0, 0.0};
}

double LifetimeDistribution::sample(double u) const {
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("uniform variate must lie in (0, 1)");
    }
    switch (kind_) {
        case Kind::degenerate:
            return mean_;
        case Kind::exponential:
            return -mean_ * std::log1p(-u);
        case Kind::lognormal:
            break;
    }
    return std::exp(location_ + scale_ * normal_quantile(u));
}

LifetimeDistribution lognormal_from_mean_sd(double mean, double sd) {
    return LifetimeDistribution::lognormal(mean, sd);
}

double lognormal_sample(const LifetimeDistribution& dist, double u) { return dist.sample(u); }

double normal_quantile(double p) {
    // Wichura (1988), Algorithm AS 241, PPND16.
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal quantile needs p in (0, 1)");
    }
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -x : x;
}

// ---------------------------------------------------------------------------
// Software hazard

SoftwareHazardModel::SoftwareHazardModel(double steady_floor, double update_amplitude,
                                         double update_decay_tau, std::vector<UpgradeEvent> upgrades)
    : floor_(steady_floor), amplitude_(update_amplitude), tau_(update_decay_tau),
      upgrades_(std::move(upgrades)) {
    auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!nonneg(floor_)) throw ConfigError("must be >= 0", "software.steady_floor");
    if (!nonneg(amplitude_)) throw ConfigError("must be >= 0", "software.update_amplitude");
    if (!nonneg(tau_)) throw ConfigError("must be >= 0", "software.update_decay_tau_weeks");
    for (std::size_t i = 0; i < upgrades_.size(); ++i) {
        const auto& ev = upgrades_[i];
        const std::string path = "software.upgrade_events[" + std::to_string(i) + "]";
        if (!nonneg(ev.time)) throw ConfigError("must be >= 0", path + ".time_weeks");
        if (!nonneg(ev.pulse_amplitude)) throw ConfigError("must be >= 0", path + ".pulse_amplitude");
        if (!nonneg(ev.pulse_decay_tau)) throw ConfigError("must be >= 0", path + ".pulse_decay_tau_weeks");
        if (i > 0 && !(ev.time > upgrades_[i - 1].time)) {
            throw ConfigError("upgrade times must be strictly increasing", path + ".time_weeks");
        }
    }
}

namespace {

// A * exp(-x / tau) for x >= 0; a zero time constant disables the term.
double decay(double amplitude, double tau, double x) {
    if (tau == 0.0 || amplitude == 0.0) return 0.0;
    return amplitude * std::exp(-x / tau);
}

// Integral of A * exp(-s / tau) over s in [0, x].
double decay_integral(double amplitude, double tau, double x) {
    if (tau == 0.0 || amplitude == 0.0 || x <= 0.0) return 0.0;
    return amplitude * tau * -std::expm1(-x / tau);
}

}  // namespace

double SoftwareHazardModel::hazard(double t) const {
    require_finite(t, "time");
    if (t < 0.0) throw DomainError("software hazard needs t >= 0");
    double restart = 0.0;
    double pulses = 0.0;
    for (const auto& ev : upgrades_) {
        if (ev.time > t) break;
        if (ev.kind == UpgradeEvent::Kind::major) {
            restart = ev.time;
        } else {
            pulses += decay(ev.pulse_amplitude, ev.pulse_decay_tau, t - ev.time);
        }
    }
    return floor_ + decay(amplitude_, tau_, t - restart) + pulses;
}

double SoftwareHazardModel::cumulative(double t) const {
    require_finite(t, "time");
    if (t < 0.0) throw DomainError("software cumulative hazard needs t >= 0");
    double total = floor_ * t;
    double restart = 0.0;
    for (const auto& ev : upgrades_) {
        if (ev.time > t) break;
        if (ev.kind == UpgradeEvent::Kind::major) {
            total += decay_integral(amplitude_, tau_, ev.time - restart);
            restart = ev.time;
        } else {
            total += decay_integral(ev.pulse_amplitude, ev.pulse_decay_tau, t - ev.time);
        }
    }
    total += decay_integral(amplitude_, tau_, t - restart);
    return total;
}

double software_hazard(double t, const SoftwareHazardModel& model) { return model.hazard(t); }

OperatorHazard::OperatorHazard(double r) : rate(r) {
    if (!std::isfinite(r) || r < 0.0) {
        throw ConfigError("must be finite and >= 0", "operator.rate");
    }
}

double component_total_hazard(double t, const BathtubModel& hw, const SoftwareHazardModel& sw,
                              const OperatorHazard& op) {
    return hw.hazard(t) + sw.hazard(t) + op.rate;
}

}  // namespace redzone
