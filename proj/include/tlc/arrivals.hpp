#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

#include "tlc/events.hpp"
#include "tlc/util.hpp"

namespace tlc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Optional deterministic rate scaling on one flow over a time window,
// used to test online re-adaptation.
struct RatePerturbation {
  int flow = 0;  // 1..4; 0 disables
  double factor = 1.0;
  double t_from = 0.0;
  double t_until = 0.0;

  bool active() const { return flow >= 1 && flow <= 4 && factor != 1.0; }
};

// Exogenous traffic description shared by both simulation modes.
struct ArrivalProcessSpec {
  SimMode mode = SimMode::kDiscrete;
  std::array<double, 4> mean_rate{0.11, 0.125, 0.01, 0.01};
  double h = 1.2;
  std::uint64_t seed = 1;
  // Fluid mode: exponentially distributed segment lengths with this mean;
  // segment rates are uniform on [0, 2 * mean] unless constant_rates.
  double fluid_segment_mean = 30.0;
  bool fluid_constant_rates = false;
  RatePerturbation perturbation;

  double rate_multiplier(int flow, double t) const {
    if (perturbation.active() && perturbation.flow == flow && t >= perturbation.t_from &&
        t < perturbation.t_until)
      return perturbation.factor;
    return 1.0;
  }

  // Next time at which the deterministic schedule changes, after t.
  double next_schedule_change(double t) const {
    if (!perturbation.active()) return kInf;
    if (t < perturbation.t_from) return perturbation.t_from;
    if (t < perturbation.t_until) return perturbation.t_until;
    return kInf;
  }
};

inline void validate_arrival_spec(const ArrivalProcessSpec& s) {
  for (double r : s.mean_rate)
    if (!std::isfinite(r) || r < 0.0)
      throw std::invalid_argument("arrival rates must be finite and nonnegative");
  if (!(s.h > 0.0)) throw std::invalid_argument("service rate h must be positive");
  if (!(s.fluid_segment_mean > 0.0))
    throw std::invalid_argument("fluid segment mean must be positive");
  if (s.perturbation.flow < 0 || s.perturbation.flow > 4)
    throw std::invalid_argument("perturbation flow must be 1..4 (or 0 to disable)");
  if (s.perturbation.active() &&
      (!(s.perturbation.factor >= 0.0) || s.perturbation.t_until < s.perturbation.t_from))
    throw std::invalid_argument("perturbation must have factor >= 0 and until >= from");
}

// Piecewise-constant rate path of one fluid flow. Segments are generated
// lazily from a dedicated stream, so a path depends only on (seed, flow)
// and is identical across control-parameter perturbations.
class FluidRatePath {
 public:
  FluidRatePath() = default;
  FluidRatePath(const ArrivalProcessSpec& spec, int flow)
      : spec_(&spec), flow_(flow), rng_(mix_seed(spec.seed, 0xf1u, static_cast<std::uint64_t>(flow))) {
    seg_end_ = 0.0;
    next_segment(0.0);
  }

  double rate() const { return rate_; }
  double segment_end() const { return seg_end_; }

  // Moves to the segment containing t (t must be at or past the current
  // segment end when a change is due).
  void advance_to(double t) {
    while (t >= seg_end_) next_segment(seg_end_);
  }

 private:
  void next_segment(double start) {
    const double mean = spec_->mean_rate[flow_ - 1] * spec_->rate_multiplier(flow_, start);
    std::exponential_distribution<double> dur(1.0 / spec_->fluid_segment_mean);
    double len = dur(rng_);
    double raw;
    if (spec_->fluid_constant_rates) {
      raw = mean;
    } else {
      std::uniform_real_distribution<double> u(0.0, 2.0 * mean);
      raw = u(rng_);
    }
    // A schedule change forces a segment boundary so the multiplier applies
    // from exactly its start time.
    double sched = spec_->next_schedule_change(start);
    seg_end_ = std::min(start + len, sched);
    rate_ = raw;
  }

  const ArrivalProcessSpec* spec_ = nullptr;
  int flow_ = 1;
  std::mt19937_64 rng_;
  double rate_ = 0.0;
  double seg_end_ = 0.0;
};

// Poisson arrival epochs of one discrete flow, generated by accumulating
// unit-exponential work over the piecewise-constant rate profile. The
// draw sequence depends only on (seed, flow), which keeps paths aligned
// under common random numbers.
class PoissonArrivals {
 public:
  PoissonArrivals() = default;
  PoissonArrivals(const ArrivalProcessSpec& spec, int flow)
      : spec_(&spec), flow_(flow), rng_(mix_seed(spec.seed, 0xd15u, static_cast<std::uint64_t>(flow))) {
    next_ = solve_next(0.0);
  }

  double next_time() const { return next_; }

  void pop() { next_ = solve_next(next_); }

 private:
  // First passage time of the integrated rate profile past a fresh
  // unit-exponential threshold, starting from 'from'.
  double solve_next(double from) {
    const double base = spec_->mean_rate[flow_ - 1];
    if (base <= 0.0) return kInf;
    std::exponential_distribution<double> e(1.0);
    double work = e(rng_);
    double t = from;
    for (;;) {
      double rate = base * spec_->rate_multiplier(flow_, t);
      double boundary = spec_->next_schedule_change(t);
      if (rate <= 0.0) {
        if (boundary == kInf) return kInf;
        t = boundary;
        continue;
      }
      double dt = work / rate;
      if (t + dt <= boundary) return t + dt;
      work -= (boundary - t) * rate;
      t = boundary;
    }
  }

  const ArrivalProcessSpec* spec_ = nullptr;
  int flow_ = 1;
  std::mt19937_64 rng_;
  double next_ = kInf;
};

// Windowed arrival-rate estimate: arrivals in [tau - t_w, tau) divided by
// the window actually observed. 'arrivals' must be ascending.
inline double estimate_arrival_rate(const std::vector<double>& arrivals, double tau,
                                    double t_w) {
  const double window = std::min(t_w, tau);
  if (window <= 0.0) return 0.0;
  auto lo = std::lower_bound(arrivals.begin(), arrivals.end(), tau - t_w);
  auto hi = std::lower_bound(arrivals.begin(), arrivals.end(), tau);
  return static_cast<double>(hi - lo) / window;
}

}  // namespace tlc
