#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "tlc/ipa.hpp"
#include "tlc/oracle.hpp"
#include "tlc/simulator.hpp"

namespace tlc {

// Where descent directions come from. The estimator is the product; the
// oracle substitution exists so descent behaviour can be sanity-checked
// against brute-force slopes on the fluid model.
enum class GradientSource { kIpa, kOracle };

struct ProjectionBounds {
  double min_green_floor = 0.0;  // theta_min may sit at zero
  double positive_floor = 0.1;   // caps, wait thresholds and queue thresholds may not
};

struct OptimizerConfig {
  int iterations = 20;
  int replications = 20;
  double path_length = 1000.0;  // seconds per batch replication
  double rho0 = 2.0;
  bool decay_steps = false;  // rho0 / ceil(l/10) instead of constant rho0
  std::array<double, 2> smoothing{0.6, 0.4};
  bool smooth_costs = false;  // report smoothed J_hat alongside raw updates
  double window = 1200.0;     // seconds between online updates
  double horizon = 43200.0;   // total online run length
  std::array<double, 4> weights{1, 1, 1, 1};
  GradientSource source = GradientSource::kIpa;
  ProjectionBounds bounds;
  IpaOptions ipa;
  Vec10 fd_delta = uniform_fd_delta(0.05);  // oracle source only
};

inline void validate_optimizer_config(const OptimizerConfig& c) {
  if (c.iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (c.replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (!(c.path_length > 0)) throw std::invalid_argument("path length must be positive");
  if (!(c.rho0 > 0)) throw std::invalid_argument("step size rho0 must be positive");
  if (c.smoothing[0] < 0 || c.smoothing[1] < 0 ||
      std::fabs(c.smoothing[0] + c.smoothing[1] - 1.0) > 1e-9)
    throw std::invalid_argument("smoothing weights must be nonnegative and sum to 1");
  if (!(c.window > 0)) throw std::invalid_argument("window must be positive");
  const double ratio = c.horizon / c.window;
  if (!(c.horizon > 0) || std::fabs(ratio - std::round(ratio)) > 1e-9)
    throw std::invalid_argument("horizon must be a positive multiple of the window");
}

// Clamp order matters: the max-green clamp uses the already-clamped min.
inline ParameterVector project(const Vec10& raw, const ProjectionBounds& b = {}) {
  Vec10 v = raw;
  v[kTheta1Min] = std::max(v[kTheta1Min], b.min_green_floor);
  v[kTheta2Min] = std::max(v[kTheta2Min], b.min_green_floor);
  v[kTheta1Max] = std::max(v[kTheta1Max], v[kTheta1Min]);
  v[kTheta2Max] = std::max(v[kTheta2Max], v[kTheta2Min]);
  for (std::size_t i = kTheta3; i <= kS4; ++i) v[i] = std::max(v[i], b.positive_floor);
  return validate_parameters(v);
}

// weights[0] on the current window, weights[1] on the previous one;
// callers pass a zero vector as "previous" for the first window.
inline Vec10 smooth_gradient(const Vec10& current, const Vec10& previous,
                             const std::array<double, 2>& weights) {
  Vec10 g{};
  for (std::size_t i = 0; i < 10; ++i)
    g[i] = weights[0] * current[i] + weights[1] * previous[i];
  return g;
}

struct IterationRecord {
  int iteration = 0;
  Vec10 params{};
  double j_hat = 0.0;    // replication-mean cost at these parameters
  Vec10 gradient{};      // direction used for the step taken from here
  double rho = 0.0;      // zero on the final record (no step taken)
};

struct OptimizationTrajectory {
  std::vector<IterationRecord> steps;
  double initial_cost() const { return steps.front().j_hat; }
  double final_cost() const { return steps.back().j_hat; }
  double reduction_percent() const {
    const double j0 = initial_cost();
    return j0 == 0.0 ? 0.0 : 100.0 * (j0 - final_cost()) / j0;
  }
};

namespace detail {

// Mean cost and mean gradient at fixed parameters over fresh replications.
// Seeds derive from (master, iteration, replication) so replaying a master
// seed replays every path exactly.
inline std::pair<double, Vec10> evaluate_point(const OptimizerConfig& cfg,
                                               const ArrivalProcessSpec& spec,
                                               const ParameterVector& params,
                                               std::uint64_t master_seed, int iteration,
                                               bool want_gradient) {
  double cost_sum = 0.0;
  Vec10 grad_sum{};
  SimOptions so;
  so.weights = cfg.weights;
  for (int r = 0; r < cfg.replications; ++r) {
    ArrivalProcessSpec rep = spec;
    rep.seed = mix_seed(mix_seed(master_seed, static_cast<std::uint64_t>(iteration)),
                        static_cast<std::uint64_t>(r));
    if (want_gradient && cfg.source == GradientSource::kOracle) {
      FdOptions fo;
      fo.delta = cfg.fd_delta;
      fo.weights = cfg.weights;
      FdResult fd = finite_difference_gradient(rep, params, cfg.path_length, fo);
      cost_sum += fd.L_base;
      for (std::size_t i = 0; i < 10; ++i) grad_sum[i] += fd.grad[i];
      continue;
    }
    EventTrace trace = run_sample_path(rep, params, cfg.path_length,
                                       Policy::kQuasiDynamic, so);
    cost_sum += trace.cost;
    if (want_gradient) {
      GradientReport g = ipa_gradient(trace, cfg.weights, cfg.ipa);
      for (std::size_t i = 0; i < 10; ++i) grad_sum[i] += g.grad[i];
    }
  }
  const double n = static_cast<double>(cfg.replications);
  for (double& g : grad_sum) g /= n;
  return {cost_sum / n, grad_sum};
}

inline double step_size(const OptimizerConfig& cfg, int iteration, const Vec10& grad) {
  double rho = cfg.rho0;
  if (cfg.decay_steps) rho /= std::ceil(static_cast<double>(iteration + 1) / 10.0);
  return rho / std::max(1.0, inf_norm(grad));
}

// Display-only smoothing of the recorded costs, pairing raw values the same
// way smooth_gradient pairs windows. Updates are never driven by this.
inline void smooth_recorded_costs(OptimizationTrajectory& traj,
                                  const std::array<double, 2>& weights) {
  std::vector<double> raw;
  raw.reserve(traj.steps.size());
  for (const IterationRecord& r : traj.steps) raw.push_back(r.j_hat);
  for (std::size_t i = 1; i < traj.steps.size(); ++i)
    traj.steps[i].j_hat = weights[0] * raw[i] + weights[1] * raw[i - 1];
}

}  // namespace detail

// Gradient descent with fresh replications per iteration. The returned
// trajectory has iterations+1 records; the last one holds the final point
// and its independently evaluated cost.
inline OptimizationTrajectory batch_optimize(const OptimizerConfig& cfg,
                                             const ArrivalProcessSpec& spec,
                                             const ParameterVector& initial,
                                             std::uint64_t master_seed) {
  validate_optimizer_config(cfg);
  validate_parameters(initial.v);
  OptimizationTrajectory traj;
  ParameterVector params = initial;
  try {
    for (int l = 0; l < cfg.iterations; ++l) {
      auto [j_hat, grad] = detail::evaluate_point(cfg, spec, params, master_seed, l, true);
      IterationRecord rec;
      rec.iteration = l;
      rec.params = params.v;
      rec.j_hat = j_hat;
      rec.gradient = grad;
      rec.rho = detail::step_size(cfg, l, grad);
      traj.steps.push_back(rec);
      Vec10 next = params.v;
      for (std::size_t i = 0; i < 10; ++i) next[i] -= rec.rho * grad[i];
      params = project(next, cfg.bounds);
    }
    auto [j_final, _] =
        detail::evaluate_point(cfg, spec, params, master_seed, cfg.iterations, false);
    IterationRecord last;
    last.iteration = cfg.iterations;
    last.params = params.v;
    last.j_hat = j_final;
    traj.steps.push_back(last);
  } catch (const NonconvergenceError&) {
    throw;
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error("batch iteration " + std::to_string(traj.steps.size()) +
                             ": " + e.what());
  }
  if (cfg.smooth_costs) detail::smooth_recorded_costs(traj, cfg.smoothing);
  return traj;
}

// One continuous path; parameters change at window boundaries from the
// smoothed gradient of the most recent two windows. Record l carries the
// parameters in effect during window l and that window's realized cost.
inline OptimizationTrajectory online_optimize(const OptimizerConfig& cfg,
                                              const ArrivalProcessSpec& spec,
                                              const ParameterVector& initial) {
  validate_optimizer_config(cfg);
  validate_parameters(initial.v);
  const int windows = static_cast<int>(std::llround(cfg.horizon / cfg.window));
  SimOptions so;
  so.weights = cfg.weights;
  OptimizationTrajectory traj;
  Simulator sim(spec, initial, so);
  ParameterVector params = initial;
  Vec10 previous{};
  try {
    for (int w = 0; w < windows; ++w) {
      sim.run_until((w + 1) * cfg.window);
      EventTrace trace = sim.take_trace(EventKind::kWindowBoundary);
      GradientReport g = ipa_gradient(trace, cfg.weights, cfg.ipa);
      Vec10 smoothed = w == 0 ? g.grad : smooth_gradient(g.grad, previous, cfg.smoothing);
      previous = g.grad;
      IterationRecord rec;
      rec.iteration = w;
      rec.params = params.v;
      rec.j_hat = trace.cost;
      rec.gradient = smoothed;
      if (w + 1 < windows) {
        rec.rho = detail::step_size(cfg, w, smoothed);
        Vec10 next = params.v;
        for (std::size_t i = 0; i < 10; ++i) next[i] -= rec.rho * smoothed[i];
        params = project(next, cfg.bounds);
        sim.set_params(params);
      }
      traj.steps.push_back(rec);
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("online window " + std::to_string(traj.steps.size()) + ": " +
                             e.what());
  }
  if (cfg.smooth_costs) detail::smooth_recorded_costs(traj, cfg.smoothing);
  return traj;
}

inline std::vector<double> window_costs(const OptimizationTrajectory& t) {
  std::vector<double> costs;
  costs.reserve(t.steps.size());
  for (const IterationRecord& r : t.steps) costs.push_back(r.j_hat);
  return costs;
}

}  // namespace tlc
