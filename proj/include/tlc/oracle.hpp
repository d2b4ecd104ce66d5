#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tlc/simulator.hpp"

namespace tlc {

inline Vec10 uniform_fd_delta(double d) {
  Vec10 v;
  v.fill(d);
  return v;
}

struct FdOptions {
  Vec10 delta = uniform_fd_delta(0.05);  // requested per-coordinate step
  std::array<double, 4> weights{1, 1, 1, 1};
  // Structural events this close to the horizon are ignored by the stability
  // check. A perturbation drifts late switches by roughly (switch count)*delta,
  // so one that straddles t_end is a boundary artifact with vanishing cost
  // weight, not a control-path change.
  double boundary_margin = 1.0;
};

struct FdResult {
  Vec10 grad{};
  // A coordinate is stable when both perturbed paths replay the base
  // path's event sequence (same kinds, same flows, same order); only then
  // is the central difference a trustworthy local slope.
  std::array<bool, 10> stable{};
  Vec10 effective_delta{};
  double L_base = 0.0;
};

// Endogenous skeleton of a trace: light switches, queue boundary crossings
// and clock threshold crossings. Perturbing a parameter shifts these events
// in time; while their order is unchanged the cost is a smooth function of
// the parameter and a central difference measures a true local slope. A
// reorder (say a wait clock reaching its threshold before instead of after
// the green clock reaching its minimum) is a kink in the cost, and the flag
// trips. Rate segment records are excluded: under common random numbers they
// sit at identical exogenous times in every run, so a drifting switch passing
// one of them is benign.
inline std::vector<std::pair<EventKind, int>> event_signature(const EventTrace& t,
                                                              double boundary_margin = 0.0) {
  std::vector<std::pair<EventKind, int>> sig;
  sig.reserve(t.records.size());
  const double cut = t.t_end - boundary_margin;
  for (const EventRecord& r : t.records) {
    if (r.t >= cut) break;
    switch (r.kind) {
      case EventKind::kG2R:
      case EventKind::kR2G:
      case EventKind::kXUp0:
      case EventKind::kXDown0:
      case EventKind::kXUpS:
      case EventKind::kXDownS:
      case EventKind::kZUpThetaMin:
      case EventKind::kZUpThetaMax:
      case EventKind::kWUpTheta:
        sig.emplace_back(r.kind, r.flow);
        break;
      default:
        break;
    }
  }
  return sig;
}

// Largest symmetric step at coordinate i that keeps both perturbed vectors
// feasible (ordering of the green bounds, positivity of caps/thresholds).
inline double feasible_delta(const ParameterVector& p, std::size_t i, double delta) {
  double slack = kInf;
  switch (i) {
    case kTheta1Min: slack = std::min(p[kTheta1Min], p[kTheta1Max] - p[kTheta1Min]); break;
    case kTheta1Max: slack = p[kTheta1Max] - p[kTheta1Min]; break;
    case kTheta2Min: slack = std::min(p[kTheta2Min], p[kTheta2Max] - p[kTheta2Min]); break;
    case kTheta2Max: slack = p[kTheta2Max] - p[kTheta2Min]; break;
    default: slack = 0.5 * p[i]; break;
  }
  return std::min(delta, slack);
}

// Central-difference gradient under common random numbers: every run reuses
// the same seed, so the exogenous rate path is identical and only the
// policy parameters differ. Fluid mode only; discrete unit jumps make the
// difference quotient a switch counter rather than a slope.
inline FdResult finite_difference_gradient(const ArrivalProcessSpec& spec,
                                           const ParameterVector& params, double t_end,
                                           FdOptions opt = {}) {
  if (spec.mode != SimMode::kFluid)
    throw std::invalid_argument("finite differences require fluid mode");
  SimOptions so;
  so.weights = opt.weights;
  FdResult res;
  EventTrace base = run_sample_path(spec, params, t_end, Policy::kQuasiDynamic, so);
  res.L_base = base.cost;
  const auto base_sig = event_signature(base, opt.boundary_margin);
  for (std::size_t i = 0; i < 10; ++i) {
    const double d = feasible_delta(params, i, opt.delta[i]);
    if (d <= 1e-12)
      throw std::runtime_error("no feasible finite-difference step at parameter " +
                               std::to_string(i + 1));
    res.effective_delta[i] = d;
    Vec10 up = params.v, dn = params.v;
    up[i] += d;
    dn[i] -= d;
    EventTrace tu = run_sample_path(spec, validate_parameters(up), t_end,
                                    Policy::kQuasiDynamic, so);
    EventTrace td = run_sample_path(spec, validate_parameters(dn), t_end,
                                    Policy::kQuasiDynamic, so);
    res.grad[i] = (tu.cost - td.cost) / (2.0 * d);
    res.stable[i] = event_signature(tu, opt.boundary_margin) == base_sig &&
                    event_signature(td, opt.boundary_margin) == base_sig;
  }
  return res;
}

struct GradientComparison {
  double cosine = 0.0;          // over stable coordinates
  int stable_count = 0;
  int compared_count = 0;       // stable coordinates with |fd| above floor
  Vec10 rel_err{};              // meaningful only on compared coordinates
  std::array<bool, 10> compared{};
  double max_rel_err = 0.0;
};

// Agreement metrics restricted to coordinates where the finite difference
// is trustworthy (stable replay) and large enough to divide by.
inline GradientComparison compare_gradients(const Vec10& ipa, const FdResult& fd,
                                            double fd_floor = 1e-3) {
  GradientComparison c;
  double dot_ = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    if (!fd.stable[i]) continue;
    ++c.stable_count;
    dot_ += ipa[i] * fd.grad[i];
    na += ipa[i] * ipa[i];
    nb += fd.grad[i] * fd.grad[i];
    if (std::fabs(fd.grad[i]) > fd_floor) {
      c.compared[i] = true;
      ++c.compared_count;
      c.rel_err[i] = std::fabs(ipa[i] - fd.grad[i]) / std::fabs(fd.grad[i]);
      c.max_rel_err = std::max(c.max_rel_err, c.rel_err[i]);
    }
  }
  if (na > 0.0 && nb > 0.0)
    c.cosine = dot_ / (std::sqrt(na) * std::sqrt(nb));
  else if (na == 0.0 && nb == 0.0 && c.stable_count > 0)
    c.cosine = 1.0;  // both identically zero on the stable set
  return c;
}

}  // namespace tlc
