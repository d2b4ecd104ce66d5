#pragma once

#include <array>

#include "tlc/events.hpp"
#include "tlc/model.hpp"
#include "tlc/params.hpp"

namespace tlc {

// View of one green-phase clock for rule evaluation. 'fresh' marks a clock
// that was reset at the current instant and is conceptually 0+: strictly
// positive but below every positive bound. Conditions on a clock are only
// meaningful while its road holds the green, so every comparison keeps the
// implied z > 0 guard; the opposing clock is frozen at zero and never
// satisfies a bound.
struct ClockView {
  double v = 0.0;
  bool fresh = false;

  bool positive() const { return fresh || v > 0.0; }
  bool below(double c) const { return positive() && (fresh ? c > 0.0 : v < c); }
  bool at_least(double c) const { return positive() && (fresh ? c <= 0.0 : v >= c); }
  bool in_band(double lo, double hi) const { return at_least(lo) && below(hi); }
};

// Vehicle light of road 1 as a function of region, crossing demand and the
// green clocks. The rules keep a green while its min green has not elapsed,
// cut it at its max green, and in between arbitrate on queue thresholds and
// pedestrian demand. Road 2's light is always the complement.
inline int u1_rule(Region region, int p1, int p2, ClockView z1, ClockView z2,
                   const ParameterVector& th) {
  const double t1min = th[kTheta1Min], t1max = th[kTheta1Max];
  const double t2min = th[kTheta2Min], t2max = th[kTheta2Max];
  switch (region) {
    case Region::kX0:
      if (z1.below(t1max) && p1 == 1 && p2 == 1) return 1;
      if (z1.positive() && p1 == 0) return 1;
      if (z2.at_least(t2max) && p1 == 1 && p2 == 1) return 1;
      if (z2.positive() && p1 == 0 && p2 == 1) return 1;
      return 0;
    case Region::kX1:
    case Region::kX1p:
      if (z1.below(t1min)) return 1;
      if (z1.at_least(t1min) && p1 <= p2) return 1;
      if (z2.below(t2max) && p1 == 0) return 1;
      if (z2.at_least(t2max)) return 1;
      return 0;
    case Region::kX2:
    case Region::kX2p:
      if (z1.below(t1max) && p2 == 1) return 1;
      if (z2.at_least(t2min) && p1 == 0 && p2 == 1) return 1;
      return 0;
    case Region::kX3:
    case Region::kX6:
      if (z1.below(t1min)) return 1;
      if (z1.in_band(t1min, t1max) && p1 <= p2) return 1;
      if (z2.in_band(t2min, t2max) && p1 == 0 && p2 == 1) return 1;
      if (z2.at_least(t2max)) return 1;
      return 0;
    case Region::kX4:
      if (z1.below(t1min)) return 1;
      if (z2.at_least(t2max)) return 1;
      return 0;
    case Region::kX5:
      if (z1.below(t1max)) return 1;
      if (z2.at_least(t2min)) return 1;
      return 0;
  }
  return 0;
}

struct ControlDecision {
  int u1 = 1;
  bool switch_now = false;
  // Observable event that caused the switch; filled by the simulator.
  EventKind trigger_kind = EventKind::kNone;
  int trigger_flow = 0;
};

// The active road's green may only be cut once its min green has elapsed.
// Without this guard the region rules chatter: with both vehicle queues
// empty and both inflows positive, X2 demands road 2 green, which
// reclassifies the state into X1, which demands road 1 back, with no time
// progress. A min green of zero restores the unguarded rule.
inline ControlDecision control_decision(Region region, const std::array<int, 2>& p,
                                        ClockView z1, ClockView z2,
                                        const ParameterVector& th, int current_u1) {
  ControlDecision d;
  d.u1 = u1_rule(region, p[0], p[1], z1, z2, th);
  const ClockView& active = current_u1 == 1 ? z1 : z2;
  d.switch_now = d.u1 != current_u1 && active.at_least(th.theta_min(current_u1 == 1 ? 1 : 2));
  return d;
}

// Expands the road-1 vehicle light into the full control vector: pedestrian
// flow 4 walks with vehicle flow 1, pedestrian flow 3 with vehicle flow 2.
inline std::array<int, 4> expand_control(int u1) {
  return u1 == 1 ? std::array<int, 4>{1, 0, 0, 1} : std::array<int, 4>{0, 1, 1, 0};
}

// Unsignalized reference: which flows may move given the queue contents.
// Pedestrians always have the right of way: a waiting pedestrian queue
// blocks its road's vehicles until it empties. Vehicle service itself is a
// single first-come-first-leave crossing shared by both roads (engine-side);
// here only the eligibility is decided. Not confined to the two-phase set.
struct BaselineDecision {
  std::array<int, 4> enabled{1, 1, 0, 0};
  bool changed = false;
};

inline BaselineDecision baseline_decision(const std::array<double, 4>& x,
                                          const std::array<int, 4>& u_prev) {
  BaselineDecision d;
  d.enabled[2] = x[2] > kFluidEps ? 1 : 0;
  d.enabled[3] = x[3] > kFluidEps ? 1 : 0;
  d.enabled[0] = d.enabled[2] ? 0 : 1;
  d.enabled[1] = d.enabled[3] ? 0 : 1;
  d.changed = d.enabled != u_prev;
  return d;
}

}  // namespace tlc
