#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tlc/arrivals.hpp"
#include "tlc/controller.hpp"
#include "tlc/events.hpp"
#include "tlc/model.hpp"
#include "tlc/params.hpp"

namespace tlc {

struct FlowRates {
  std::array<double, 4> alpha{};
  double h = 1.2;
};

class NonconvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EventSkippedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Net fluid drift of a queue. An empty queue under GREEN passes inflow
// through and only starts building if the inflow exceeds the service rate.
inline double flow_slope(double x, int u, double alpha, double h) {
  if (u == 0) return alpha;
  if (x > kFluidEps) return alpha - h;
  return std::max(0.0, alpha - h);
}

// Pedestrians count as present while their flow is RED and fluid inflow is
// positive even at zero content: the queue leaves zero immediately.
inline bool peds_present(double x, int u, double alpha, SimMode mode) {
  if (u != 0) return false;
  if (x > kFluidEps) return true;
  return mode == SimMode::kFluid && alpha > 0.0;
}

struct PendingEvent {
  EventKind kind = EventKind::kNone;
  int flow = 0;
};

struct EventHorizon {
  double dt = kInf;
  std::vector<PendingEvent> events;
};

// Minimal positive hitting time among queue-content boundaries (0 and the
// s thresholds), the active green clock's bounds, and the pedestrian wait
// caps, under the current constant rates. Fluid-mode semantics.
inline EventHorizon next_event(const HybridState& s, const FlowRates& rates,
                               const ParameterVector& params) {
  EventHorizon h;
  auto consider = [&](double dt, EventKind k, int flow) {
    if (!(dt > 0.0) || dt == kInf) return;
    if (dt < h.dt) {
      h.dt = dt;
      h.events.clear();
    }
    if (dt == h.dt) h.events.push_back({k, flow});
  };
  for (int n = 1; n <= 4; ++n) {
    const double x = s.x[n - 1];
    const double v = flow_slope(x, s.u[n - 1], rates.alpha[n - 1], rates.h);
    const double sn = params.s(n);
    if (v < 0.0) {
      if (x > sn) consider((x - sn) / -v, EventKind::kXDownS, n);
      consider(x / -v, EventKind::kXDown0, n);
    } else if (v > 0.0) {
      if (x < sn) consider((sn - x) / v, EventKind::kXUpS, n);
    }
  }
  const int g = s.green_road();
  const double z = s.z[g - 1];
  if (z < params.theta_min(g)) consider(params.theta_min(g) - z, EventKind::kZUpThetaMin, g);
  if (z < params.theta_max(g)) consider(params.theta_max(g) - z, EventKind::kZUpThetaMax, g);
  for (int n = 3; n <= 4; ++n) {
    if (!peds_present(s.x[n - 1], s.u[n - 1], rates.alpha[n - 1], SimMode::kFluid)) continue;
    const double w = s.w[n - 3];
    if (w < params.theta_w(n)) consider(params.theta_w(n) - w, EventKind::kWUpTheta, n);
  }
  return h;
}

// Integrates the state over an event-free interval. Throws if a state event
// lies strictly inside (0, dt); callers must step exactly to event times.
inline void advance(HybridState& s, double dt, const FlowRates& rates,
                    const ParameterVector& params) {
  if (dt < 0.0) throw EventSkippedError("advance: negative dt");
  if (dt == 0.0) return;
  EventHorizon h = next_event(s, rates, params);
  if (h.dt < dt) throw EventSkippedError("advance: event inside interval");
  for (int n = 0; n < 4; ++n) {
    const double v = flow_slope(s.x[n], s.u[n], rates.alpha[n], rates.h);
    s.x[n] = std::max(0.0, s.x[n] + v * dt);
    if (n >= 2 && peds_present(s.x[n], s.u[n], rates.alpha[n], SimMode::kFluid))
      s.w[n - 2] += dt;
  }
  s.z[s.green_road() - 1] += dt;
  s.t += dt;
}

struct SimOptions {
  std::array<double, 4> weights{1, 1, 1, 1};
  double rate_window = 60.0;        // window for recorded discrete rate estimates
  long max_events = 10'000'000;     // chattering guard
  int max_cascade = 64;             // same-instant switch guard
};

// Event-driven intersection simulator under the quasi-dynamic light policy.
// Supports both fluid and discrete traffic, mid-path parameter updates and
// window cuts (for online estimation); produces replayable event traces.
class Simulator {
 public:
  Simulator(const ArrivalProcessSpec& spec, const ParameterVector& params,
            SimOptions opt = {})
      : spec_(spec), params_(params), opt_(opt) {
    validate_arrival_spec(spec_);
    if (spec_.mode == SimMode::kFluid) {
      for (int n = 1; n <= 4; ++n) {
        fluid_[n - 1] = FluidRatePath(spec_, n);
        alpha_[n - 1] = fluid_[n - 1].rate();
      }
    } else {
      for (int n = 1; n <= 4; ++n) poisson_[n - 1] = PoissonArrivals(spec_, n);
      next_departure_.fill(kInf);
      alpha_.fill(0.0);
    }
    snapshot_begin();
    resolve_indicators();
    // Fluid inflow into a RED queue starts a busy interval at t = 0.
    for (int n = 1; n <= 4; ++n) open_busy_if_growing(n, EventKind::kNone, 0);
    evaluate_control({});
  }

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  const HybridState& state() const { return s_; }
  const ParameterVector& params() const { return params_; }
  const TraceDiagnostics& diagnostics() const { return diag_; }

  void run_until(double t_end) {
    while (s_.t < t_end) {
      double best = t_end;
      pend_.clear();
      auto consider = [&](double t_abs, EventKind k, int flow) {
        if (!(t_abs > s_.t) || t_abs > best) return;
        if (t_abs < best) {
          best = t_abs;
          pend_.clear();
        }
        pend_.push_back({k, flow});
      };
      EventHorizon sh = next_event(s_, rates(), params_);
      for (const PendingEvent& e : sh.events) consider(s_.t + sh.dt, e.kind, e.flow);
      if (spec_.mode == SimMode::kFluid) {
        for (int n = 1; n <= 4; ++n)
          consider(fluid_[n - 1].segment_end(), EventKind::kAlphaChange, n);
      } else {
        for (int n = 1; n <= 4; ++n) {
          consider(poisson_[n - 1].next_time(), EventKind::kArrival, n);
          consider(next_departure_[n - 1], EventKind::kDeparture, n);
        }
      }
      step_to(best);
      if (!pend_.empty()) process_instant();
    }
  }

  // Replaces the policy parameters mid-path (recorded as an exogenous
  // event) and re-evaluates the control against the new thresholds.
  void set_params(const ParameterVector& p) {
    params_ = p;
    instant_begin();
    emit(EventKind::kParamUpdate, 0);
    resolve_indicators();
    stamp_buffered();
    evaluate_control({});
  }

  // Closes the current observation window: appends a boundary record,
  // truncates open busy intervals, and returns everything accumulated since
  // the previous cut. The path itself continues unaffected.
  EventTrace take_trace(EventKind boundary = EventKind::kTraceEnd) {
    instant_begin();
    emit(boundary, 0);
    stamp_buffered();
    EventTrace tr;
    tr.mode = spec_.mode;
    tr.policy = Policy::kQuasiDynamic;
    tr.seed = spec_.seed;
    tr.h = spec_.h;
    tr.t_begin = trace_begin_;
    tr.t_end = s_.t;
    tr.x_begin = x_begin_;
    tr.z_begin = z_begin_;
    tr.w_begin = w_begin_;
    tr.u1_begin = u1_begin_;
    tr.records = std::move(records_);
    records_.clear();
    for (int n = 0; n < 4; ++n) {
      if (in_nep_[n]) {
        // Still busy at the cut: truncate here and continue in the next
        // trace. A busy interval opening exactly at the cut has no content
        // on this side and is left to the next trace entirely.
        if (s_.t > nep_start_[n]) neps_[n].push_back({nep_start_[n], s_.t, true});
        nep_start_[n] = s_.t;
      }
      tr.neps[n] = std::move(neps_[n]);
      neps_[n].clear();
      if (spec_.mode == SimMode::kDiscrete) tr.arrival_times[n] = arrivals_log_[n];
      tr.cost += opt_.weights[n] * cost_int_[n];
      cost_int_[n] = 0.0;
    }
    const double span = tr.t_end - tr.t_begin;
    tr.cost = span > 0.0 ? tr.cost / span : 0.0;
    tr.diagnostics = diag_;
    diag_ = TraceDiagnostics{};
    snapshot_begin();
    return tr;
  }

 private:
  // Discrete queues change only by unit jumps; a zero service rate removes
  // all continuous crossing candidates while keeping clock events live.
  double h_eff() const { return spec_.mode == SimMode::kFluid ? spec_.h : 0.0; }
  FlowRates rates() const { return FlowRates{alpha_, h_eff()}; }
  double slope(int n) const {
    return flow_slope(s_.x[n - 1], s_.u[n - 1], alpha_[n - 1], h_eff());
  }

  void snapshot_begin() {
    trace_begin_ = s_.t;
    x_begin_ = s_.x;
    z_begin_ = s_.z;
    w_begin_ = s_.w;
    u1_begin_ = s_.u[0];
  }

  void step_to(double t_abs) {
    const double dt = t_abs - s_.t;
    if (dt <= 0.0) return;
    for (int n = 0; n < 4; ++n) {
      const double v = slope(n + 1);
      const double nx = std::max(0.0, s_.x[n] + v * dt);
      cost_int_[n] += spec_.mode == SimMode::kFluid ? 0.5 * (s_.x[n] + nx) * dt
                                                    : s_.x[n] * dt;
      s_.x[n] = nx;
      if (n >= 2 && peds_present(s_.x[n], s_.u[n], alpha_[n], spec_.mode))
        s_.w[n - 2] += dt;
    }
    s_.z[s_.green_road() - 1] += dt;
    s_.t = t_abs;
  }

  void instant_begin() {
    pre_region_ = region_;
    pre_p_ = p_;
    buffer_from_ = records_.size();
  }

  void emit(EventKind k, int flow, EventKind trig_kind = EventKind::kNone, int trig_flow = 0) {
    EventRecord r;
    r.t = s_.t;
    r.kind = k;
    r.flow = flow;
    r.x = s_.x;
    r.z = s_.z;
    r.w = s_.w;
    r.u1 = s_.u[0];
    r.region = region_;
    r.pre_region = pre_region_;
    r.p = p_;
    r.pre_p = pre_p_;
    if (spec_.mode == SimMode::kFluid) {
      r.alpha = alpha_;
    } else {
      for (int n = 0; n < 4; ++n)
        r.alpha[n] = estimate_arrival_rate(arrivals_log_[n], s_.t, opt_.rate_window);
    }
    r.trigger_kind = trig_kind;
    r.trigger_flow = trig_flow;
    records_.push_back(r);
    if (++diag_.events_processed > opt_.max_events)
      throw NonconvergenceError("event budget exceeded; policy parameters likely chatter");
  }

  // Rewrites region/p columns of records buffered since instant_begin with
  // the resolved values of this instant.
  void stamp_buffered() {
    for (std::size_t i = buffer_from_; i < records_.size(); ++i) {
      records_[i].region = region_;
      records_[i].p = p_;
    }
    buffer_from_ = records_.size();
  }

  void open_nep(int flow) {
    if (in_nep_[flow - 1]) return;
    in_nep_[flow - 1] = true;
    nep_start_[flow - 1] = s_.t;
  }

  void close_nep(int flow) {
    if (!in_nep_[flow - 1]) return;
    in_nep_[flow - 1] = false;
    // A same-instant open/close pair carries no content; don't record it.
    if (s_.t > nep_start_[flow - 1])
      neps_[flow - 1].push_back({nep_start_[flow - 1], s_.t, false});
  }

  // Starts a busy interval for a queue sitting at zero whose net drift just
  // became positive (rate change or light switch). The trigger marks
  // switch-induced starts; exogenous ones carry kNone.
  void open_busy_if_growing(int n, EventKind trig_kind, int trig_flow) {
    if (in_nep_[n - 1]) return;
    if (s_.x[n - 1] > kFluidEps) return;
    if (slope(n) <= 0.0) return;
    emit(EventKind::kXUp0, n, trig_kind, trig_flow);
    open_nep(n);
  }

  // Effective queue content for classification at the current instant:
  // a queue at zero with positive drift counts as just-positive, and a
  // fluid queue draining through its threshold counts as just-below it.
  double x_eff(int n) const {
    const double x = s_.x[n - 1];
    const double sn = params_.s(n);
    const double v = slope(n);
    if (x <= kFluidEps) return v > 0.0 ? 2.0 * kFluidEps : x;
    if (spec_.mode == SimMode::kFluid && x == sn && v < 0.0)
      return sn - std::min(1e-9, 0.5 * sn);
    return x;
  }

  void resolve_indicators() {
    region_ = classify_region(x_eff(1), x_eff(2), params_.s(1), params_.s(2));
    for (int r = 1; r <= 2; ++r) {
      const int n = r + 2;
      const int np = pedestrian_indicator(x_eff(n), s_.w[n - 3], params_.s(n),
                                          params_.theta_w(n));
      if (np != p_[r - 1]) {
        p_[r - 1] = np;
        emit(np == 1 ? EventKind::kPUp1 : EventKind::kPDown0, r);
      }
    }
  }

  void process_instant() {
    instant_begin();
    std::stable_sort(pend_.begin(), pend_.end(), [](const PendingEvent& a, const PendingEvent& b) {
      auto rank = [](const PendingEvent& e) {
        int cat;
        switch (e.kind) {
          case EventKind::kXDownS: cat = 0; break;
          case EventKind::kXDown0: cat = 1; break;
          case EventKind::kXUpS: cat = 2; break;
          case EventKind::kArrival: cat = 3; break;
          case EventKind::kDeparture: cat = 4; break;
          case EventKind::kAlphaChange: cat = 5; break;
          case EventKind::kZUpThetaMin: cat = 6; break;
          case EventKind::kZUpThetaMax: cat = 7; break;
          default: cat = 8; break;
        }
        return cat * 8 + e.flow;
      };
      return rank(a) < rank(b);
    });
    for (const PendingEvent& e : pend_) apply_primitive(e);
    resolve_indicators();
    stamp_buffered();
    evaluate_control(pend_);
  }

  void apply_primitive(const PendingEvent& e) {
    const int n = e.flow;
    switch (e.kind) {
      case EventKind::kXDown0:
        s_.x[n - 1] = 0.0;
        emit(EventKind::kXDown0, n);
        close_nep(n);
        break;
      case EventKind::kXDownS:
      case EventKind::kXUpS:
        s_.x[n - 1] = params_.s(n);
        emit(e.kind, n);
        break;
      case EventKind::kZUpThetaMin:
        s_.z[n - 1] = params_.theta_min(n);
        emit(e.kind, n);
        break;
      case EventKind::kZUpThetaMax:
        s_.z[n - 1] = params_.theta_max(n);
        emit(e.kind, n);
        break;
      case EventKind::kWUpTheta:
        s_.w[n - 3] = params_.theta_w(n);
        emit(e.kind, n);
        break;
      case EventKind::kAlphaChange: {
        const double old = alpha_[n - 1];
        fluid_[n - 1].advance_to(s_.t);
        const double now = fluid_[n - 1].rate();
        alpha_[n - 1] = now;
        EventKind k = EventKind::kAlphaChange;
        if (old > 0.0 && now <= 0.0) k = EventKind::kAlphaDown0;
        if (old <= 0.0 && now > 0.0) k = EventKind::kAlphaUp0;
        emit(k, n);
        open_busy_if_growing(n, EventKind::kNone, 0);
        break;
      }
      case EventKind::kArrival: {
        arrivals_log_[n - 1].push_back(s_.t);
        const double pre = s_.x[n - 1];
        s_.x[n - 1] = pre + 1.0;
        emit(EventKind::kArrival, n);
        if (pre <= kFluidEps) {
          emit(EventKind::kXUp0, n);
          open_nep(n);
        }
        if (pre < params_.s(n) && s_.x[n - 1] >= params_.s(n)) emit(EventKind::kXUpS, n);
        poisson_[n - 1].pop();
        if (s_.u[n - 1] == 1 && next_departure_[n - 1] == kInf)
          next_departure_[n - 1] = s_.t + 1.0 / spec_.h;
        break;
      }
      case EventKind::kDeparture: {
        const double pre = s_.x[n - 1];
        s_.x[n - 1] = std::max(0.0, pre - 1.0);
        emit(EventKind::kDeparture, n);
        if (pre >= params_.s(n) && s_.x[n - 1] < params_.s(n)) emit(EventKind::kXDownS, n);
        if (s_.x[n - 1] <= kFluidEps) {
          emit(EventKind::kXDown0, n);
          close_nep(n);
          next_departure_[n - 1] = kInf;
        } else {
          next_departure_[n - 1] = s_.t + 1.0 / spec_.h;
        }
        break;
      }
      default:
        break;
    }
  }

  // A green clock reading exactly zero belongs to a switch at the current
  // instant (or the initial condition) and is read as just-started.
  ClockView view_of(int road, const std::array<double, 2>& z) const {
    const bool green = s_.green_road() == road;
    return ClockView{green ? z[road - 1] : 0.0, green && z[road - 1] == 0.0};
  }

  void evaluate_control(const std::vector<PendingEvent>& primitives) {
    int cascades = 0;
    for (;;) {
      ControlDecision d = control_decision(region_, p_, view_of(1, s_.z), view_of(2, s_.z),
                                           params_, s_.u[0]);
      if (!d.switch_now) break;
      if (++cascades > opt_.max_cascade)
        throw NonconvergenceError("control law re-switches without time progress");
      diag_.max_cascade_depth = std::max(diag_.max_cascade_depth, cascades);
      PendingEvent trig = attribute_trigger(primitives, d.u1);
      apply_switch(d.u1, trig);
    }
  }

  // Counterfactual attribution: the observable event at this instant whose
  // undoing restores the previous control value. No such event means the
  // switch was induced exogenously (rate change, arrival, parameter update).
  PendingEvent attribute_trigger(const std::vector<PendingEvent>& primitives, int new_u1) {
    auto order_key = [](const PendingEvent& e) {
      auto base = [](EventKind k) {
        switch (k) {
          case EventKind::kXDown0: return 0;
          case EventKind::kXDownS: return 1;
          case EventKind::kXUpS: return 2;
          case EventKind::kZUpThetaMin: return 3;
          case EventKind::kZUpThetaMax: return 4;
          case EventKind::kWUpTheta: return 5;
          default: return 6;
        }
      };
      return base(e.kind) * 8 + e.flow;
    };
    std::vector<PendingEvent> cands;
    for (const PendingEvent& e : primitives) {
      switch (e.kind) {
        case EventKind::kXDown0:
        case EventKind::kXDownS:
        case EventKind::kXUpS:
        case EventKind::kZUpThetaMin:
        case EventKind::kZUpThetaMax:
        case EventKind::kWUpTheta:
          cands.push_back(e);
          break;
        default:
          break;
      }
    }
    std::sort(cands.begin(), cands.end(), [&](const PendingEvent& a, const PendingEvent& b) {
      return order_key(a) < order_key(b);
    });
    for (const PendingEvent& e : cands) {
      std::array<double, 4> xe{x_eff(1), x_eff(2), x_eff(3), x_eff(4)};
      std::array<double, 2> w = s_.w;
      std::array<double, 2> z = s_.z;
      const double tiny = 1e-9;
      switch (e.kind) {
        case EventKind::kXDown0: xe[e.flow - 1] = 2.0 * kFluidEps; break;
        case EventKind::kXDownS: xe[e.flow - 1] = params_.s(e.flow) + tiny; break;
        case EventKind::kXUpS:
          xe[e.flow - 1] = std::max(0.5 * params_.s(e.flow), params_.s(e.flow) - tiny);
          break;
        case EventKind::kZUpThetaMin:
          z[e.flow - 1] = std::max(0.0, params_.theta_min(e.flow) - tiny);
          break;
        case EventKind::kZUpThetaMax:
          z[e.flow - 1] = std::max(0.0, params_.theta_max(e.flow) - tiny);
          break;
        case EventKind::kWUpTheta:
          w[e.flow - 3] = std::max(0.0, params_.theta_w(e.flow) - tiny);
          break;
        default:
          break;
      }
      Region reg = classify_region(xe[0], xe[1], params_.s(1), params_.s(2));
      std::array<int, 2> pc;
      for (int r = 1; r <= 2; ++r)
        pc[r - 1] = pedestrian_indicator(xe[r + 1], w[r - 1], params_.s(r + 2),
                                         params_.theta_w(r + 2));
      ControlDecision cf =
          control_decision(reg, pc, view_of(1, z), view_of(2, z), params_, s_.u[0]);
      if (!(cf.switch_now && cf.u1 == new_u1)) return e;
    }
    return PendingEvent{EventKind::kNone, 0};
  }

  void apply_switch(int new_u1, const PendingEvent& trig) {
    ++diag_.switch_count;
    if (region_ == Region::kX0 && s_.u[0] == 1 && p_[0] == 1 && p_[1] == 0)
      ++diag_.x0_forced_switches;
    const int new_green = new_u1 == 1 ? 1 : 2;
    const int new_red = 3 - new_green;
    emit(new_u1 == 0 ? EventKind::kG2R : EventKind::kR2G, 1, trig.kind, trig.flow);
    const std::size_t sw_idx = records_.size() - 1;
    const EventKind sw_kind = records_[sw_idx].kind;
    s_.u = expand_control(new_u1);
    s_.z[new_red - 1] = 0.0;
    s_.z[new_green - 1] = 0.0;
    // Pedestrian flow gaining GREEN has its waiting clock cleared.
    s_.w[new_u1 == 0 ? 0 : 1] = 0.0;
    if (spec_.mode == SimMode::kDiscrete) {
      for (int n = 1; n <= 4; ++n) {
        if (s_.u[n - 1] == 0) {
          next_departure_[n - 1] = kInf;
        } else if (s_.x[n - 1] > kFluidEps && next_departure_[n - 1] == kInf) {
          next_departure_[n - 1] = s_.t + 1.0 / spec_.h;
        }
      }
    } else {
      // Queues at zero that start growing under the new RED: switch-induced
      // busy-interval starts.
      for (int n = 1; n <= 4; ++n)
        if (s_.u[n - 1] == 0) open_busy_if_growing(n, sw_kind, 1);
    }
    // The reset waiting clock may clear crossing demand; region may move to
    // the positive side for queues that now build.
    resolve_indicators();
    stamp_buffered();
    // The switch record itself carries the post-switch control and clocks.
    records_[sw_idx].u1 = s_.u[0];
    records_[sw_idx].z = s_.z;
    records_[sw_idx].w = s_.w;
  }

  ArrivalProcessSpec spec_;
  ParameterVector params_;
  SimOptions opt_;
  HybridState s_;
  std::array<FluidRatePath, 4> fluid_;
  std::array<PoissonArrivals, 4> poisson_;
  std::array<double, 4> alpha_{};
  std::array<double, 4> next_departure_{kInf, kInf, kInf, kInf};
  Region region_ = Region::kX0;
  Region pre_region_ = Region::kX0;
  std::array<int, 2> p_{0, 0};
  std::array<int, 2> pre_p_{0, 0};
  std::vector<PendingEvent> pend_;
  std::vector<EventRecord> records_;
  std::size_t buffer_from_ = 0;
  std::array<std::vector<NepInterval>, 4> neps_;
  std::array<bool, 4> in_nep_{false, false, false, false};
  std::array<double, 4> nep_start_{};
  std::array<std::vector<double>, 4> arrivals_log_;
  std::array<double, 4> cost_int_{};
  double trace_begin_ = 0.0;
  std::array<double, 4> x_begin_{};
  std::array<double, 2> z_begin_{};
  std::array<double, 2> w_begin_{};
  int u1_begin_ = 1;
  TraceDiagnostics diag_;
};

// Unsignalized reference policy, discrete mode only: a single
// first-come-first-leave crossing served at rate h, shared by both vehicle
// queues; a waiting pedestrian queue preempts its road until it empties,
// pedestrian queues themselves drain at spacing 1/h.
class BaselineSimulator {
 public:
  BaselineSimulator(const ArrivalProcessSpec& spec, SimOptions opt = {})
      : spec_(spec), opt_(opt) {
    validate_arrival_spec(spec_);
    if (spec_.mode != SimMode::kDiscrete)
      throw std::invalid_argument("baseline policy requires discrete mode");
    for (int n = 1; n <= 4; ++n) poisson_[n - 1] = PoissonArrivals(spec_, n);
  }

  EventTrace run(double t_end) {
    while (t_ < t_end) {
      double best = t_end;
      EventKind kind = EventKind::kNone;
      int flow = 0;
      auto consider = [&](double t_abs, EventKind k, int f) {
        if (t_abs > t_ && t_abs < best) {
          best = t_abs;
          kind = k;
          flow = f;
        }
      };
      for (int n = 1; n <= 4; ++n) consider(poisson_[n - 1].next_time(), EventKind::kArrival, n);
      consider(veh_completion_, EventKind::kDeparture, serving_road_);
      consider(ped_completion_[0], EventKind::kDeparture, 3);
      consider(ped_completion_[1], EventKind::kDeparture, 4);
      step_to(best);
      if (kind == EventKind::kNone) continue;
      if (kind == EventKind::kArrival) {
        arrivals_log_[flow - 1].push_back(t_);
        x_[flow - 1] += 1.0;
        if (flow <= 2) stamps_[flow - 1].push_back(t_);
        emit(EventKind::kArrival, flow);
        if (x_[flow - 1] == 1.0) emit(EventKind::kXUp0, flow);
        poisson_[flow - 1].pop();
        if (flow >= 3 && ped_completion_[flow - 3] == kInf)
          ped_completion_[flow - 3] = t_ + 1.0 / spec_.h;
      } else if (flow >= 3) {
        x_[flow - 1] -= 1.0;
        ped_completion_[flow - 3] = x_[flow - 1] > 0.0 ? t_ + 1.0 / spec_.h : kInf;
        emit(EventKind::kDeparture, flow);
        if (x_[flow - 1] == 0.0) emit(EventKind::kXDown0, flow);
      } else {
        x_[flow - 1] -= 1.0;
        stamps_[flow - 1].pop_front();
        veh_completion_ = kInf;
        serving_road_ = 0;
        emit(EventKind::kDeparture, flow);
        if (x_[flow - 1] == 0.0) emit(EventKind::kXDown0, flow);
      }
      try_start_vehicle();
    }
    return finish(t_end);
  }

 private:
  void step_to(double t_abs) {
    const double dt = t_abs - t_;
    if (dt <= 0.0) return;
    for (int n = 0; n < 4; ++n) cost_int_[n] += x_[n] * dt;
    t_ = t_abs;
  }

  // A road is open to vehicles while no pedestrian is waiting to cross it.
  bool road_open(int r) const { return x_[r + 1] == 0.0; }

  void try_start_vehicle() {
    if (serving_road_ != 0) return;
    int pick = 0;
    double oldest = kInf;
    for (int r = 1; r <= 2; ++r) {
      if (!road_open(r) || stamps_[r - 1].empty()) continue;
      if (stamps_[r - 1].front() < oldest) {
        oldest = stamps_[r - 1].front();
        pick = r;
      }
    }
    if (pick != 0) {
      serving_road_ = pick;
      veh_completion_ = t_ + 1.0 / spec_.h;
    }
  }

  void emit(EventKind k, int flow) {
    EventRecord r;
    r.t = t_;
    r.kind = k;
    r.flow = flow;
    r.x = x_;
    r.u1 = road_open(1) ? 1 : 0;
    r.region = Region::kX0;
    r.pre_region = Region::kX0;
    for (int n = 0; n < 4; ++n)
      r.alpha[n] = estimate_arrival_rate(arrivals_log_[n], t_, opt_.rate_window);
    records_.push_back(r);
    if (++diag_.events_processed > opt_.max_events)
      throw NonconvergenceError("event budget exceeded in baseline run");
  }

  EventTrace finish(double t_end) {
    step_to(t_end);
    EventRecord r;
    r.t = t_;
    r.kind = EventKind::kTraceEnd;
    r.x = x_;
    records_.push_back(r);
    EventTrace tr;
    tr.mode = SimMode::kDiscrete;
    tr.policy = Policy::kBaseline;
    tr.seed = spec_.seed;
    tr.h = spec_.h;
    tr.t_begin = 0.0;
    tr.t_end = t_end;
    tr.records = std::move(records_);
    for (int n = 0; n < 4; ++n) {
      tr.arrival_times[n] = std::move(arrivals_log_[n]);
      tr.cost += opt_.weights[n] * cost_int_[n];
    }
    tr.cost = t_end > 0.0 ? tr.cost / t_end : 0.0;
    tr.diagnostics = diag_;
    return tr;
  }

  ArrivalProcessSpec spec_;
  SimOptions opt_;
  double t_ = 0.0;
  std::array<double, 4> x_{};
  std::array<PoissonArrivals, 4> poisson_;
  std::array<std::deque<double>, 2> stamps_;
  int serving_road_ = 0;
  double veh_completion_ = kInf;
  std::array<double, 2> ped_completion_{kInf, kInf};
  std::array<std::vector<double>, 4> arrivals_log_;
  std::array<double, 4> cost_int_{};
  std::vector<EventRecord> records_;
  TraceDiagnostics diag_;
};

inline EventTrace run_sample_path(const ArrivalProcessSpec& spec, const ParameterVector& params,
                                  double t_end, Policy policy = Policy::kQuasiDynamic,
                                  SimOptions opt = {}) {
  if (policy == Policy::kBaseline) return BaselineSimulator(spec, opt).run(t_end);
  Simulator sim(spec, params, opt);
  sim.run_until(t_end);
  return sim.take_trace(EventKind::kTraceEnd);
}

// Weighted time-average queue content recomputed from a trace's records.
inline double cost_of_trace(const EventTrace& trace, const std::array<double, 4>& weights,
                            double horizon) {
  std::array<double, 4> total{};
  double prev_t = trace.t_begin;
  std::array<double, 4> prev_x = trace.x_begin;
  for (const EventRecord& r : trace.records) {
    const double dt = r.t - prev_t;
    if (dt > 0.0) {
      for (int n = 0; n < 4; ++n)
        total[n] += trace.mode == SimMode::kFluid ? 0.5 * (prev_x[n] + r.x[n]) * dt
                                                  : prev_x[n] * dt;
    }
    prev_t = r.t;
    prev_x = r.x;
  }
  double cost = 0.0;
  for (int n = 0; n < 4; ++n) cost += weights[n] * total[n];
  return horizon > 0.0 ? cost / horizon : 0.0;
}

}  // namespace tlc
