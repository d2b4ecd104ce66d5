#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "tlc/events.hpp"
#include "tlc/model.hpp"
#include "tlc/params.hpp"
#include "tlc/util.hpp"

namespace tlc {

struct IpaOptions {
  // Value the per-segment sensitivity with the update applied at the
  // segment's right end instead of its left (kept for comparison; the
  // default left-endpoint form matches the piecewise-constant dynamics).
  bool literal_segments = false;
  // |drift| below this at a queue-boundary crossing counts as degenerate;
  // the event-time derivative is then forced to zero and counted.
  double degenerate_eps = 1e-6;
};

struct GradientReport {
  Vec10 grad{};
  double L = 0.0;
  long degenerate_count = 0;
  long events_processed = 0;
};

// Sample-path gradient of the weighted time-average queue content with
// respect to the ten control parameters, evaluated from one event trace.
//
// Queue sensitivities x' are piecewise constant; they jump only at busy
// interval starts, queue emptyings, and light switches. Event-time
// derivatives follow from the hitting-time relations of the piecewise
// linear flow dynamics; on discrete traces the same relations are driven
// by the windowed rate estimates carried on the records.
inline GradientReport ipa_gradient(const EventTrace& trace,
                                   const std::array<double, 4>& weights,
                                   IpaOptions opt = {}) {
  GradientReport rep;
  rep.events_processed = static_cast<long>(trace.records.size());
  const double span = trace.t_end - trace.t_begin;
  if (span <= 0.0) return rep;
  const double h = trace.h;

  std::array<Vec10, 4> xp{};           // dx_n/dv, one row per flow
  std::array<Vec10, 4> acc{};          // integral of x' over busy intervals
  std::array<double, 4> xint{};        // integral of x, for the cost value
  Vec10 last_sw{};                     // event-time derivative of the last switch
  std::array<bool, 4> in_nep;
  for (int n = 0; n < 4; ++n) in_nep[n] = trace.x_begin[n] > kFluidEps;

  // Event-time derivatives computed at the current instant, so a switch can
  // reuse its trigger's value even after that event's own state update.
  struct CacheEntry {
    EventKind kind;
    int flow;
    Vec10 tau;
  };
  std::vector<CacheEntry> cache;
  double cache_t = trace.t_begin - 1.0;

  auto flow_u = [](int n, int u1) { return (n == 1 || n == 4) ? u1 : 1 - u1; };

  auto degenerate = [&](double v, bool want_positive) {
    if (want_positive ? v > opt.degenerate_eps : v < -opt.degenerate_eps) return false;
    ++rep.degenerate_count;
    return true;
  };

  double prev_t = trace.t_begin;
  std::array<double, 4> prev_x = trace.x_begin;

  for (const EventRecord& r : trace.records) {
    const double seg = r.t - prev_t;
    if (r.t != cache_t) {
      cache.clear();
      cache_t = r.t;
    }
    if (seg > 0.0) {
      for (int n = 0; n < 4; ++n)
        xint[n] += trace.mode == SimMode::kFluid ? 0.5 * (prev_x[n] + r.x[n]) * seg
                                                 : prev_x[n] * seg;
    }
    const std::array<bool, 4> seg_nep = in_nep;
    const bool closing = r.kind == EventKind::kXDown0 || r.kind == EventKind::kTraceEnd ||
                         r.kind == EventKind::kWindowBoundary;
    const bool update_first = opt.literal_segments && !closing;

    auto accumulate = [&]() {
      if (seg <= 0.0) return;
      for (int n = 0; n < 4; ++n) {
        if (!seg_nep[n]) continue;
        for (std::size_t i = 0; i < 10; ++i) acc[n][i] += xp[n][i] * seg;
      }
    };

    auto update = [&]() {
      const int n = r.flow;
      switch (r.kind) {
        case EventKind::kXUp0: {
          const bool sw_induced =
              r.trigger_kind == EventKind::kG2R || r.trigger_kind == EventKind::kR2G;
          for (std::size_t i = 0; i < 10; ++i)
            xp[n - 1][i] = sw_induced ? -r.alpha[n - 1] * last_sw[i] : 0.0;
          in_nep[n - 1] = true;
          break;
        }
        case EventKind::kXDown0: {
          const double v = r.alpha[n - 1] - h;
          Vec10 tau{};
          if (!degenerate(v, false))
            for (std::size_t i = 0; i < 10; ++i) tau[i] = -xp[n - 1][i] / v;
          cache.push_back({r.kind, n, tau});
          xp[n - 1].fill(0.0);
          in_nep[n - 1] = false;
          break;
        }
        case EventKind::kXUpS:
        case EventKind::kXDownS: {
          const int u = flow_u(n, r.u1);
          const double v = u == 1 ? r.alpha[n - 1] - h : r.alpha[n - 1];
          const bool up = r.kind == EventKind::kXUpS;
          Vec10 tau{};
          if (!degenerate(v, up)) {
            const std::size_t si = kS1 + static_cast<std::size_t>(n - 1);
            for (std::size_t i = 0; i < 10; ++i)
              tau[i] = ((i == si ? 1.0 : 0.0) - xp[n - 1][i]) / v;
          }
          cache.push_back({r.kind, n, tau});
          break;
        }
        case EventKind::kZUpThetaMin:
        case EventKind::kZUpThetaMax: {
          const std::size_t ti =
              n == 1 ? (r.kind == EventKind::kZUpThetaMin ? kTheta1Min : kTheta1Max)
                     : (r.kind == EventKind::kZUpThetaMin ? kTheta2Min : kTheta2Max);
          Vec10 tau = last_sw;
          tau[ti] += 1.0;
          cache.push_back({r.kind, n, tau});
          break;
        }
        case EventKind::kWUpTheta: {
          Vec10 tau{};
          tau[n == 3 ? kTheta3 : kTheta4] = 1.0;
          cache.push_back({r.kind, n, tau});
          break;
        }
        case EventKind::kG2R:
        case EventKind::kR2G: {
          Vec10 tau{};
          if (r.trigger_kind != EventKind::kNone) {
            for (const CacheEntry& c : cache) {
              if (c.kind == r.trigger_kind && c.flow == r.trigger_flow) {
                tau = c.tau;
                break;
              }
            }
          }
          for (int m = 1; m <= 4; ++m) {
            if (!in_nep[m - 1]) continue;
            const double sgn = flow_u(m, r.u1) == 0 ? -1.0 : 1.0;
            for (std::size_t i = 0; i < 10; ++i) xp[m - 1][i] += sgn * h * tau[i];
          }
          last_sw = tau;
          break;
        }
        default:
          break;
      }
    };

    if (update_first) {
      update();
      accumulate();
    } else {
      accumulate();
      update();
    }
    prev_t = r.t;
    prev_x = r.x;
  }

  for (int n = 0; n < 4; ++n) {
    rep.L += weights[n] * xint[n] / span;
    for (std::size_t i = 0; i < 10; ++i) rep.grad[i] += weights[n] * acc[n][i] / span;
  }
  return rep;
}

}  // namespace tlc
