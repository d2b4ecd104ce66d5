#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "tlc/model.hpp"
#include "tlc/util.hpp"

namespace tlc {

enum class EventKind {
  kNone,
  kXDown0,      // queue n empties
  kXUp0,        // queue n leaves zero (start of a busy interval)
  kXUpS,        // queue n reaches its threshold from below
  kXDownS,      // queue n falls below its threshold
  kAlphaDown0,  // arrival rate of flow n drops to zero
  kAlphaUp0,    // arrival rate of flow n becomes positive
  kAlphaChange, // other piecewise-constant rate change
  kArrival,     // discrete unit arrival
  kDeparture,   // discrete unit departure
  kZUpThetaMin, // green clock of road n reaches its min green
  kZUpThetaMax, // green clock of road n reaches its max green
  kWUpTheta,    // waiting clock of pedestrian flow n reaches its cap
  kPUp1,        // crossing-demand indicator of road n sets
  kPDown0,      // crossing-demand indicator of road n clears
  kG2R,         // road n vehicle light GREEN -> RED (paired with R2G of the other road)
  kR2G,         // road n vehicle light RED -> GREEN
  kParamUpdate, // controller parameters replaced mid-path
  kWindowBoundary,
  kTraceEnd,
};

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::kNone: return "none";
    case EventKind::kXDown0: return "x_down_0";
    case EventKind::kXUp0: return "x_up_0";
    case EventKind::kXUpS: return "x_up_s";
    case EventKind::kXDownS: return "x_down_s";
    case EventKind::kAlphaDown0: return "alpha_down_0";
    case EventKind::kAlphaUp0: return "alpha_up_0";
    case EventKind::kAlphaChange: return "alpha_change";
    case EventKind::kArrival: return "arrival";
    case EventKind::kDeparture: return "departure";
    case EventKind::kZUpThetaMin: return "z_up_theta_min";
    case EventKind::kZUpThetaMax: return "z_up_theta_max";
    case EventKind::kWUpTheta: return "w_up_theta";
    case EventKind::kPUp1: return "p_up_1";
    case EventKind::kPDown0: return "p_down_0";
    case EventKind::kG2R: return "g2r";
    case EventKind::kR2G: return "r2g";
    case EventKind::kParamUpdate: return "param_update";
    case EventKind::kWindowBoundary: return "window_boundary";
    case EventKind::kTraceEnd: return "trace_end";
  }
  return "?";
}

// One observed event. State columns are the values right after the event
// is applied; pre_region/pre_p are the values before any event at this
// timestamp. Switch records name the observable event that caused them in
// trigger_kind/trigger_flow (kNone means exogenous).
struct EventRecord {
  double t = 0.0;
  EventKind kind = EventKind::kNone;
  int flow = 0;  // 1..4 for flow events, road 1..2 for z/p/switch events, else 0
  std::array<double, 4> x{};
  std::array<double, 2> z{};
  std::array<double, 2> w{};
  int u1 = 1;
  Region region = Region::kX0;
  Region pre_region = Region::kX0;
  std::array<int, 2> p{};
  std::array<int, 2> pre_p{};
  std::array<double, 4> alpha{};  // exact rates (fluid) or windowed estimates (discrete)
  EventKind trigger_kind = EventKind::kNone;
  int trigger_flow = 0;
};

// Maximal interval over which a queue stays busy. 'open' marks truncation
// by the horizon or a window cut rather than an observed emptying.
struct NepInterval {
  double xi = 0.0;
  double eta = 0.0;
  bool open = false;
};

struct TraceDiagnostics {
  long events_processed = 0;
  long switch_count = 0;
  // Switches forced by the literal empty-intersection rule when only road 1
  // has crossing demand; counted so chattering-prone traces can be flagged.
  long x0_forced_switches = 0;
  int max_cascade_depth = 0;
};

enum class SimMode { kFluid, kDiscrete };
enum class Policy { kQuasiDynamic, kBaseline };

struct EventTrace {
  SimMode mode = SimMode::kFluid;
  Policy policy = Policy::kQuasiDynamic;
  std::uint64_t seed = 0;
  double h = 1.2;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::array<double, 4> x_begin{};
  std::array<double, 2> z_begin{};
  std::array<double, 2> w_begin{};
  int u1_begin = 1;
  std::vector<EventRecord> records;
  std::array<std::vector<NepInterval>, 4> neps;
  // Arrival epochs per flow (discrete mode only), for rate estimation.
  std::array<std::vector<double>, 4> arrival_times;
  // Realized weighted time-average queue content over [t_begin, t_end].
  double cost = 0.0;
  TraceDiagnostics diagnostics;
};

inline void write_trace_csv(const EventTrace& trace, std::ostream& os) {
  os << "time,event_kind,flow,x1,x2,x3,x4,z1,z2,w3,w4,u1,region,p1,p2,"
        "alpha_est_1,alpha_est_2,alpha_est_3,alpha_est_4\n";
  for (const EventRecord& r : trace.records) {
    os << fmt_fixed(r.t, 9) << ',' << to_string(r.kind) << ',' << r.flow;
    for (double v : r.x) os << ',' << fmt_fixed(v, 6);
    os << ',' << fmt_fixed(r.z[0], 6) << ',' << fmt_fixed(r.z[1], 6);
    os << ',' << fmt_fixed(r.w[0], 6) << ',' << fmt_fixed(r.w[1], 6);
    os << ',' << r.u1 << ',' << to_string(r.region) << ',' << r.p[0] << ',' << r.p[1];
    for (double v : r.alpha) os << ',' << fmt_fixed(v, 6);
    os << '\n';
  }
}

}  // namespace tlc
