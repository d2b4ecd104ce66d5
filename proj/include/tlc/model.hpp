#pragma once

#include <array>
#include <cstddef>

#include "tlc/params.hpp"

namespace tlc {

// Absolute zero test for fluid queue contents. Discrete contents are exact.
inline constexpr double kFluidEps = 1e-9;

// Flow indexing convention, used throughout: flows 1 and 2 are the vehicle
// queues of roads 1 and 2; flows 3 and 4 are the pedestrian queues crossing
// roads 1 and 2. Pedestrian flow n+2 moves together with vehicle flow
// 3 - n (crossing a road requires its vehicles to be stopped).

// Partition of the vehicle-queue plane (x1, x2) relative to the thresholds
// s1, s2. The primed labels are the high-side variants (x >= s).
enum class Region { kX0, kX1, kX1p, kX2, kX2p, kX3, kX4, kX5, kX6 };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::kX0: return "X0";
    case Region::kX1: return "X1";
    case Region::kX1p: return "X1p";
    case Region::kX2: return "X2";
    case Region::kX2p: return "X2p";
    case Region::kX3: return "X3";
    case Region::kX4: return "X4";
    case Region::kX5: return "X5";
    case Region::kX6: return "X6";
  }
  return "?";
}

// Boundary convention: x == s classifies to the high side, x <= eps is empty.
inline Region classify_region(double x1, double x2, double s1, double s2) {
  const bool e1 = x1 <= kFluidEps, e2 = x2 <= kFluidEps;
  const bool h1 = !e1 && x1 >= s1, h2 = !e2 && x2 >= s2;
  if (e1 && e2) return Region::kX0;
  if (e2) return h1 ? Region::kX1p : Region::kX1;
  if (e1) return h2 ? Region::kX2p : Region::kX2;
  if (h1 && h2) return Region::kX6;
  if (h1) return Region::kX5;
  if (h2) return Region::kX4;
  return Region::kX3;
}

// Crossing-demand indicator of a pedestrian queue: content at or above the
// threshold, or the oldest pedestrian has waited past the cap.
inline int pedestrian_indicator(double x, double w, double s, double theta) {
  return (x >= s || w >= theta) ? 1 : 0;
}

// Departure rate of a flow: service at h while backlogged under GREEN,
// pass-through at alpha when empty under GREEN, blocked under RED.
inline double departure_rate(double x, int u, double alpha, double h) {
  if (u == 0) return 0.0;
  return x > kFluidEps ? h : alpha;
}

// Continuous and logical state of the intersection. z[r] is the running
// green-phase clock of road r+1 (zero while that road is RED); w[k] is the
// waiting clock of pedestrian flow k+3. u is always one of [1,0,0,1] and
// [0,1,1,0].
struct HybridState {
  std::array<double, 4> x{0, 0, 0, 0};
  std::array<double, 2> z{0, 0};
  std::array<double, 2> w{0, 0};
  std::array<int, 4> u{1, 0, 0, 1};
  double t = 0.0;

  int u1() const { return u[0]; }
  // Road with the GREEN vehicle light (1 or 2).
  int green_road() const { return u[0] == 1 ? 1 : 2; }
};

}  // namespace tlc
