#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "tlc/util.hpp"

namespace tlc {

// Index layout of the controllable parameter vector. Reported indices are
// 1-based, so offending_index = enum value + 1.
enum ParamIndex : std::size_t {
  kTheta1Min = 0,
  kTheta1Max = 1,
  kTheta2Min = 2,
  kTheta2Max = 3,
  kTheta3 = 4,
  kTheta4 = 5,
  kS1 = 6,
  kS2 = 7,
  kS3 = 8,
  kS4 = 9,
};

class ParameterError : public std::runtime_error {
 public:
  ParameterError(std::size_t index_1based, const std::string& msg)
      : std::runtime_error("parameter " + std::to_string(index_1based) + ": " + msg),
        index_(index_1based) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Controllable policy parameters: per-road green bounds, pedestrian wait
// caps, and queue-content thresholds.
struct ParameterVector {
  Vec10 v{};

  double theta_min(int road) const { return v[road == 1 ? kTheta1Min : kTheta2Min]; }
  double theta_max(int road) const { return v[road == 1 ? kTheta1Max : kTheta2Max]; }
  // Pedestrian wait cap; flow is 3 or 4.
  double theta_w(int flow) const { return v[flow == 3 ? kTheta3 : kTheta4]; }
  // Queue threshold; flow is 1..4.
  double s(int flow) const { return v[kS1 + static_cast<std::size_t>(flow - 1)]; }

  double operator[](std::size_t i) const { return v[i]; }
  double& operator[](std::size_t i) { return v[i]; }
};

inline ParameterVector validate_parameters(const Vec10& raw) {
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) throw ParameterError(i + 1, "must be finite");
  }
  if (raw[kTheta1Min] < 0.0) throw ParameterError(1, "min green of road 1 must be >= 0");
  if (raw[kTheta1Max] < raw[kTheta1Min])
    throw ParameterError(2, "max green of road 1 must be >= its min green");
  if (raw[kTheta2Min] < 0.0) throw ParameterError(3, "min green of road 2 must be >= 0");
  if (raw[kTheta2Max] < raw[kTheta2Min])
    throw ParameterError(4, "max green of road 2 must be >= its min green");
  if (raw[kTheta3] <= 0.0) throw ParameterError(5, "pedestrian wait cap must be > 0");
  if (raw[kTheta4] <= 0.0) throw ParameterError(6, "pedestrian wait cap must be > 0");
  for (int f = 0; f < 4; ++f) {
    if (raw[kS1 + f] <= 0.0)
      throw ParameterError(kS1 + f + 1, "queue threshold must be > 0");
  }
  return ParameterVector{raw};
}

// Common starting point used by the optimization experiments.
inline ParameterVector default_initial_params() {
  return ParameterVector{{10, 20, 30, 50, 10, 10, 8, 8, 5, 5}};
}

}  // namespace tlc
