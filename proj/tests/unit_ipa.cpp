#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tlc/ipa.hpp"
#include "tlc/oracle.hpp"
#include "tlc/simulator.hpp"

using namespace tlc;

namespace {

const std::array<double, 4> kUnitWeights{1, 1, 1, 1};

ArrivalProcessSpec constant_flow_spec() {
  ArrivalProcessSpec s;
  s.mode = SimMode::kFluid;
  s.mean_rate = {1.0 / 6, 1.0 / 6, 0.1, 0.05};
  s.fluid_constant_rates = true;
  return s;
}

ArrivalProcessSpec random_flow_spec(std::uint64_t seed) {
  ArrivalProcessSpec s = constant_flow_spec();
  s.fluid_constant_rates = false;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("empty traffic yields a zero gradient") {
  ArrivalProcessSpec s;
  s.mode = SimMode::kFluid;
  s.mean_rate = {0, 0, 0, 0};
  EventTrace tr = run_sample_path(s, default_initial_params(), 1000.0);
  GradientReport rep = ipa_gradient(tr, kUnitWeights);
  CHECK(rep.L == 0.0);
  for (double g : rep.grad) CHECK(g == 0.0);
}

TEST_CASE("scaling the cost weights scales the gradient linearly") {
  EventTrace tr = run_sample_path(random_flow_spec(6), default_initial_params(), 1000.0);
  GradientReport one = ipa_gradient(tr, {1, 1, 1, 1});
  GradientReport three = ipa_gradient(tr, {3, 3, 3, 3});
  for (int i = 0; i < 10; ++i)
    CHECK(three.grad[i] == Catch::Approx(3.0 * one.grad[i]).margin(1e-12));
}

TEST_CASE("constant inflow gradients match the frozen slopes") {
  // deterministic periodic path; slopes confirmed against converged central
  // differences (1e-3 steps replay the event sequence at these horizons)
  const ParameterVector params = default_initial_params();
  struct Row {
    double horizon, cost, d_theta1min, d_theta2min;
  };
  const Row rows[] = {
      {117.0, 2.953170637, -0.072400, 0.026011},
      {3987.0, 3.133040704, -0.016477, 0.091584},
  };
  for (const Row& row : rows) {
    EventTrace tr = run_sample_path(constant_flow_spec(), params, row.horizon);
    GradientReport rep = ipa_gradient(tr, kUnitWeights);
    CHECK(rep.L == Catch::Approx(row.cost).margin(1e-6));
    CHECK(rep.grad[kTheta1Min] == Catch::Approx(row.d_theta1min).margin(1e-5));
    CHECK(rep.grad[kTheta2Min] == Catch::Approx(row.d_theta2min).margin(1e-5));
    // only the two min greens steer this saturated periodic cycle
    for (std::size_t i : {kTheta1Max, kTheta2Max, kS1, kS2, kS3, kS4})
      CHECK(rep.grad[i] == Catch::Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("constant inflow gradients equal the central difference slopes") {
  const ParameterVector params = default_initial_params();
  const ArrivalProcessSpec spec = constant_flow_spec();
  for (double horizon : {117.0, 3987.0}) {
    EventTrace tr = run_sample_path(spec, params, horizon);
    GradientReport rep = ipa_gradient(tr, kUnitWeights);
    FdOptions opt;
    opt.delta = uniform_fd_delta(1e-3);
    FdResult fd = finite_difference_gradient(spec, params, horizon, opt);
    for (int i = 0; i < 10; ++i) {
      if (!fd.stable[i]) continue;
      CHECK(rep.grad[i] == Catch::Approx(fd.grad[i]).margin(5e-6));
    }
  }
}

TEST_CASE("random inflow gradient matches a vanishing central difference") {
  // tight steps keep the perturbed paths on the base event sequence, where
  // the sample derivative is exact
  const ParameterVector params = default_initial_params();
  const ArrivalProcessSpec spec = random_flow_spec(2);
  EventTrace tr = run_sample_path(spec, params, 1000.0);
  GradientReport rep = ipa_gradient(tr, kUnitWeights);
  FdOptions opt;
  opt.delta = uniform_fd_delta(1e-5);
  FdResult fd = finite_difference_gradient(spec, params, 1000.0, opt);
  REQUIRE(fd.stable[kTheta2Min]);
  CHECK(rep.grad[kTheta2Min] == Catch::Approx(fd.grad[kTheta2Min]).margin(1e-4));
  // the road-1 min green shares its threshold with the crossing cap at this
  // point; the one-sided slope still agrees to first order
  CHECK(rep.grad[kTheta1Min] == Catch::Approx(fd.grad[kTheta1Min]).margin(1e-4));
}

TEST_CASE("gradients stay finite across seeds and modes") {
  for (SimMode mode : {SimMode::kFluid, SimMode::kDiscrete}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      ArrivalProcessSpec s = random_flow_spec(seed);
      s.mode = mode;
      EventTrace tr = run_sample_path(s, default_initial_params(), 1000.0);
      GradientReport rep = ipa_gradient(tr, kUnitWeights);
      REQUIRE(std::isfinite(rep.L));
      for (double g : rep.grad) REQUIRE(std::isfinite(g));
      REQUIRE(rep.events_processed > 0);
      REQUIRE(rep.degenerate_count >= 0);
    }
  }
}

TEST_CASE("right-endpoint segment valuation is a contained variation") {
  EventTrace tr = run_sample_path(random_flow_spec(4), default_initial_params(), 1000.0);
  GradientReport left = ipa_gradient(tr, kUnitWeights);
  IpaOptions opt;
  opt.literal_segments = true;
  GradientReport right = ipa_gradient(tr, kUnitWeights, opt);
  CHECK(left.L == right.L);
  for (double g : right.grad) REQUIRE(std::isfinite(g));
  // the two readings value the same piecewise-constant integrand, so they
  // can only differ where segment boundaries carry jumps
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i < 10; ++i) {
    diff = std::max(diff, std::fabs(left.grad[i] - right.grad[i]));
    scale = std::max(scale, std::fabs(left.grad[i]));
  }
  CHECK(diff <= std::max(1.0, scale));
}

TEST_CASE("a pedestrian-only load produces pedestrian-driven sensitivities") {
  ArrivalProcessSpec s;
  s.mode = SimMode::kFluid;
  s.mean_rate = {0, 0, 0.1, 0.05};
  s.fluid_constant_rates = true;
  // short min greens so the wait caps (not the green bounds) schedule the
  // switches; at the common defaults the min greens bind first and the caps
  // correctly carry zero sensitivity
  const ParameterVector params = validate_parameters({2, 20, 2, 50, 10, 10, 8, 8, 5, 5});
  EventTrace tr = run_sample_path(s, params, 1000.0);
  GradientReport rep = ipa_gradient(tr, kUnitWeights);
  REQUIRE(rep.L > 0.0);
  // no vehicles: queue thresholds of the vehicle flows carry no sensitivity
  CHECK(rep.grad[kS1] == 0.0);
  CHECK(rep.grad[kS2] == 0.0);
  // each cap ends its own side's phase, so both carry sensitivity
  CHECK(std::fabs(rep.grad[kTheta3]) > 0.0);
  CHECK(std::fabs(rep.grad[kTheta4]) > 0.0);
  // the green bounds never bind here
  CHECK(rep.grad[kTheta1Max] == 0.0);
  CHECK(rep.grad[kTheta2Max] == 0.0);
}
