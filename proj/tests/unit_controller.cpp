#include <catch2/catch_amalgamated.hpp>

#include "tlc/controller.hpp"
#include "tlc/params.hpp"

using namespace tlc;

namespace {

const ParameterVector kTh = validate_parameters({10, 20, 30, 50, 10, 10, 8, 8, 5, 5});

ClockView at(double v) { return ClockView{v, false}; }
ClockView fresh() { return ClockView{0.0, true}; }
ClockView frozen() { return ClockView{0.0, false}; }

}  // namespace

TEST_CASE("balanced-pressure region cuts road 1 at its min green under opposing demand") {
  // road 2 backlogged above threshold, crossing demand only on road 2's side
  ControlDecision d = control_decision(Region::kX4, {0, 1}, at(10.0), frozen(), kTh, 1);
  CHECK(d.u1 == 0);
  CHECK(d.switch_now);
}

TEST_CASE("road 1 emptying hands the green over when no crossing demand remains") {
  // x1 just hit zero, road 2 above threshold, nobody waiting to cross road 2
  ControlDecision d = control_decision(Region::kX2p, {1, 0}, at(15.0), frozen(), kTh, 1);
  CHECK(d.u1 == 0);
  CHECK(d.switch_now);
}

TEST_CASE("empty intersection keeps the current green without demand") {
  ControlDecision d = control_decision(Region::kX0, {0, 0}, at(5.0), frozen(), kTh, 1);
  CHECK(d.u1 == 1);
  CHECK_FALSE(d.switch_now);
}

TEST_CASE("a switch request is held until the active min green has elapsed") {
  // both queues empty, both crossings demanded: the empty-intersection rule
  // wants road 2 once road 1's phase ages past theta_1_max
  ControlDecision want2 = control_decision(Region::kX0, {1, 1}, at(25.0), frozen(), kTh, 1);
  CHECK(want2.u1 == 0);
  CHECK(want2.switch_now);

  // same demand before theta_1_min has elapsed: decision pends, no switch
  ControlDecision early = control_decision(Region::kX2, {0, 0}, at(5.0), frozen(), kTh, 1);
  CHECK(early.u1 == 0);
  CHECK_FALSE(early.switch_now);

  ControlDecision ripe = control_decision(Region::kX2, {0, 0}, at(10.0), frozen(), kTh, 1);
  CHECK(ripe.u1 == 0);
  CHECK(ripe.switch_now);
}

TEST_CASE("a freshly reset clock counts as zero-plus") {
  ClockView f = fresh();
  CHECK(f.positive());
  CHECK(f.below(10.0));
  CHECK_FALSE(f.at_least(10.0));
  CHECK(f.at_least(0.0));  // zero min green places the fresh clock at the bound

  // freshly green road 1 keeps the green while its min green is positive
  ControlDecision d = control_decision(Region::kX3, {0, 1}, fresh(), frozen(), kTh, 1);
  CHECK(d.u1 == 1);
  CHECK_FALSE(d.switch_now);
}

TEST_CASE("a frozen clock satisfies no bound") {
  ClockView z = frozen();
  CHECK_FALSE(z.positive());
  CHECK_FALSE(z.below(100.0));
  CHECK_FALSE(z.at_least(0.0));
  CHECK_FALSE(z.in_band(0.0, 100.0));
}

TEST_CASE("max green always surrenders a contested empty intersection") {
  // with both indicators set, road 1 holds until theta_1_max, then yields
  ControlDecision hold = control_decision(Region::kX0, {1, 1}, at(19.0), frozen(), kTh, 1);
  CHECK(hold.u1 == 1);
  ControlDecision yield = control_decision(Region::kX0, {1, 1}, at(20.0), frozen(), kTh, 1);
  CHECK(yield.u1 == 0);
  CHECK(yield.switch_now);
}

TEST_CASE("one-sided backlog weighs crossing demand on both sides") {
  // road 1 backlogged, road 2 empty, nobody crossing: stay green
  CHECK(control_decision(Region::kX1, {0, 0}, at(12.0), frozen(), kTh, 1).u1 == 1);
  // crossing road 2 is served by road 1's green, so its demand holds the green
  CHECK(control_decision(Region::kX1p, {0, 1}, at(12.0), frozen(), kTh, 1).u1 == 1);
  // crossing road 1 needs road 1 red; past min green the light yields
  CHECK(control_decision(Region::kX1, {1, 0}, at(12.0), frozen(), kTh, 1).u1 == 0);
}

TEST_CASE("threshold-priority region holds road 1 green until max green") {
  CHECK(control_decision(Region::kX5, {1, 1}, at(19.0), frozen(), kTh, 1).u1 == 1);
  ControlDecision d = control_decision(Region::kX5, {1, 1}, at(20.0), frozen(), kTh, 1);
  CHECK(d.u1 == 0);
  CHECK(d.switch_now);
}

TEST_CASE("decisions are total over every region and indicator combination") {
  const Region regions[] = {Region::kX0, Region::kX1, Region::kX1p,
                            Region::kX2, Region::kX2p, Region::kX3,
                            Region::kX4, Region::kX5, Region::kX6};
  for (Region r : regions)
    for (int p1 = 0; p1 <= 1; ++p1)
      for (int p2 = 0; p2 <= 1; ++p2)
        for (double z = 0.0; z <= 55.0; z += 2.5)
          for (int cur = 0; cur <= 1; ++cur) {
            ClockView z1 = cur == 1 ? at(z) : frozen();
            ClockView z2 = cur == 1 ? frozen() : at(z);
            ControlDecision d =
                control_decision(r, {p1, p2}, z1, z2, kTh, cur);
            REQUIRE((d.u1 == 0 || d.u1 == 1));
            if (d.switch_now) REQUIRE(d.u1 != cur);
          }
}

TEST_CASE("baseline eligibility gives pedestrians the right of way") {
  BaselineDecision none = baseline_decision({3, 2, 0, 0}, {1, 1, 0, 0});
  CHECK(none.enabled == std::array<int, 4>{1, 1, 0, 0});
  CHECK_FALSE(none.changed);

  // waiting pedestrians on crossing 1 halt road 1's vehicles
  BaselineDecision ped3 = baseline_decision({3, 2, 1, 0}, {1, 1, 0, 0});
  CHECK(ped3.enabled == std::array<int, 4>{0, 1, 1, 0});
  CHECK(ped3.changed);

  BaselineDecision both = baseline_decision({0, 0, 2, 1}, {1, 1, 0, 0});
  CHECK(both.enabled == std::array<int, 4>{0, 0, 1, 1});
}
