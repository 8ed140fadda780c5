#include <cmath>
#include <limits>

#include "doctest.h"
#include "growthctl/arcs.hpp"
#include "support/oracles.hpp"

using namespace growthctl;

namespace {
const ModelParams kUnit{1.0, 1.0, 1.0, 1.0, 2.0, 1.0};

ModelParams random_params(testoracle::ScenarioGen& gen) { return gen.params(); }
}  // namespace

TEST_CASE("storage-production arc: linear storage growth, linear nutrient drain") {
  ModelParams p = kUnit;  // b_M=2, k_M=1, a_M=1
  const State x0{2.0, 0.0, 1.0};
  const State x1 = arc_state(p, ArcKind::Linear, x0, 1.0);
  CHECK(std::abs(x1.nutrient) <= 1e-12);
  CHECK(x1.storage == doctest::Approx(1.0));
  CHECK(x1.enzyme == doctest::Approx(1.0));
}

TEST_CASE("enzyme-production arc: exponential enzyme growth") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 2.0};  // b_E=2, k_E=1, a_E=1
  const double e = std::exp(1.0);
  const State x0{2.0 * (e - 1.0), 0.0, 1.0};
  const State x1 = arc_state(p, ArcKind::Exponential, x0, 1.0);
  CHECK(std::abs(x1.nutrient) <= 1e-12);
  CHECK(x1.storage == doctest::Approx(0.0));
  CHECK(x1.enzyme == doctest::Approx(e));
}

TEST_CASE("idle arc holds the state") {
  const State x0{1.0, 2.0, 3.0};
  const State x1 = arc_state(kUnit, ArcKind::Stationary, x0, 17.5);
  CHECK(x1.nutrient == 1.0);
  CHECK(x1.storage == 2.0);
  CHECK(x1.enzyme == 3.0);
}

TEST_CASE("arc_state at zero elapsed time returns the start state") {
  testoracle::ScenarioGen gen(11);
  for (ArcKind kind : {ArcKind::Exponential, ArcKind::Linear, ArcKind::Stationary}) {
    const ModelParams p = random_params(gen);
    const State x0{gen.uniform(0.5, 5.0), gen.uniform(0.0, 5.0), gen.uniform(0.1, 2.0)};
    const State same = arc_state(p, kind, x0, 0.0);
    CHECK(same.nutrient == doctest::Approx(x0.nutrient));
    CHECK(same.storage == doctest::Approx(x0.storage));
    CHECK(same.enzyme == doctest::Approx(x0.enzyme));
  }
}

TEST_CASE("maximum durations: ratio bound, log bound, unbounded idle") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 2.0, 2.0};  // a_M=1, b_M=2, k_M=1; a_E=1, b_E=2, k_E=1
  CHECK(arc_max_duration(p, ArcKind::Linear, State{2.0, 0.0, 1.0}) == doctest::Approx(1.0));
  const double e = std::exp(1.0);
  CHECK(arc_max_duration(p, ArcKind::Exponential, State{2.0 * (e - 1.0), 0.0, 1.0}) ==
        doctest::Approx(1.0));
  CHECK(std::isinf(arc_max_duration(p, ArcKind::Stationary, State{2.0, 0.0, 1.0})));
}

TEST_CASE("nutrient is exactly exhausted at the maximum duration") {
  testoracle::ScenarioGen gen(22);
  for (int i = 0; i < 100; ++i) {
    const ModelParams p = random_params(gen);
    const State x0{gen.uniform(0.1, 10.0), gen.uniform(0.0, 3.0), gen.uniform(0.05, 2.0)};
    for (ArcKind kind : {ArcKind::Exponential, ArcKind::Linear}) {
      const double dmax = arc_max_duration(p, kind, x0);
      REQUIRE(std::isfinite(dmax));
      const State xend = arc_state(p, kind, x0, dmax);
      CHECK(std::abs(xend.nutrient) <= 1e-10);
    }
  }
}

TEST_CASE("arc_state beyond the nutrient budget raises a depletion error") {
  ModelParams p = kUnit;
  const State x0{2.0, 0.0, 1.0};
  CHECK_THROWS_AS(arc_state(p, ArcKind::Linear, x0, 1.5), NutrientDepletionError);
  try {
    arc_state(p, ArcKind::Linear, x0, 1.5);
  } catch (const NutrientDepletionError& e) {
    CHECK(e.nutrient() == doctest::Approx(-1.0));
  }
}

TEST_CASE("degenerate arcs without enzyme are inert") {
  const State x0{5.0, 1.0, 0.0};
  for (ArcKind kind : {ArcKind::Exponential, ArcKind::Linear}) {
    CHECK(arc_is_degenerate(kind, x0));
    CHECK(std::isinf(arc_max_duration(kUnit, kind, x0)));
    const State x1 = arc_state(kUnit, kind, x0, 100.0);
    CHECK(x1.nutrient == 5.0);
    CHECK(x1.storage == 1.0);
    CHECK(x1.enzyme == 0.0);
  }
  CHECK_FALSE(arc_is_degenerate(ArcKind::Linear, State{5.0, 1.0, 0.5}));
}

TEST_CASE("closed-form states match brute-force integration on random arcs") {
  testoracle::ScenarioGen gen(33);
  for (int i = 0; i < 200; ++i) {
    const ModelParams p = random_params(gen);
    const State x0{gen.uniform(0.2, 15.0), gen.uniform(0.0, 4.0), gen.uniform(0.05, 2.0)};
    const ArcKind kind = static_cast<ArcKind>(gen.engine()() % 3);
    const double dmax = arc_max_duration(p, kind, x0);
    const double d = gen.uniform(0.0, std::min(dmax, 5.0));
    const State closed = arc_state(p, kind, x0, d);
    const testoracle::ControlSchedule sched{{d + 1.0, vertex_control(p, kind)}};
    const State numeric = testoracle::rk4_state(p, x0, sched, 0.0, d, 2000);
    const double scale = 1.0 + std::abs(numeric.nutrient) + numeric.storage + numeric.enzyme;
    CHECK(std::abs(closed.nutrient - numeric.nutrient) / scale <= 1e-8);
    CHECK(std::abs(closed.storage - numeric.storage) / scale <= 1e-8);
    CHECK(std::abs(closed.enzyme - numeric.enzyme) / scale <= 1e-8);
  }
}

TEST_CASE("arc flow has the semigroup property") {
  testoracle::ScenarioGen gen(44);
  for (int i = 0; i < 100; ++i) {
    const ModelParams p = random_params(gen);
    const State x0{gen.uniform(0.5, 10.0), gen.uniform(0.0, 3.0), gen.uniform(0.05, 2.0)};
    const ArcKind kind = static_cast<ArcKind>(gen.engine()() % 3);
    const double dmax = arc_max_duration(p, kind, x0);
    const double total = gen.uniform(0.0, std::min(dmax, 4.0));
    const double s = gen.uniform(0.0, total);
    const State direct = arc_state(p, kind, x0, total);
    const State hop = arc_state(p, kind, arc_state(p, kind, x0, s), total - s);
    CHECK(direct.nutrient == doctest::Approx(hop.nutrient).epsilon(1e-11));
    CHECK(direct.storage == doctest::Approx(hop.storage).epsilon(1e-11));
    CHECK(direct.enzyme == doctest::Approx(hop.enzyme).epsilon(1e-11));
  }
}

TEST_CASE("arc objectives match quadrature of the biomass integrand") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 2.0, 1.0};  // b_M=2, k_M=1, b_E=1
  const State x0{10.0, 0.0, 1.0};

  SUBCASE("storage arc") {
    CHECK(arc_objective(p, ArcKind::Linear, x0, 0.5) == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("enzyme arc") {
    ModelParams q{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};  // b_E=1, k_E=1
    CHECK(arc_objective(q, ArcKind::Exponential, x0, 0.5) ==
          doctest::Approx(std::exp(0.5) - 1.0).epsilon(1e-12));
  }
  SUBCASE("idle arc") {
    ModelParams q{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    CHECK(arc_objective(q, ArcKind::Stationary, State{0.0, 1.0, 2.0}, 2.0) ==
          doctest::Approx(6.0));
  }

  SUBCASE("random arcs against Simpson quadrature") {
    testoracle::ScenarioGen gen(55);
    for (int i = 0; i < 60; ++i) {
      const ModelParams q = random_params(gen);
      const State x{gen.uniform(0.5, 10.0), gen.uniform(0.0, 3.0), gen.uniform(0.05, 2.0)};
      const ArcKind kind = static_cast<ArcKind>(gen.engine()() % 3);
      const double d = gen.uniform(0.0, std::min(arc_max_duration(q, kind, x), 4.0));
      const double closed = arc_objective(q, kind, x, d);
      const double quad = testoracle::simpson(
          [&](double t) { return biomass(q, arc_state(q, kind, x, t)); }, 0.0, d, 2000);
      CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
    }
  }
}

TEST_CASE("build_trajectory chains start states and tiles the horizon") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  const State x0{10.0, 0.0, 1.0};
  const Trajectory traj = build_trajectory(
      p, x0, {{ArcKind::Exponential, 1.0}, {ArcKind::Linear, 0.5}, {ArcKind::Stationary, 2.0}});
  REQUIRE(traj.arcs.size() == 3);
  CHECK(traj.horizon == doctest::Approx(3.5));
  CHECK(traj.arcs[0].t_start == 0.0);
  CHECK(traj.arcs[2].t_end == doctest::Approx(3.5));
  for (std::size_t i = 1; i < traj.arcs.size(); ++i) {
    CHECK(traj.arcs[i].t_start == doctest::Approx(traj.arcs[i - 1].t_end));
    const State prev_end = arc_state(p, traj.arcs[i - 1].kind, traj.arcs[i - 1].x_start,
                                     traj.arcs[i - 1].duration());
    CHECK(traj.arcs[i].x_start.nutrient == doctest::Approx(prev_end.nutrient));
    CHECK(traj.arcs[i].x_start.storage == doctest::Approx(prev_end.storage));
    CHECK(traj.arcs[i].x_start.enzyme == doctest::Approx(prev_end.enzyme));
  }
}

TEST_CASE("build_trajectory names the arc that overdraws the nutrient") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 2.0, 2.0};
  const State x0{2.0, 0.0, 1.0};  // storage arc feasible for exactly 1.0
  try {
    build_trajectory(p, x0, {{ArcKind::Stationary, 1.0}, {ArcKind::Linear, 2.0}});
    FAIL("expected TrajectoryPlanError");
  } catch (const TrajectoryPlanError& e) {
    CHECK(e.arc_index() == 1);
    CHECK(e.shortfall() > 0.9);
  }
}

TEST_CASE("trajectory objectives add across arcs") {
  SUBCASE("single storage arc") {
    ModelParams p{1.0, 1.0, 1.0, 1.0, 2.0, 1.0};
    const Trajectory traj = build_trajectory(p, State{10.0, 0.0, 1.0}, {{ArcKind::Linear, 0.5}});
    CHECK(trajectory_objective(p, traj) == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("enzyme arc then idle arc") {
    ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    const Trajectory traj = build_trajectory(
        p, State{10.0, 0.0, 1.0}, {{ArcKind::Exponential, 1.0}, {ArcKind::Stationary, 1.0}});
    const double e = std::exp(1.0);
    CHECK(trajectory_objective(p, traj) == doctest::Approx((e - 1.0) + e).epsilon(1e-12));
  }
  SUBCASE("empty horizon") {
    ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    const Trajectory traj = build_trajectory(p, State{1.0, 0.0, 1.0}, {});
    CHECK(trajectory_objective(p, traj) == 0.0);
  }
  SUBCASE("random plans against quadrature along samples") {
    testoracle::ScenarioGen gen(66);
    for (int i = 0; i < 40; ++i) {
      const ModelParams p = random_params(gen);
      State x{gen.uniform(2.0, 20.0), gen.uniform(0.0, 2.0), gen.uniform(0.1, 1.0)};
      std::vector<ArcPlanEntry> plan;
      State cur = x;
      for (int a = 0; a < 3; ++a) {
        const ArcKind kind = static_cast<ArcKind>(gen.engine()() % 3);
        const double dmax = arc_max_duration(p, kind, cur);
        const double d = gen.uniform(0.0, std::min(dmax * 0.9, 2.0));
        plan.push_back({kind, d});
        cur = arc_state(p, kind, cur, d);
      }
      const Trajectory traj = build_trajectory(p, x, plan);
      double quad = 0.0;
      for (const Arc& arc : traj.arcs) {
        quad += testoracle::simpson(
            [&](double t) { return biomass(p, arc_state(p, arc.kind, arc.x_start, t)); }, 0.0,
            arc.duration(), 1000);
      }
      CHECK(trajectory_objective(p, traj) == doctest::Approx(quad).epsilon(1e-8));
    }
  }
}

TEST_CASE("state_at and control_at are right-continuous at junctions") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  const Trajectory traj = build_trajectory(
      p, State{10.0, 0.0, 1.0}, {{ArcKind::Exponential, 1.0}, {ArcKind::Linear, 1.0}});

  const Control at_switch = control_at(p, traj, 1.0);
  CHECK(at_switch.u_M == doctest::Approx(p.k_M));
  CHECK(at_switch.u_E == doctest::Approx(0.0));

  const Control at_end = control_at(p, traj, 2.0);
  CHECK(at_end.u_M == doctest::Approx(p.k_M));

  const State left = state_at(p, traj, 1.0 - 1e-9);
  const State right = state_at(p, traj, 1.0 + 1e-9);
  CHECK(left.enzyme == doctest::Approx(right.enzyme).epsilon(1e-6));

  CHECK_THROWS_AS(state_at(p, traj, -0.1), TimeRangeError);
  CHECK_THROWS_AS(state_at(p, traj, 2.1), TimeRangeError);
}

TEST_CASE("sample_trajectory spans the horizon inclusively") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  const Trajectory traj = build_trajectory(
      p, State{10.0, 0.0, 1.0}, {{ArcKind::Exponential, 1.0}, {ArcKind::Stationary, 1.0}});
  const auto samples = sample_trajectory(p, traj, 5);
  REQUIRE(samples.size() == 5);
  CHECK(samples.front().t == 0.0);
  CHECK(samples.back().t == doctest::Approx(2.0));
  CHECK(samples.front().x.enzyme == doctest::Approx(1.0));
  CHECK(samples.back().x.enzyme == doctest::Approx(std::exp(1.0)));
  CHECK(samples.back().u.u_E == doctest::Approx(0.0));
}
