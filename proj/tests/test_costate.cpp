#include <cmath>

#include "doctest.h"
#include "growthctl/costate.hpp"
#include "support/oracles.hpp"

using namespace growthctl;

TEST_CASE("adjoint on a storage arc: storage payoff accrues linearly backward") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 2.0, 1.0};  // b_M=2, k_M=1, b_E=1, a_M=1
  const Costate lam = arc_costate(p, ArcKind::Linear, Costate{0.0, 0.0, 0.0}, 0.5, 0.0);
  CHECK(lam.lam1 == doctest::Approx(0.0));
  CHECK(lam.lam2 == doctest::Approx(1.0));
  CHECK(lam.lam3 == doctest::Approx(0.75));
}

TEST_CASE("adjoint on an enzyme arc: compounding enzyme value") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};  // b_E=1, k_E=1, a_E=1
  const Costate lam = arc_costate(p, ArcKind::Exponential, Costate{0.0, 0.0, 0.0}, 1.0, 0.0);
  CHECK(lam.lam3 == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("adjoint on an idle arc: both payoffs accrue at their biomass weights") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 2.0, 3.0};
  const double gamma1 = 0.7;
  const double delta = 1.25;
  const Costate lam =
      arc_costate(p, ArcKind::Stationary, Costate{gamma1, 0.0, 0.0}, 2.0, 2.0 - delta);
  CHECK(lam.lam1 == doctest::Approx(gamma1));
  CHECK(lam.lam2 == doctest::Approx(p.b_M * delta));
  CHECK(lam.lam3 == doctest::Approx(p.b_E * delta));
}

TEST_CASE("arc_costate rejects evaluation past the arc end") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(arc_costate(p, ArcKind::Linear, Costate{0, 0, 0}, 1.0, 1.5), TimeRangeError);
}

TEST_CASE("closed-form adjoints match backward integration on random arcs") {
  testoracle::ScenarioGen gen(77);
  for (int i = 0; i < 150; ++i) {
    const ModelParams p = gen.params();
    const ArcKind kind = static_cast<ArcKind>(gen.engine()() % 3);
    const Costate lam_end{gen.uniform(-1.0, 2.0), gen.uniform(-2.0, 2.0), gen.uniform(-2.0, 2.0)};
    const double tau1 = gen.uniform(0.5, 3.0);
    const double t = gen.uniform(0.0, tau1);
    const Costate closed = arc_costate(p, kind, lam_end, tau1, t);
    const testoracle::ControlSchedule sched{{tau1 + 1.0, vertex_control(p, kind)}};
    const Costate numeric = testoracle::rk4_costate(p, lam_end, sched, tau1, t, 4000);
    const double scale =
        1.0 + std::abs(numeric.lam1) + std::abs(numeric.lam2) + std::abs(numeric.lam3);
    CHECK(std::abs(closed.lam1 - numeric.lam1) / scale <= 1e-8);
    CHECK(std::abs(closed.lam2 - numeric.lam2) / scale <= 1e-8);
    CHECK(std::abs(closed.lam3 - numeric.lam3) / scale <= 1e-8);
  }
}

TEST_CASE("backward_costate chains pieces continuously and matches integration") {
  testoracle::ScenarioGen gen(88);
  for (int i = 0; i < 40; ++i) {
    const ModelParams p = gen.params();
    State x{gen.uniform(5.0, 30.0), gen.uniform(0.0, 2.0), gen.uniform(0.1, 1.0)};
    std::vector<ArcPlanEntry> plan;
    State cur = x;
    for (int a = 0; a < 3; ++a) {
      const ArcKind kind = static_cast<ArcKind>(gen.engine()() % 3);
      const double d = gen.uniform(0.1, std::min(arc_max_duration(p, kind, cur) * 0.8, 1.5));
      plan.push_back({kind, d});
      cur = arc_state(p, kind, cur, d);
    }
    const Trajectory traj = build_trajectory(p, x, plan);
    const TerminalCondition term{gen.uniform(0.0, 1.0)};
    const PiecewiseCostate lam = backward_costate(p, traj, term);

    const Costate at_end = lam.at(p, traj.horizon);
    CHECK(at_end.lam1 == doctest::Approx(term.gamma1));
    CHECK(at_end.lam2 == doctest::Approx(0.0));
    CHECK(at_end.lam3 == doctest::Approx(0.0));

    for (const Arc& arc : traj.arcs) {
      if (arc.t_start == 0.0) {
        continue;
      }
      const Costate before = lam.at(p, arc.t_start - 1e-9);
      const Costate after = lam.at(p, arc.t_start + 1e-9);
      CHECK(before.lam2 == doctest::Approx(after.lam2).epsilon(1e-6));
      CHECK(before.lam3 == doctest::Approx(after.lam3).epsilon(1e-6));
    }

    const double t = gen.uniform(0.0, traj.horizon);
    const Costate closed = lam.at(p, t);
    const Costate numeric = testoracle::rk4_costate_along(p, traj, term.gamma1, t, 3000);
    const double scale =
        1.0 + std::abs(numeric.lam1) + std::abs(numeric.lam2) + std::abs(numeric.lam3);
    CHECK(std::abs(closed.lam1 - numeric.lam1) / scale <= 1e-8);
    CHECK(std::abs(closed.lam2 - numeric.lam2) / scale <= 1e-8);
    CHECK(std::abs(closed.lam3 - numeric.lam3) / scale <= 1e-8);
  }
}

TEST_CASE("switching values rank the production vertices") {
  ModelParams p{1.0, 1.0, 1.0, 1.0, 2.0, 1.0};  // k_M=k_E=1, a_M=a_E=1, b_M=2, b_E=1

  SUBCASE("storage wins") {
    const SwitchReport r = switching_values(p, Costate{0.0, 1.0, 0.0});
    CHECK(r.phi_M == doctest::Approx(1.0));
    CHECK(r.phi_E == doctest::Approx(0.0));
    CHECK(r.winner == ArcKind::Linear);
    CHECK_FALSE(r.tie);
  }
  SUBCASE("zero adjoint ties everything, enzyme arc reported") {
    const SwitchReport r = switching_values(p, Costate{0.0, 0.0, 0.0});
    CHECK(r.phi_M == doctest::Approx(0.0));
    CHECK(r.phi_E == doctest::Approx(0.0));
    CHECK(r.tie);
    CHECK(r.winner == ArcKind::Exponential);
  }
  SUBCASE("enzyme wins") {
    const SwitchReport r = switching_values(p, Costate{0.0, 0.0, 2.0});
    CHECK(r.phi_E == doctest::Approx(2.0));
    CHECK(r.phi_M == doctest::Approx(0.0));
    CHECK(r.winner == ArcKind::Exponential);
  }
  SUBCASE("idle wins when both gains are negative") {
    const SwitchReport r = switching_values(p, Costate{1.0, 0.0, 0.0});
    CHECK(r.phi_M == doctest::Approx(-2.0));
    CHECK(r.phi_E == doctest::Approx(-1.0));
    CHECK(r.winner == ArcKind::Stationary);
    CHECK_FALSE(r.tie);
  }
}

TEST_CASE("pmp_argmax returns the winner's vertex control and the tie set") {
  ModelParams p{1.5, 2.5, 1.0, 1.0, 2.0, 1.0};

  const ControlChoice storage = pmp_argmax(p, Costate{0.0, 1.0, 0.0});
  CHECK(storage.kind == ArcKind::Linear);
  CHECK(storage.control.u_M == doctest::Approx(p.k_M));
  CHECK(storage.control.u_E == doctest::Approx(0.0));
  CHECK(storage.tie_set.size() == 1);

  const ControlChoice idle = pmp_argmax(p, Costate{1.0, 0.0, 0.0});
  CHECK(idle.kind == ArcKind::Stationary);
  CHECK(idle.control.u_M == doctest::Approx(0.0));
  CHECK(idle.control.u_E == doctest::Approx(0.0));

  const ControlChoice all = pmp_argmax(p, Costate{0.0, 0.0, 0.0});
  CHECK(all.kind == ArcKind::Exponential);
  CHECK(all.tie_set.size() == 3);
}

TEST_CASE("storage gain vanishes exactly at a storage-to-idle junction") {
  // With terminal multiplier gamma1 = (T - tau_s)/a_M the idle tail makes
  // phi_M(tau_s) = 0: the junction is exactly where storage stops paying.
  ModelParams p{1.0, 1.0, 2.0, 1.0, 2.0, 1.0};
  const double T = 4.0;
  const double tau_s = 1.5;
  const Trajectory traj = build_trajectory(
      p, State{20.0, 0.0, 1.0}, {{ArcKind::Linear, tau_s}, {ArcKind::Stationary, T - tau_s}});
  const TerminalCondition term{(T - tau_s) / p.a_M};
  const PiecewiseCostate lam = backward_costate(p, traj, term);
  const SwitchReport at_switch = switching_values(p, lam.at(p, tau_s));
  CHECK(std::abs(at_switch.phi_M) <= 1e-12);
}
