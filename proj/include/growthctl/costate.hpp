#pragma once

#include <vector>

#include "growthctl/arcs.hpp"
#include "growthctl/model.hpp"

namespace growthctl {

// Adjoint variables paired with (nutrient, storage, enzyme). lam0 scales the
// running payoff; the normal case fixes it at 1.
struct Costate {
  double lam1;
  double lam2;
  double lam3;
  double lam0 = 1.0;
};

// Transversality data: the terminal adjoint is (gamma1, 0, 0), where gamma1
// is the multiplier of the terminal nutrient bound and must vanish unless the
// nutrient is exhausted.
struct TerminalCondition {
  double gamma1 = 0.0;
};

// Backward closed form for one arc: given the adjoint at the arc's end time
// tau1, return it at t <= tau1. lam1 never moves; lam2 accrues the storage
// payoff linearly; lam3 depends on which production the arc runs.
Costate arc_costate(const ModelParams& p, ArcKind kind, const Costate& lam_end, double tau1,
                    double t);

struct CostatePiece {
  ArcKind kind;
  double t_start;
  double t_end;
  Costate lam_end;
};

struct PiecewiseCostate {
  std::vector<CostatePiece> pieces;
  double horizon = 0.0;

  Costate at(const ModelParams& p, double t) const;
};

PiecewiseCostate backward_costate(const ModelParams& p, const Trajectory& traj,
                                  const TerminalCondition& term);

// Gains of the two production vertices over idling. The candidate maximizing
// the Hamiltonian is the vertex with the largest positive gain, or idling if
// both are negative.
struct SwitchReport {
  double phi_M;
  double phi_E;
  ArcKind winner;
  bool tie;
};

SwitchReport switching_values(const ModelParams& p, const Costate& lam,
                              double tol = kSwitchTieTol);

struct ControlChoice {
  Control control;
  ArcKind kind;
  std::vector<ArcKind> tie_set;
};

ControlChoice pmp_argmax(const ModelParams& p, const Costate& lam, double tol = kSwitchTieTol);

}  // namespace growthctl
