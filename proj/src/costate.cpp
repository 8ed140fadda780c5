#include "growthctl/costate.hpp"

#include <cmath>

namespace growthctl {

Costate arc_costate(const ModelParams& p, ArcKind kind, const Costate& lam_end, double tau1,
                    double t) {
  if (t > tau1) {
    throw TimeRangeError("costate time " + std::to_string(t) + " past arc end " +
                         std::to_string(tau1));
  }
  const double back = tau1 - t;
  Costate lam = lam_end;
  lam.lam2 = lam_end.lam2 + lam_end.lam0 * p.b_M * back;
  switch (kind) {
    case ArcKind::Exponential: {
      const double drift = p.a_E * p.b_E * lam_end.lam1 - lam_end.lam0 * p.b_E / p.k_E;
      lam.lam3 = std::exp(p.k_E * back) * (lam_end.lam3 - drift) + drift;
      break;
    }
    case ArcKind::Linear: {
      lam.lam3 = lam_end.lam3 + 0.5 * lam_end.lam0 * p.b_M * p.k_M * back * back +
                 (lam_end.lam0 * p.b_E - p.a_M * p.b_M * p.k_M * lam_end.lam1 +
                  p.k_M * lam_end.lam2) *
                     back;
      break;
    }
    case ArcKind::Stationary: {
      lam.lam3 = lam_end.lam3 + lam_end.lam0 * p.b_E * back;
      break;
    }
  }
  return lam;
}

Costate PiecewiseCostate::at(const ModelParams& p, double t) const {
  if (pieces.empty()) {
    throw TimeRangeError("costate has no pieces");
  }
  if (t < 0.0 || t > horizon) {
    throw TimeRangeError("time " + std::to_string(t) + " outside [0, " + std::to_string(horizon) +
                         "]");
  }
  for (const CostatePiece& piece : pieces) {
    if (t >= piece.t_start) {
      return arc_costate(p, piece.kind, piece.lam_end, piece.t_end, t);
    }
  }
  const CostatePiece& first = pieces.back();
  return arc_costate(p, first.kind, first.lam_end, first.t_end, t);
}

PiecewiseCostate backward_costate(const ModelParams& p, const Trajectory& traj,
                                  const TerminalCondition& term) {
  PiecewiseCostate out;
  out.horizon = traj.horizon;
  out.pieces.reserve(traj.arcs.size());
  Costate lam{term.gamma1, 0.0, 0.0, 1.0};
  for (auto it = traj.arcs.rbegin(); it != traj.arcs.rend(); ++it) {
    out.pieces.push_back(CostatePiece{it->kind, it->t_start, it->t_end, lam});
    lam = arc_costate(p, it->kind, lam, it->t_end, it->t_start);
  }
  return out;
}

SwitchReport switching_values(const ModelParams& p, const Costate& lam, double tol) {
  const double phi_M = p.k_M * (lam.lam2 - p.a_M * p.b_M * lam.lam1);
  const double phi_E = p.k_E * (lam.lam3 - p.a_E * p.b_E * lam.lam1);
  ArcKind winner;
  if (std::max(phi_M, phi_E) < 0.0) {
    winner = ArcKind::Stationary;
  } else if (phi_E >= phi_M - tol) {
    winner = ArcKind::Exponential;
  } else {
    winner = ArcKind::Linear;
  }
  const double best = std::max({phi_M, phi_E, 0.0});
  int near = 0;
  if (best - phi_E <= tol) ++near;
  if (best - phi_M <= tol) ++near;
  if (best <= tol) ++near;
  return SwitchReport{phi_M, phi_E, winner, near > 1};
}

ControlChoice pmp_argmax(const ModelParams& p, const Costate& lam, double tol) {
  const SwitchReport rep = switching_values(p, lam, tol);
  const double best = std::max({rep.phi_M, rep.phi_E, 0.0});
  ControlChoice choice;
  choice.kind = rep.winner;
  choice.control = vertex_control(p, rep.winner);
  if (best - rep.phi_E <= tol) choice.tie_set.push_back(ArcKind::Exponential);
  if (best - rep.phi_M <= tol) choice.tie_set.push_back(ArcKind::Linear);
  if (best <= tol) choice.tie_set.push_back(ArcKind::Stationary);
  return choice;
}

}  // namespace growthctl
