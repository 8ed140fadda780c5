#include "growthctl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "growthctl/costate.hpp"
#include "growthctl/lp_oracle.hpp"

namespace growthctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPenalty = -1e300;

double chebyshev_node(double lo, double hi, std::size_t i, std::size_t n) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double angle = M_PI * (2.0 * static_cast<double>(i) + 1.0) /
                       (2.0 * static_cast<double>(n));
  return mid + half * std::cos(angle);
}

// Maximize f on [lo, hi]; f may return a large negative penalty on the
// infeasible side of a boundary.
template <typename F>
double golden_max(F&& f, double lo, double hi) {
  if (!(hi > lo)) {
    return lo;
  }
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < 300 && (b - a) > 1e-10 * (1.0 + std::abs(a) + std::abs(b)); ++iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  double best_x = mid;
  double best_f = f(mid);
  for (double x : {a, x1, x2, b}) {
    const double v = f(x);
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
  }
  return best_x;
}

// Grid pre-scan plus golden-section refinement within the best cell. Falls
// back to a much denser grid when the scan looks multimodal.
template <typename F>
double scan_and_refine(F&& f, double lo, double hi, std::size_t resolution) {
  if (!(hi > lo)) {
    return lo;
  }
  const auto scan = [&](std::size_t cells, double& best_x, double& best_v) {
    std::size_t best_i = 0;
    std::vector<double> values(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
      values[i] = f(x);
      if (values[i] > best_v) {
        best_v = values[i];
        best_x = x;
        best_i = i;
      }
    }
    std::size_t maxima = 0;
    for (std::size_t i = 1; i + 1 <= cells; ++i) {
      if (values[i] > values[i - 1] && values[i] > values[i + 1]) {
        ++maxima;
      }
    }
    return std::pair<std::size_t, std::size_t>(best_i, maxima);
  };

  double best_x = lo;
  double best_v = -kInf;
  auto [best_i, maxima] = scan(resolution, best_x, best_v);
  std::size_t cells = resolution;
  if (maxima > 1) {
    best_x = lo;
    best_v = -kInf;
    cells = resolution * 50;
    std::tie(best_i, maxima) = scan(cells, best_x, best_v);
  }
  const double cell = (hi - lo) / static_cast<double>(cells);
  const double a = std::max(lo, best_x - cell);
  const double b = std::min(hi, best_x + cell);
  const double refined = golden_max(f, a, b);
  return f(refined) >= best_v ? refined : best_x;
}

struct StructurePlan {
  bool has_exp = false;
  bool exp_free = false;   // tau1 is a free variable
  bool has_lin = false;
  bool lin_to_horizon = false;
  bool has_stat = false;
};

// Objective of exp(tau1) -> lin(until tau_s) -> idle(rest), with tau_s
// clamped by depletion and horizon; used for all seven shapes by zeroing
// phases.
double shape_objective(const Scenario& s, double tau1, double tau_s) {
  const ModelParams& p = s.params;
  double obj = 0.0;
  State x = s.x0;
  double t = 0.0;
  if (tau1 > 0.0) {
    // Durations get clamped to the depletion limit: callers probe boundary
    // values with slack wider than the arc evaluator's own tolerance.
    const double d = std::min(tau1, arc_max_duration(p, ArcKind::Exponential, x));
    obj += arc_objective(p, ArcKind::Exponential, x, d);
    x = arc_state(p, ArcKind::Exponential, x, d);
    t = tau1;
  }
  if (tau_s > t) {
    const double d = std::min(tau_s - t, arc_max_duration(p, ArcKind::Linear, x));
    obj += arc_objective(p, ArcKind::Linear, x, d);
    x = arc_state(p, ArcKind::Linear, x, d);
    t = tau_s;
  }
  if (s.horizon > t) {
    obj += biomass(p, x) * (s.horizon - t);
  }
  return obj;
}

CandidateRow optimize_structure(const Scenario& s, CandidateStructure structure,
                                std::size_t resolution) {
  const ModelParams& p = s.params;
  const State& x0 = s.x0;
  const double T = s.horizon;
  const double slack = 1e-9 * (1.0 + T);
  const double max_exp = arc_max_duration(p, ArcKind::Exponential, x0);
  const double max_lin = arc_max_duration(p, ArcKind::Linear, x0);

  CandidateRow row;
  row.structure = structure;
  row.objective = biomass(p, x0) * T;
  row.feasible = true;

  switch (structure) {
    case CandidateStructure::Stationary:
      break;
    case CandidateStructure::Exponential: {
      row.feasible = max_exp >= T - slack;
      row.objective = shape_objective(s, std::min(T, max_exp), std::min(T, max_exp));
      break;
    }
    case CandidateStructure::Linear: {
      row.feasible = max_lin >= T - slack;
      const double d = std::min(T, max_lin);
      row.objective = shape_objective(s, 0.0, d);
      break;
    }
    case CandidateStructure::ExpLin: {
      const double hi = std::min(max_exp, T);
      const auto margin = [&](double tau1) {
        const State x1 = arc_state(p, ArcKind::Exponential, x0, tau1);
        return arc_max_duration(p, ArcKind::Linear, x1) - (T - tau1);
      };
      const double mslack = 1e-9 * (1.0 + T);
      const auto f = [&](double tau1) {
        if (margin(tau1) < -mslack) {
          return kPenalty;
        }
        return shape_objective(s, tau1, T);
      };
      const double best = scan_and_refine(f, 0.0, hi, resolution);
      if (f(best) <= kPenalty) {
        row.feasible = false;
        row.objective = 0.0;
      } else {
        row.tau1 = best;
        row.objective = shape_objective(s, best, T);
        row.feasible = true;
      }
      break;
    }
    case CandidateStructure::LinStat: {
      const double hi = std::min(max_lin, T);
      row.feasible = hi > slack;
      const auto f = [&](double tau_s) { return shape_objective(s, 0.0, tau_s); };
      const double best = scan_and_refine(f, 0.0, hi, resolution);
      row.tau_s = best;
      row.objective = f(best);
      break;
    }
    case CandidateStructure::ExpStat: {
      const double hi = std::min(max_exp, T);
      row.feasible = hi > slack;
      const auto f = [&](double tau_s) { return shape_objective(s, tau_s, tau_s); };
      const double best = scan_and_refine(f, 0.0, hi, resolution);
      row.tau_s = best;
      row.objective = f(best);
      break;
    }
    case CandidateStructure::ExpLinStat: {
      const double hi = std::min(max_exp, T);
      row.feasible = hi > slack && x0.nutrient > 0.0;
      const auto tau_s_of = [&](double tau1) {
        const State x1 = arc_state(p, ArcKind::Exponential, x0, tau1);
        return std::min(T, tau1 + arc_max_duration(p, ArcKind::Linear, x1));
      };
      const auto f = [&](double tau1) { return shape_objective(s, tau1, tau_s_of(tau1)); };
      const double best = scan_and_refine(f, 0.0, hi, resolution);
      row.tau1 = best;
      row.tau_s = tau_s_of(best);
      row.objective = f(best);
      break;
    }
  }
  return row;
}

}  // namespace

const char* candidate_structure_name(CandidateStructure structure) {
  switch (structure) {
    case CandidateStructure::Stationary:
      return "Stationary";
    case CandidateStructure::Exponential:
      return "Exponential";
    case CandidateStructure::Linear:
      return "Linear";
    case CandidateStructure::ExpLin:
      return "ExpLin";
    case CandidateStructure::LinStat:
      return "LinStat";
    case CandidateStructure::ExpStat:
      return "ExpStat";
    case CandidateStructure::ExpLinStat:
      return "ExpLinStat";
  }
  return "?";
}

Regime candidate_regime(CandidateStructure structure) {
  switch (structure) {
    case CandidateStructure::Stationary:
      return Regime::Degenerate;
    case CandidateStructure::Exponential:
      return Regime::Exponential;
    case CandidateStructure::Linear:
      return Regime::Linear;
    case CandidateStructure::ExpLin:
      return Regime::ExpLin;
    case CandidateStructure::LinStat:
      return Regime::LinStat;
    case CandidateStructure::ExpStat:
      return Regime::ExpStat;
    case CandidateStructure::ExpLinStat:
      return Regime::ExpLinStat;
  }
  return Regime::Degenerate;
}

PmpReport check_pmp(const Scenario& s, const Classification& cls, std::size_t samples_per_arc,
                    double tol_scale) {
  PmpReport report;

  Trajectory traj;
  try {
    traj = make_trajectory(s, cls);
  } catch (const std::exception& e) {
    report.pass = false;
    report.junctions_consistent = false;
    report.notes.push_back(std::string("trajectory not buildable: ") + e.what());
    return report;
  }

  const ModelParams& p = s.params;
  const PiecewiseCostate pc = backward_costate(p, traj, cls.gamma1);
  const double window = 1e-6 * std::max(s.horizon, 1e-30);

  std::vector<double> boundaries;
  boundaries.push_back(0.0);
  for (const Arc& arc : traj.arcs) {
    boundaries.push_back(arc.t_end);
  }

  const auto near_boundary = [&](double t) {
    for (double b : boundaries) {
      if (std::abs(t - b) <= window) {
        return true;
      }
    }
    return false;
  };

  for (const Arc& arc : traj.arcs) {
    if (!(arc.duration() > 0.0)) {
      continue;
    }
    for (std::size_t i = 0; i < samples_per_arc; ++i) {
      const double t = chebyshev_node(arc.t_start, arc.t_end, i, samples_per_arc);
      const Costate lam = pc.at(p, t);
      const SwitchReport sw = switching_values(p, lam);
      const State x = state_at(p, traj, t);

      PmpSample sample{t, sw.phi_M, sw.phi_E, arc.kind, 0.0};
      if (x.enzyme > 1e-12) {
        double active = 0.0;
        double second = std::max(sw.phi_M, sw.phi_E);
        if (arc.kind == ArcKind::Exponential) {
          active = sw.phi_E;
          second = std::max(sw.phi_M, 0.0);
        } else if (arc.kind == ArcKind::Linear) {
          active = sw.phi_M;
          second = std::max(sw.phi_E, 0.0);
        }
        const double best = std::max({sw.phi_M, sw.phi_E, 0.0});
        sample.violation = std::max(0.0, best - active) / (1.0 + std::abs(best));
        if (!near_boundary(t) && active - second <= 0.0 && sample.violation <= tol_scale) {
          if (report.junctions_consistent) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "active arc does not strictly dominate at t=%.17g", t);
            report.notes.push_back(buf);
          }
          report.junctions_consistent = false;
        }
      }
      report.max_violation = std::max(report.max_violation, sample.violation);
      report.samples.push_back(sample);
    }
  }

  const Costate lam_T = traj.arcs.empty() ? Costate{cls.gamma1.gamma1, 0.0, 0.0, 1.0}
                                          : pc.at(p, traj.horizon);
  const double g = cls.gamma1.gamma1;
  if (g < 0.0 || std::abs(lam_T.lam1 - g) > tol_scale * (1.0 + std::abs(g)) ||
      std::abs(lam_T.lam2) > tol_scale || std::abs(lam_T.lam3) > tol_scale) {
    report.terminal_consistent = false;
  }
  const State x_T = traj.arcs.empty() ? s.x0 : terminal_state(p, traj);
  if (std::abs(g * x_T.nutrient) >
      tol_scale * (1.0 + std::abs(g)) * (1.0 + std::abs(s.x0.nutrient))) {
    report.complementarity_ok = false;
  }

  report.pass = report.max_violation <= tol_scale && report.junctions_consistent &&
                report.terminal_consistent && report.complementarity_ok;
  return report;
}

CandidateTable compare_candidates(const Scenario& s, std::size_t resolution) {
  validate_scenario(s);
  if (resolution < 2) {
    throw InvalidParameterError("comparison resolution must be at least 2");
  }

  CandidateTable table;
  for (CandidateStructure structure :
       {CandidateStructure::Stationary, CandidateStructure::Exponential,
        CandidateStructure::Linear, CandidateStructure::ExpLin, CandidateStructure::LinStat,
        CandidateStructure::ExpStat, CandidateStructure::ExpLinStat}) {
    table.rows.push_back(optimize_structure(s, structure, resolution));
  }

  table.best = 0;
  double best_obj = -kInf;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!table.rows[i].feasible) {
      continue;
    }
    if (table.rows[i].objective > best_obj) {
      best_obj = table.rows[i].objective;
      table.best = i;
    }
  }
  return table;
}

GapReport oracle_gap(const Scenario& s, const Classification& cls,
                     const std::vector<std::size_t>& node_counts) {
  GapReport report;
  const double analytic = cls.objective;
  const double floor = 1e-14 * (1.0 + std::abs(analytic));

  for (std::size_t nodes : node_counts) {
    const OracleResult oracle = oracle_solve(s, nodes);
    if (oracle.status != LPStatus::Optimal) {
      throw SolverFailureError("oracle subproblem not optimal");
    }
    GapEntry entry;
    entry.nodes = nodes;
    entry.oracle_objective = oracle.objective;
    entry.analytic_objective = analytic;
    entry.gap = analytic - oracle.objective;
    entry.relative_gap = std::abs(analytic) > 0.0 ? entry.gap / std::abs(analytic)
                                                  : entry.gap;
    report.entries.push_back(entry);
  }

  // Least-squares slope of log(gap) against log(N); gap ~ C N^-q.
  std::vector<double> xs;
  std::vector<double> ys;
  for (const GapEntry& e : report.entries) {
    if (e.gap > floor) {
      xs.push_back(std::log(static_cast<double>(e.nodes)));
      ys.push_back(std::log(e.gap));
    }
  }
  if (xs.size() < 2) {
    report.empirical_order = kInf;
    return report;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double n = static_cast<double>(xs.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  report.empirical_order = -slope;
  return report;
}

Classification classification_for(const Scenario& s, Regime regime, const ClassifyOptions& opts) {
  Classification cls;
  cls.regime = regime;
  cls.method = ClassifyMethod::ByComparison;

  if (regime == Regime::Degenerate) {
    if (s.x0.enzyme > 0.0 && s.x0.nutrient <= 0.0 && s.horizon > 0.0) {
      cls.gamma1.gamma1 = std::max(s.horizon / s.params.a_M, s.horizon / s.params.a_E);
    }
    cls.objective = biomass(s.params, s.x0) * s.horizon;
    return cls;
  }

  CandidateStructure structure = CandidateStructure::Stationary;
  switch (regime) {
    case Regime::Exponential:
      structure = CandidateStructure::Exponential;
      break;
    case Regime::Linear:
      structure = CandidateStructure::Linear;
      break;
    case Regime::ExpLin:
      structure = CandidateStructure::ExpLin;
      break;
    case Regime::LinStat:
      structure = CandidateStructure::LinStat;
      break;
    case Regime::ExpStat:
      structure = CandidateStructure::ExpStat;
      break;
    case Regime::ExpLinStat:
      structure = CandidateStructure::ExpLinStat;
      break;
    case Regime::Degenerate:
      break;
  }

  const CandidateRow row = optimize_structure(s, structure, opts.compare_resolution);
  cls.tau1 = row.tau1;
  cls.tau_s = row.tau_s;
  cls.objective = row.objective;
  if (row.tau_s.has_value() && *row.tau_s < s.horizon) {
    const double tail = s.horizon - *row.tau_s;
    if (structure == CandidateStructure::ExpStat) {
      cls.gamma1.gamma1 = tail / s.params.a_E;
    } else {
      cls.gamma1.gamma1 = tail / s.params.a_M;
    }
  }
  return cls;
}

}  // namespace growthctl
