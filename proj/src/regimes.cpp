#include "growthctl/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "growthctl/lambert_w.hpp"
#include "growthctl/verify.hpp"

namespace growthctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Horizon below which a storage-only phase beats starting enzyme production:
// the payback window of an enzyme investment.
double payback_window(const ModelParams& p) {
  return 2.0 * (p.k_M * p.b_M - p.k_E * p.b_E) / (p.b_M * p.k_M * p.k_E);
}

double yield_gap(const ModelParams& p) { return p.k_E * p.b_E - p.k_M * p.b_M; }

// Nutrient left after an enzyme phase of length tau1 followed by a storage
// phase to the horizon. The literal variant drops the storage rate factor
// and is not mass-consistent.
double explin_nutrient_margin(const Scenario& s, double tau1, bool without_rate) {
  const ModelParams& p = s.params;
  const double grown = std::exp(p.k_E * tau1);
  const double lin_rate = without_rate ? p.a_M * p.b_M : p.a_M * p.b_M * p.k_M;
  return s.x0.nutrient - s.x0.enzyme * (p.a_E * p.b_E * std::expm1(p.k_E * tau1) +
                                        lin_rate * grown * (s.horizon - tau1));
}

// Slack of the storage-then-idle full-horizon condition evaluated at t = 0.
double linstat_window_margin(const ModelParams& p, double tau_s, double T) {
  const double ratio = p.a_E / p.a_M;
  const double lhs = (ratio - 1.0) * p.b_E * p.k_E * T;
  const double rhs =
      0.5 * p.b_M * p.k_M * p.k_E * tau_s * tau_s + (ratio * p.b_E * p.k_E - p.b_M * p.k_M) * tau_s;
  return lhs - rhs;
}

void set_boundary(Classification& cls, double tol) {
  cls.boundary = false;
  for (const auto& [name, value] : cls.margins) {
    (void)name;
    if (std::abs(value) <= tol) {
      cls.boundary = true;
      break;
    }
  }
}

Classification finish(const Scenario& s, const ClassifyOptions& opts, Classification cls) {
  const Trajectory traj = make_trajectory(s, cls);
  cls.objective = trajectory_objective(s.params, traj);
  set_boundary(cls, opts.tol);
  if (opts.attach_certificate) {
    const PmpReport rep = check_pmp(s, cls, opts.certificate_samples);
    cls.certificate = CertificateSummary{rep.pass, rep.max_violation, rep.samples.size()};
  }
  return cls;
}

Classification by_comparison(const Scenario& s, const ClassifyOptions& opts) {
  const CandidateTable table = compare_candidates(s, opts.compare_resolution);
  const CandidateRow& best = table.rows[table.best];

  Classification cls;
  cls.regime = candidate_regime(best.structure);
  cls.tau1 = best.tau1;
  cls.tau_s = best.tau_s;
  cls.method = ClassifyMethod::ByComparison;

  if (best.tau_s.has_value() && *best.tau_s < s.horizon) {
    // Trailing idle phase: the terminal nutrient multiplier mirrors the
    // closed-form choices, keyed by the arc feeding the idle phase.
    const double tail = s.horizon - *best.tau_s;
    if (best.structure == CandidateStructure::LinStat ||
        best.structure == CandidateStructure::ExpLinStat) {
      cls.gamma1.gamma1 = tail / s.params.a_M;
    } else if (best.structure == CandidateStructure::ExpStat) {
      cls.gamma1.gamma1 = tail / s.params.a_E;
    }
  }

  double runner_up = -kInf;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (i == table.best || !table.rows[i].feasible) continue;
    runner_up = std::max(runner_up, table.rows[i].objective);
  }
  if (runner_up > -kInf) {
    cls.margins["comparison_margin"] = best.objective - runner_up;
  }
  return finish(s, opts, cls);
}

}  // namespace

void validate_scenario(const Scenario& s) {
  validate_params(s.params);
  const double comps[3] = {s.x0.nutrient, s.x0.storage, s.x0.enzyme};
  const char* names[3] = {"x_N", "x_M", "x_E"};
  for (int i = 0; i < 3; ++i) {
    if (!(comps[i] >= 0.0) || !std::isfinite(comps[i])) {
      throw InvalidParameterError(std::string(names[i]) +
                                  " must be nonnegative and finite, got " +
                                  std::to_string(comps[i]));
    }
  }
  if (!(s.horizon >= 0.0) || !std::isfinite(s.horizon)) {
    throw InvalidParameterError("horizon must be nonnegative and finite, got " +
                                std::to_string(s.horizon));
  }
}

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::Exponential:
      return "Exponential";
    case Regime::Linear:
      return "Linear";
    case Regime::ExpLin:
      return "ExpLin";
    case Regime::LinStat:
      return "LinStat";
    case Regime::ExpStat:
      return "ExpStat";
    case Regime::ExpLinStat:
      return "ExpLinStat";
    case Regime::Degenerate:
      return "Degenerate";
  }
  return "?";
}

const char* classify_method_name(ClassifyMethod method) {
  switch (method) {
    case ClassifyMethod::ClosedForm:
      return "closed-form";
    case ClassifyMethod::NumericCheck:
      return "numeric-check";
    case ClassifyMethod::ByComparison:
      return "by-comparison";
  }
  return "?";
}

double explin_switch_time(const ModelParams& p, double T) {
  if (yield_gap(p) >= 0.0) {
    throw std::domain_error("enzyme production dominates pointwise; no switch exists");
  }
  const double window = payback_window(p);
  if (T < window - kConditionTol) {
    throw std::domain_error("horizon shorter than the enzyme payback window");
  }
  return std::max(0.0, T - window);
}

double linstat_switch_time(const ModelParams& p, const State& x0) {
  return arc_max_duration(p, ArcKind::Linear, x0);
}

double expstat_switch_time(const ModelParams& p, const State& x0) {
  return arc_max_duration(p, ArcKind::Exponential, x0);
}

NecessaryCheck expstat_necessary_check(const Scenario& s, double tau_s, double tol) {
  const ModelParams& p = s.params;
  const double c = p.b_E / (p.b_M * p.k_M);
  const double offset = (p.a_M / p.a_E - 1.0) * (s.horizon - tau_s);
  const auto psi = [&](double sigma) {
    return c * std::expm1(p.k_E * sigma) - sigma + offset;
  };

  double sigma_min = 0.0;
  if (c * p.k_E < 1.0) {
    const double stationary = std::log(1.0 / (c * p.k_E)) / p.k_E;
    sigma_min = std::min(stationary, tau_s);
  }
  const double min_psi = psi(sigma_min);

  if (min_psi < -tol) {
    // Self-check: the zero crossings have the closed form
    // sigma = d - W(-k_E c e^{k_E d})/k_E with d = offset - c; both branches
    // must reproduce roots of psi.
    const double d = offset - c;
    const double arg = -p.k_E * c * std::exp(p.k_E * d);
    if (arg >= -std::exp(-1.0) && arg < 0.0) {
      for (WBranch branch : {WBranch::Principal, WBranch::MinusOne}) {
        const double root = d - lambert_w(branch, arg) / p.k_E;
        const double scale = 1.0 + std::abs(offset) + c * std::exp(p.k_E * std::abs(root));
        if (std::abs(psi(root)) > 1e-6 * scale) {
          throw SolverFailureError("storage-detour root cross-check failed");
        }
      }
    }
  }
  return NecessaryCheck{min_psi >= -tol, min_psi};
}

std::optional<ExpLinStatTimes> explinstat_switch_times(const Scenario& s,
                                                       const ClassifyOptions& opts) {
  const ModelParams& p = s.params;
  const State& x0 = s.x0;
  const double T = s.horizon;
  if (x0.enzyme <= 0.0 || x0.nutrient <= 0.0 || T <= 0.0) {
    return std::nullopt;
  }

  const double max_exp = arc_max_duration(p, ArcKind::Exponential, x0);
  const double hi = std::min(max_exp, T) * (1.0 - 1e-12);
  if (!(hi > 0.0)) {
    return std::nullopt;
  }

  const auto tau_s_of = [&](double tau1) {
    const double enzyme = x0.enzyme * std::exp(p.k_E * tau1);
    const double remaining = x0.nutrient - p.a_E * p.b_E * x0.enzyme * std::expm1(p.k_E * tau1);
    const double level = opts.explinstat_balance_without_enzyme ? 1.0 : enzyme;
    return tau1 + remaining / (p.a_M * p.b_M * p.k_M * level);
  };
  const auto residual = [&](double tau1) {
    const double tau_s = tau_s_of(tau1);
    const double gap = tau_s - tau1;
    return 0.5 * p.b_M * p.k_M * p.k_E * gap * gap + (p.b_E * p.k_E - p.b_M * p.k_M) * gap +
           (1.0 - p.a_E / p.a_M) * p.b_E * p.k_E * (T - tau_s);
  };

  const std::size_t scan = 256;
  double lo = 0.0;
  double lo_val = residual(lo);
  double root_lo = kInf;
  double root_hi = kInf;
  for (std::size_t i = 1; i <= scan; ++i) {
    const double t = hi * static_cast<double>(i) / static_cast<double>(scan);
    const double val = residual(t);
    if ((lo_val > 0.0) != (val > 0.0)) {
      root_lo = lo;
      root_hi = t;
      break;
    }
    lo = t;
    lo_val = val;
  }
  if (!(root_hi < kInf)) {
    return std::nullopt;
  }

  double a = root_lo;
  double b = root_hi;
  double fa = residual(a);
  for (int iter = 0; iter < 200 && b - a > 1e-16 * (1.0 + b); ++iter) {
    const double mid = 0.5 * (a + b);
    const double fm = residual(mid);
    if ((fa > 0.0) == (fm > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  const double tau1 = 0.5 * (a + b);
  const double tau_s = tau_s_of(tau1);
  const double res = residual(tau1);

  if (std::abs(res) > 1e-10) {
    return std::nullopt;
  }
  const double tol = kConditionTol;
  if (!(tau1 >= -tol) || !(tau_s - tau1 >= -tol) || !(T - tau_s >= -tol)) {
    return std::nullopt;
  }
  const double slope_margin =
      p.b_E * p.k_E - p.b_M * p.k_M * (1.0 - p.k_E * (tau_s - tau1));
  if (slope_margin < -tol) {
    return std::nullopt;
  }
  return ExpLinStatTimes{tau1, tau_s, res};
}

std::optional<Classification> short_horizon_regime(const Scenario& s,
                                                   const ClassifyOptions& opts) {
  const ModelParams& p = s.params;
  const double gap = yield_gap(p);

  if (gap >= -opts.tol) {
    const double nutrient_margin =
        s.x0.nutrient - p.a_E * p.b_E * s.x0.enzyme * std::expm1(p.k_E * s.horizon);
    if (nutrient_margin < -opts.tol) {
      return std::nullopt;
    }
    Classification cls;
    cls.regime = Regime::Exponential;
    cls.method = ClassifyMethod::ClosedForm;
    cls.margins["yield_margin"] = gap;
    cls.margins["nutrient_margin"] = nutrient_margin;
    return finish(s, opts, cls);
  }

  const double window = payback_window(p);
  if (window - s.horizon > opts.tol) {
    const double nutrient_margin =
        s.x0.nutrient - s.horizon * p.a_M * p.b_M * p.k_M * s.x0.enzyme;
    if (nutrient_margin < -opts.tol) {
      return std::nullopt;
    }
    Classification cls;
    cls.regime = Regime::Linear;
    cls.method = ClassifyMethod::ClosedForm;
    cls.margins["yield_margin"] = -gap;
    cls.margins["window_margin"] = window - s.horizon;
    cls.margins["nutrient_margin"] = nutrient_margin;
    return finish(s, opts, cls);
  }

  const double tau1 = std::max(0.0, s.horizon - window);
  const double nutrient_margin =
      explin_nutrient_margin(s, tau1, opts.explin_depletion_without_rate);
  if (nutrient_margin < -opts.tol) {
    return std::nullopt;
  }
  Classification cls;
  cls.regime = Regime::ExpLin;
  cls.tau1 = tau1;
  cls.method = ClassifyMethod::ClosedForm;
  cls.margins["yield_margin"] = -gap;
  cls.margins["window_margin"] = s.horizon - window;
  cls.margins["nutrient_margin"] = nutrient_margin;
  return finish(s, opts, cls);
}

Classification long_horizon_regime(const Scenario& s, const ClassifyOptions& opts) {
  const ModelParams& p = s.params;
  const double T = s.horizon;

  {
    const double cost_margin = p.a_E - p.a_M;
    const double tau_s = linstat_switch_time(p, s.x0);
    const double depletion_margin = T - tau_s;
    if (cost_margin >= -opts.tol && depletion_margin >= -opts.tol && std::isfinite(tau_s)) {
      const double window_margin = linstat_window_margin(p, tau_s, T);
      if (window_margin >= -opts.tol) {
        Classification cls;
        cls.regime = Regime::LinStat;
        cls.tau_s = tau_s;
        cls.gamma1.gamma1 = std::max(0.0, depletion_margin) / p.a_M;
        cls.method = ClassifyMethod::ClosedForm;
        cls.margins["cost_margin"] = cost_margin;
        cls.margins["window_margin"] = window_margin;
        cls.margins["depletion_margin"] = depletion_margin;
        return finish(s, opts, cls);
      }
    }
  }

  {
    const double cost_margin = p.a_M - p.a_E;
    const double tau_s = expstat_switch_time(p, s.x0);
    const double depletion_margin = T - tau_s;
    if (cost_margin >= -opts.tol && depletion_margin >= -opts.tol && std::isfinite(tau_s)) {
      const double yield_margin = p.b_E * p.k_E - p.b_M * p.k_M;
      const double window_margin = (1.0 - p.a_E / p.a_M) * T - tau_s;
      Classification cls;
      cls.regime = Regime::ExpStat;
      cls.tau_s = tau_s;
      cls.gamma1.gamma1 = std::max(0.0, depletion_margin) / p.a_E;
      cls.margins["cost_margin"] = cost_margin;
      cls.margins["depletion_margin"] = depletion_margin;
      if (yield_margin >= -opts.tol) {
        cls.method = ClassifyMethod::ClosedForm;
        cls.margins["yield_margin"] = yield_margin;
        return finish(s, opts, cls);
      }
      if (window_margin >= -opts.tol) {
        cls.method = ClassifyMethod::ClosedForm;
        cls.margins["window_margin"] = window_margin;
        return finish(s, opts, cls);
      }
      const NecessaryCheck check = expstat_necessary_check(s, tau_s, opts.tol);
      if (check.holds) {
        cls.method = ClassifyMethod::NumericCheck;
        cls.margins["psi_min"] = check.margin;
        return finish(s, opts, cls);
      }
    }
  }

  if (p.a_E - p.a_M >= -opts.tol) {
    if (const auto times = explinstat_switch_times(s, opts)) {
      Classification cls;
      cls.regime = Regime::ExpLinStat;
      cls.tau1 = times->tau1;
      cls.tau_s = times->tau_s;
      cls.gamma1.gamma1 = std::max(0.0, T - times->tau_s) / p.a_M;
      cls.method = ClassifyMethod::ClosedForm;
      cls.margins["cost_margin"] = p.a_E - p.a_M;
      cls.margins["slope_margin"] =
          p.b_E * p.k_E - p.b_M * p.k_M * (1.0 - p.k_E * (times->tau_s - times->tau1));
      cls.margins["depletion_margin"] = T - times->tau_s;
      return finish(s, opts, cls);
    }
  }

  return by_comparison(s, opts);
}

Classification classify(const Scenario& s, const ClassifyOptions& opts) {
  validate_scenario(s);

  if (s.x0.enzyme <= 0.0 || s.x0.nutrient <= 0.0 || s.horizon <= 0.0) {
    Classification cls;
    cls.regime = Regime::Degenerate;
    cls.method = ClassifyMethod::ClosedForm;
    if (s.x0.enzyme > 0.0 && s.horizon > 0.0) {
      // Exhausted nutrient from the start: idling is optimal and the
      // terminal multiplier must dominate both production payoffs.
      cls.gamma1.gamma1 = std::max(s.horizon / s.params.a_M, s.horizon / s.params.a_E);
    }
    return finish(s, opts, cls);
  }

  if (auto cls = short_horizon_regime(s, opts)) {
    return *cls;
  }
  return long_horizon_regime(s, opts);
}

Trajectory make_trajectory(const Scenario& s, const Classification& cls) {
  std::vector<std::pair<ArcKind, double>> ends;
  const double T = s.horizon;
  const double tau1 = cls.tau1.value_or(0.0);
  const double tau_s = cls.tau_s.value_or(T);
  switch (cls.regime) {
    case Regime::Degenerate:
      ends = {{ArcKind::Stationary, T}};
      break;
    case Regime::Exponential:
      ends = {{ArcKind::Exponential, T}};
      break;
    case Regime::Linear:
      ends = {{ArcKind::Linear, T}};
      break;
    case Regime::ExpLin:
      ends = {{ArcKind::Exponential, tau1}, {ArcKind::Linear, T}};
      break;
    case Regime::LinStat:
      ends = {{ArcKind::Linear, tau_s}, {ArcKind::Stationary, T}};
      break;
    case Regime::ExpStat:
      ends = {{ArcKind::Exponential, tau_s}, {ArcKind::Stationary, T}};
      break;
    case Regime::ExpLinStat:
      ends = {{ArcKind::Exponential, tau1},
              {ArcKind::Linear, tau_s},
              {ArcKind::Stationary, T}};
      break;
  }

  std::vector<ArcPlanEntry> plan;
  double prev = 0.0;
  for (const auto& [kind, end] : ends) {
    const double clamped = std::clamp(end, prev, T);
    if (clamped - prev > 0.0) {
      plan.push_back(ArcPlanEntry{kind, clamped - prev});
      prev = clamped;
    }
  }
  if (plan.empty()) {
    plan.push_back(ArcPlanEntry{ArcKind::Stationary, T});
  }
  return build_trajectory(s.params, s.x0, plan);
}

Scenario with_axis_value(const Scenario& s, const std::string& name, double value) {
  Scenario out = s;
  if (name == "k_M") {
    out.params.k_M = value;
  } else if (name == "k_E") {
    out.params.k_E = value;
  } else if (name == "a_M") {
    out.params.a_M = value;
  } else if (name == "a_E") {
    out.params.a_E = value;
  } else if (name == "b_M") {
    out.params.b_M = value;
  } else if (name == "b_E") {
    out.params.b_E = value;
  } else if (name == "x_N") {
    out.x0.nutrient = value;
  } else if (name == "x_M") {
    out.x0.storage = value;
  } else if (name == "x_E") {
    out.x0.enzyme = value;
  } else if (name == "T") {
    out.horizon = value;
  } else {
    throw InvalidParameterError("unknown sweep axis: " + name);
  }
  return out;
}

std::vector<RegimeMapCell> regime_map(const Scenario& base, const AxisSpec& axis1,
                                      const AxisSpec& axis2, const ClassifyOptions& opts) {
  const auto grid = [](const AxisSpec& axis) {
    std::vector<double> values;
    values.reserve(axis.count);
    if (axis.count == 1) {
      values.push_back(axis.lo);
      return values;
    }
    for (std::size_t i = 0; i < axis.count; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(axis.count - 1);
      values.push_back(axis.lo + f * (axis.hi - axis.lo));
    }
    return values;
  };

  std::vector<RegimeMapCell> cells;
  cells.reserve(axis1.count * axis2.count);
  for (double v1 : grid(axis1)) {
    for (double v2 : grid(axis2)) {
      Scenario cell = with_axis_value(with_axis_value(base, axis1.name, v1), axis2.name, v2);
      cells.push_back(RegimeMapCell{v1, v2, classify(cell, opts)});
    }
  }
  return cells;
}

}  // namespace growthctl
