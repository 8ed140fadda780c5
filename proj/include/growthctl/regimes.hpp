#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "growthctl/arcs.hpp"
#include "growthctl/costate.hpp"
#include "growthctl/model.hpp"

namespace growthctl {

struct Scenario {
  ModelParams params;
  State x0;
  double horizon;
};

void validate_scenario(const Scenario& s);

// Optimal control structures on a finite horizon: a growth phase (enzyme
// production, storage production, or enzyme-then-storage) optionally followed
// by an idle phase once the nutrient runs out. Degenerate absorbs scenarios
// with nothing to allocate (no enzyme, no nutrient, or no time).
enum class Regime { Exponential, Linear, ExpLin, LinStat, ExpStat, ExpLinStat, Degenerate };

const char* regime_name(Regime regime);

enum class ClassifyMethod { ClosedForm, NumericCheck, ByComparison };

const char* classify_method_name(ClassifyMethod method);

struct CertificateSummary {
  bool pass = false;
  double max_violation = 0.0;
  std::size_t samples = 0;
};

struct Classification {
  Regime regime = Regime::Degenerate;
  std::optional<double> tau1;
  std::optional<double> tau_s;
  TerminalCondition gamma1;
  std::map<std::string, double> margins;
  ClassifyMethod method = ClassifyMethod::ClosedForm;
  double objective = 0.0;
  bool boundary = false;
  std::optional<CertificateSummary> certificate;
};

struct ClassifyOptions {
  double tol = kConditionTol;
  bool attach_certificate = true;
  std::size_t certificate_samples = 1000;
  std::size_t compare_resolution = 100;
  // Drop the storage-rate factor k_M from the enzyme-then-storage nutrient
  // check (not mass-consistent; kept for comparison runs).
  bool explin_depletion_without_rate = false;
  // Drop the enzyme level x_E(0)e^{k_E tau1} from the three-phase nutrient
  // balance (not mass-consistent; kept for comparison runs).
  bool explinstat_balance_without_enzyme = false;
};

Classification classify(const Scenario& s, const ClassifyOptions& opts = {});

// Growth-only candidates for horizons too short to drain the nutrient.
// Returns nullopt when the winning structure would run out of nutrient, in
// which case classify dispatches to the depleting regimes.
std::optional<Classification> short_horizon_regime(const Scenario& s,
                                                   const ClassifyOptions& opts = {});

Classification long_horizon_regime(const Scenario& s, const ClassifyOptions& opts = {});

// Switch from enzyme to storage production when the remaining horizon equals
// the payback window 2(k_M b_M - k_E b_E)/(b_M k_M k_E).
double explin_switch_time(const ModelParams& p, double T);

// Nutrient-exhaustion time of a pure storage (resp. enzyme) production phase.
double linstat_switch_time(const ModelParams& p, const State& x0);
double expstat_switch_time(const ModelParams& p, const State& x0);

struct NecessaryCheck {
  bool holds;
  double margin;
};

// Exact check that enzyme-then-idle beats a storage detour at every time in
// the growth phase; sharper than the sufficient conditions, evaluated via the
// closed-form minimizer of psi(sigma) = c(e^{k_E sigma}-1) - sigma +
// (a_M/a_E - 1)(T - tau_s) with c = b_E/(b_M k_M).
NecessaryCheck expstat_necessary_check(const Scenario& s, double tau_s,
                                       double tol = kConditionTol);

struct ExpLinStatTimes {
  double tau1;
  double tau_s;
  double residual;
};

// Solves the two-equation system for the enzyme/storage switch and the
// depletion time: tau_s follows from nutrient balance in closed form, the
// remaining scalar equation is bracketed and bisected in tau1.
std::optional<ExpLinStatTimes> explinstat_switch_times(const Scenario& s,
                                                       const ClassifyOptions& opts = {});

Trajectory make_trajectory(const Scenario& s, const Classification& cls);

struct AxisSpec {
  std::string name;
  double lo;
  double hi;
  std::size_t count;
};

Scenario with_axis_value(const Scenario& s, const std::string& name, double value);

struct RegimeMapCell {
  double value1;
  double value2;
  Classification cls;
};

std::vector<RegimeMapCell> regime_map(const Scenario& base, const AxisSpec& axis1,
                                      const AxisSpec& axis2, const ClassifyOptions& opts = {});

}  // namespace growthctl
