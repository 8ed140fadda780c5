#include "growthctl/model.hpp"

#include <algorithm>
#include <cmath>

namespace growthctl {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidParameterError(std::string(name) + " must be positive and finite, got " +
                                std::to_string(v));
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidParameterError(std::string(name) + " must be nonnegative and finite, got " +
                                std::to_string(v));
  }
}

}  // namespace

ModelParams reduce_params(const RawNetworkParams& raw, EnergyLoad load) {
  require_positive(raw.kA, "kA");
  require_positive(raw.kM, "kM");
  require_positive(raw.kE, "kE");
  require_nonnegative(raw.aM, "aM");
  require_nonnegative(raw.aE, "aE");
  require_positive(raw.bM, "bM");
  require_positive(raw.bE, "bE");

  // Eliminating the energy metabolite merges its enzyme demand into the two
  // remaining routes. The energy flux of one unit of storage flux is
  // aM*bM, catalyzed at rate kA (EnergyReaction) or, in the comparison
  // variant, at the route's own rate.
  const double denom_M = (load == EnergyLoad::EnergyReaction) ? raw.kA : raw.kM;
  const double denom_E = (load == EnergyLoad::EnergyReaction) ? raw.kA : raw.kE;

  ModelParams p;
  p.k_M = 1.0 / (raw.aM * raw.bM / denom_M + 1.0 / raw.kM);
  p.k_E = 1.0 / (raw.aE * raw.bE / denom_E + 1.0 / raw.kE);
  p.a_M = raw.aM + 1.0;
  p.a_E = raw.aE + 1.0;
  p.b_M = raw.bM;
  p.b_E = raw.bE;
  return p;
}

void validate_params(const ModelParams& p) {
  require_positive(p.k_M, "k_M");
  require_positive(p.k_E, "k_E");
  require_positive(p.a_M, "a_M");
  require_positive(p.a_E, "a_E");
  require_positive(p.b_M, "b_M");
  require_positive(p.b_E, "b_E");
}

StateDerivative dynamics(const ModelParams& p, const State& x, const Control& u) {
  const double v_M = u.u_M * x.enzyme;
  const double v_E = u.u_E * x.enzyme;
  return StateDerivative{
      -(p.a_M * p.b_M * v_M + p.a_E * p.b_E * v_E),
      v_M,
      v_E,
  };
}

FeasibilityReport control_feasible(const ModelParams& p, const Control& u, double tol) {
  const double capacity = 1.0 - u.u_M / p.k_M - u.u_E / p.k_E;
  const double margin = std::min({u.u_M, u.u_E, capacity});
  return FeasibilityReport{margin >= -tol, margin};
}

double biomass(const ModelParams& p, const State& x) {
  return p.b_M * x.storage + p.b_E * x.enzyme;
}

}  // namespace growthctl
