#pragma once

#include <stdexcept>
#include <string>

namespace growthctl {

// Absolute tolerance for control-constraint margins. Closed-form candidates
// sit exactly on the boundary of the feasible control set, so feasibility
// checks accept margins down to -kFeasibilityTol.
inline constexpr double kFeasibilityTol = 1e-12;

// Absolute tolerance on nutrient nonnegativity along trajectories.
inline constexpr double kNutrientTol = 1e-10;

// Tolerance for strict inequalities in regime conditions; values inside the
// band are boundary cases.
inline constexpr double kConditionTol = 1e-10;

// Tolerance for switching-function ties.
inline constexpr double kSwitchTieTol = 1e-10;

struct InvalidParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerical routine (root bracketing, LP pivoting, a consistency
// cross-check) gave up or contradicted itself; distinct from bad input.
struct SolverFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kinetic and stoichiometric constants of the three-reaction network
// (nutrient uptake to energy, storage production, enzyme production),
// before the energy metabolite is eliminated.
struct RawNetworkParams {
  double kA;  // catalytic constant of the energy reaction (1/time)
  double kM;  // catalytic constant of storage production (1/time)
  double kE;  // catalytic constant of enzyme production (1/time)
  double aM;  // energy stoichiometry of storage production (dimensionless)
  double aE;  // energy stoichiometry of enzyme production (dimensionless)
  double bM;  // storage biomass weight (mass per mole)
  double bE;  // enzyme biomass weight (mass per mole)
};

// Selects which catalytic constant absorbs the enzyme demand of energy
// production when the energy metabolite is eliminated. EnergyReaction routes
// it through kA, which is the form consistent with the full capacity
// constraint. OwnReaction charges it to the consuming reaction's own
// constant; it is kept selectable for comparison only.
enum class EnergyLoad { EnergyReaction, OwnReaction };

// Reduced model constants. a_M and a_E are total nutrient cost factors
// (energy stoichiometry plus the unit of nutrient built in directly), so
// reduce_params always yields a_M >= 1 and a_E >= 1.
struct ModelParams {
  double k_M;  // effective catalytic constant, storage route (1/time)
  double k_E;  // effective catalytic constant, enzyme route (1/time)
  double a_M;  // nutrient cost factor of storage
  double a_E;  // nutrient cost factor of enzyme
  double b_M;  // storage biomass weight
  double b_E;  // enzyme biomass weight
};

// Amounts of nutrient, storage molecule, and enzyme (moles). All components
// stay nonnegative along feasible trajectories.
struct State {
  double nutrient;
  double storage;
  double enzyme;
};

// Enzyme allocation rates (1/time). Feasible controls satisfy u_M, u_E >= 0
// and u_M/k_M + u_E/k_E <= 1.
struct Control {
  double u_M;
  double u_E;
};

struct StateDerivative {
  double d_nutrient;
  double d_storage;
  double d_enzyme;
};

struct FeasibilityReport {
  bool feasible;
  double margin;  // min of the constraint slacks; negative when violated
};

// Collapses the raw network constants onto the reduced two-control model.
// Throws InvalidParameterError if any raw constant violates its sign
// constraints.
ModelParams reduce_params(const RawNetworkParams& raw,
                          EnergyLoad load = EnergyLoad::EnergyReaction);

void validate_params(const ModelParams& p);

StateDerivative dynamics(const ModelParams& p, const State& x, const Control& u);

FeasibilityReport control_feasible(const ModelParams& p, const Control& u,
                                   double tol = kFeasibilityTol);

// Biomass b_M*storage + b_E*enzyme; the nutrient pool does not count.
double biomass(const ModelParams& p, const State& x);

}  // namespace growthctl
