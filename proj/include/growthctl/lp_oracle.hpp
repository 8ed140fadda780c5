#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "growthctl/model.hpp"
#include "growthctl/regimes.hpp"

namespace growthctl {

struct LPEntry {
  std::size_t col;
  double coef;
};

using SparseRow = std::vector<LPEntry>;

// Maximize c.z subject to A_eq z = b_eq, A_ub z <= b_ub, z >= 0.
struct LPProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<SparseRow> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<SparseRow> ub_rows;
  std::vector<double> ub_rhs;
  std::vector<std::string> labels;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  double value = 0.0;
  std::vector<double> primal;
  std::vector<std::size_t> basis;
  std::size_t iterations = 0;
};

class LpStructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Full time-discretized transcription: states x(t_k) for k=0..N followed by
// fluxes (v_M, v_E)(t_k) for k=0..N-1, forward-Euler dynamics, capacity at
// the left endpoint, trapezoidal objective on biomass.
LPProblem transcribe(const Scenario& s, std::size_t nodes);

LPSolution simplex_solve(const LPProblem& lp);

struct OracleResult {
  LPStatus status = LPStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Control> controls;
  std::vector<double> flux_M;
  std::vector<double> flux_E;
  std::vector<std::size_t> degenerate_nodes;
  std::size_t nodes = 0;
  std::size_t iterations = 0;
};

// Discretized optimum via an equivalent reduced LP over fluxes only (states
// are eliminated through the Euler recursion, so the tableau stays small
// enough for the dense solver at a few thousand nodes).
OracleResult oracle_solve(const Scenario& s, std::size_t nodes);

std::string dump_lp(const LPProblem& lp);

}  // namespace growthctl
