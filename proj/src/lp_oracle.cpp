#include "growthctl/lp_oracle.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace growthctl {

namespace {

std::string node_label(const char* base, std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s(t_%zu)", base, k);
  return buf;
}

double trap_weight(std::size_t k, std::size_t nodes, double dt) {
  return (k == 0 || k == nodes) ? 0.5 * dt : dt;
}

}  // namespace

LPProblem transcribe(const Scenario& s, std::size_t nodes) {
  validate_scenario(s);
  if (nodes < 1) {
    throw LpStructureError("transcription needs at least one interval");
  }
  const ModelParams& p = s.params;
  const std::size_t n_state = 3 * (nodes + 1);
  const double dt = s.horizon / static_cast<double>(nodes);

  LPProblem lp;
  lp.num_vars = n_state + 2 * nodes;
  lp.objective.assign(lp.num_vars, 0.0);
  lp.labels.reserve(lp.num_vars);

  auto state_col = [&](std::size_t k, std::size_t i) { return 3 * k + i; };
  auto flux_col = [&](std::size_t k, std::size_t i) { return n_state + 2 * k + i; };

  for (std::size_t k = 0; k <= nodes; ++k) {
    lp.labels.push_back(node_label("x_N", k));
    lp.labels.push_back(node_label("x_M", k));
    lp.labels.push_back(node_label("x_E", k));
  }
  for (std::size_t k = 0; k < nodes; ++k) {
    lp.labels.push_back(node_label("v_M", k));
    lp.labels.push_back(node_label("v_E", k));
  }

  const double init[3] = {s.x0.nutrient, s.x0.storage, s.x0.enzyme};
  for (std::size_t i = 0; i < 3; ++i) {
    lp.eq_rows.push_back({{state_col(0, i), 1.0}});
    lp.eq_rhs.push_back(init[i]);
  }

  for (std::size_t k = 0; k < nodes; ++k) {
    lp.eq_rows.push_back({{state_col(k + 1, 0), 1.0},
                          {state_col(k, 0), -1.0},
                          {flux_col(k, 0), dt * p.a_M * p.b_M},
                          {flux_col(k, 1), dt * p.a_E * p.b_E}});
    lp.eq_rhs.push_back(0.0);
    lp.eq_rows.push_back(
        {{state_col(k + 1, 1), 1.0}, {state_col(k, 1), -1.0}, {flux_col(k, 0), -dt}});
    lp.eq_rhs.push_back(0.0);
    lp.eq_rows.push_back(
        {{state_col(k + 1, 2), 1.0}, {state_col(k, 2), -1.0}, {flux_col(k, 1), -dt}});
    lp.eq_rhs.push_back(0.0);
  }

  for (std::size_t k = 0; k < nodes; ++k) {
    lp.ub_rows.push_back(
        {{flux_col(k, 0), 1.0 / p.k_M}, {flux_col(k, 1), 1.0 / p.k_E}, {state_col(k, 2), -1.0}});
    lp.ub_rhs.push_back(0.0);
  }

  for (std::size_t k = 0; k <= nodes; ++k) {
    const double w = trap_weight(k, nodes, dt);
    lp.objective[state_col(k, 1)] += w * p.b_M;
    lp.objective[state_col(k, 2)] += w * p.b_E;
  }
  return lp;
}

OracleResult oracle_solve(const Scenario& s, std::size_t nodes) {
  validate_scenario(s);
  if (nodes < 1) {
    throw LpStructureError("oracle needs at least one interval");
  }
  const ModelParams& p = s.params;
  const double dt = s.horizon / static_cast<double>(nodes);

  // States are eliminated through the Euler recursion
  //   x_E(t_k) = x_E(0) + dt * sum_{j<k} v_E(t_j),
  // leaving a flux-only LP: capacity per interval plus terminal nutrient
  // nonnegativity (x_N is nonincreasing, so interior bounds are redundant).
  // The trapezoidal objective collapses to per-flux weights dt^2 (N - j - 1/2)
  // plus the constant T * biomass(x0) added back below.
  LPProblem lp;
  lp.num_vars = 2 * nodes;
  lp.objective.assign(lp.num_vars, 0.0);
  lp.labels.reserve(lp.num_vars);
  for (std::size_t k = 0; k < nodes; ++k) {
    lp.labels.push_back(node_label("v_M", k));
    lp.labels.push_back(node_label("v_E", k));
  }

  for (std::size_t j = 0; j < nodes; ++j) {
    const double w = dt * dt * (static_cast<double>(nodes - j) - 0.5);
    lp.objective[2 * j] = w * p.b_M;
    lp.objective[2 * j + 1] = w * p.b_E;
  }

  for (std::size_t k = 0; k < nodes; ++k) {
    SparseRow row;
    row.reserve(k + 2);
    row.push_back({2 * k, 1.0 / p.k_M});
    row.push_back({2 * k + 1, 1.0 / p.k_E});
    for (std::size_t j = 0; j < k; ++j) {
      row.push_back({2 * j + 1, -dt});
    }
    lp.ub_rows.push_back(std::move(row));
    lp.ub_rhs.push_back(s.x0.enzyme);
  }
  {
    SparseRow row;
    row.reserve(2 * nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
      row.push_back({2 * j, dt * p.a_M * p.b_M});
      row.push_back({2 * j + 1, dt * p.a_E * p.b_E});
    }
    lp.ub_rows.push_back(std::move(row));
    lp.ub_rhs.push_back(s.x0.nutrient);
  }

  const LPSolution sol = simplex_solve(lp);
  OracleResult out;
  out.status = sol.status;
  out.nodes = nodes;
  out.iterations = sol.iterations;
  if (sol.status != LPStatus::Optimal) {
    return out;
  }

  out.objective = sol.value + s.horizon * biomass(p, s.x0);
  out.times.reserve(nodes + 1);
  out.states.reserve(nodes + 1);
  out.flux_M.reserve(nodes);
  out.flux_E.reserve(nodes);
  out.controls.reserve(nodes);

  State x = s.x0;
  for (std::size_t k = 0; k <= nodes; ++k) {
    out.times.push_back(dt * static_cast<double>(k));
    out.states.push_back(x);
    if (k == nodes) break;
    const double vM = sol.primal[2 * k];
    const double vE = sol.primal[2 * k + 1];
    out.flux_M.push_back(vM);
    out.flux_E.push_back(vE);
    if (x.enzyme <= 1e-12) {
      out.controls.push_back(Control{0.0, 0.0});
      out.degenerate_nodes.push_back(k);
    } else {
      out.controls.push_back(Control{vM / x.enzyme, vE / x.enzyme});
    }
    x.nutrient -= dt * (p.a_M * p.b_M * vM + p.a_E * p.b_E * vE);
    x.storage += dt * vM;
    x.enzyme += dt * vE;
  }
  return out;
}

std::string dump_lp(const LPProblem& lp) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "vars %zu eq %zu ub %zu\n", lp.num_vars, lp.eq_rows.size(),
                lp.ub_rows.size());
  out += buf;
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    if (lp.objective[j] == 0.0) continue;
    const char* label = j < lp.labels.size() ? lp.labels[j].c_str() : "?";
    std::snprintf(buf, sizeof(buf), "max %s %.17g\n", label, lp.objective[j]);
    out += buf;
  }
  auto dump_rows = [&](const std::vector<SparseRow>& rows, const std::vector<double>& rhs,
                       const char* sense) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::snprintf(buf, sizeof(buf), "row %s %zu:", sense, r);
      out += buf;
      for (const LPEntry& e : rows[r]) {
        const char* label = e.col < lp.labels.size() ? lp.labels[e.col].c_str() : "?";
        std::snprintf(buf, sizeof(buf), " %.17g %s", e.coef, label);
        out += buf;
      }
      std::snprintf(buf, sizeof(buf), " %s %.17g\n", sense, rhs[r]);
      out += buf;
    }
  };
  dump_rows(lp.eq_rows, lp.eq_rhs, "=");
  dump_rows(lp.ub_rows, lp.ub_rhs, "<=");
  return out;
}

}  // namespace growthctl
