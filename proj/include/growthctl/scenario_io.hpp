#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "growthctl/regimes.hpp"

namespace growthctl {

struct RunConfig {
  double tol = kConditionTol;
  std::size_t lp_nodes = 1000;
  std::size_t samples = 1000;
};

struct ScenarioFile {
  Scenario scenario;
  RunConfig config;
  bool from_raw = false;
  RawNetworkParams raw{};
};

// Parse or schema failure; the message carries a JSON-pointer-style location.
class ScenarioFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioFile parse_scenario_text(const std::string& text, const std::string& origin);
ScenarioFile parse_scenario_file(const std::string& path);

std::string serialize_scenario(const ScenarioFile& file);

// 17 significant digits, '.' decimal, no locale surprises.
std::string format_g17(double v);

std::string classification_json(const Classification& cls);

// Columns: t, x_N, x_M, x_E, u_M, u_E, biomass. LF line endings.
std::string trajectory_csv(const ModelParams& p, const Trajectory& traj, std::size_t rows);

// Columns: t, lam1, lam2, lam3, phi_M, phi_E, active_arc.
std::string costate_csv(const Scenario& s, const Classification& cls, std::size_t rows);

// Columns: param1, param2, regime, tau1, tau_s, objective.
std::string regime_map_csv(const std::vector<RegimeMapCell>& cells);

}  // namespace growthctl
