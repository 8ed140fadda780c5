#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "growthctl/lp_oracle.hpp"
#include "growthctl/scenario_io.hpp"
#include "growthctl/verify.hpp"

namespace {

using namespace growthctl;

constexpr int kExitOk = 0;
constexpr int kExitCertificateFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitSolverFailure = 3;

double default_tol() {
  if (const char* env = std::getenv("GROWTHCTL_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && std::isfinite(v) && v > 0.0) {
      return v;
    }
    std::cerr << "warning: ignoring invalid GROWTHCTL_TOL \"" << env << "\"\n";
  }
  return kConditionTol;
}

ScenarioFile load(const std::string& path) {
  ScenarioFile file = parse_scenario_file(path);
  const double base = default_tol();
  if (file.config.tol == kConditionTol) {
    file.config.tol = base;
  }
  return file;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw ScenarioFormatError(out_path + ": cannot open for writing");
  }
  out << text;
}

AxisSpec parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  const auto c1 = text.find(':', eq == std::string::npos ? 0 : eq + 1);
  const auto c2 = text.find(':', c1 == std::string::npos ? 0 : c1 + 1);
  if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos) {
    throw ScenarioFormatError("axis must look like name=lo:hi:count, got \"" + text + "\"");
  }
  AxisSpec axis;
  axis.name = text.substr(0, eq);
  try {
    axis.lo = std::stod(text.substr(eq + 1, c1 - eq - 1));
    axis.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const long n = std::stol(text.substr(c2 + 1));
    if (n < 1) {
      throw std::invalid_argument("count");
    }
    axis.count = static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw ScenarioFormatError("axis must look like name=lo:hi:count, got \"" + text + "\"");
  }
  return axis;
}

int run_classify(const std::string& path) {
  const ScenarioFile file = load(path);
  ClassifyOptions opts;
  opts.tol = file.config.tol;
  opts.certificate_samples = file.config.samples;
  const Classification cls = classify(file.scenario, opts);
  std::cout << classification_json(cls);
  return kExitOk;
}

int run_simulate(const std::string& path, double dt, const std::string& out_path) {
  const ScenarioFile file = load(path);
  ClassifyOptions opts;
  opts.tol = file.config.tol;
  opts.attach_certificate = false;
  const Classification cls = classify(file.scenario, opts);
  const Trajectory traj = make_trajectory(file.scenario, cls);

  std::size_t rows = file.config.samples + 1;
  if (dt > 0.0 && file.scenario.horizon > 0.0) {
    rows = static_cast<std::size_t>(std::llround(file.scenario.horizon / dt)) + 1;
    rows = std::max<std::size_t>(rows, 2);
  }
  emit(trajectory_csv(file.scenario.params, traj, rows), out_path);
  return kExitOk;
}

int run_oracle(const std::string& path, std::size_t nodes_flag) {
  const ScenarioFile file = load(path);
  const std::size_t nodes = nodes_flag > 0 ? nodes_flag : file.config.lp_nodes;
  ClassifyOptions opts;
  opts.tol = file.config.tol;
  opts.attach_certificate = false;
  const Classification cls = classify(file.scenario, opts);
  const OracleResult oracle = oracle_solve(file.scenario, nodes);
  if (oracle.status != LPStatus::Optimal) {
    std::cerr << "oracle: discretized problem is "
              << (oracle.status == LPStatus::Infeasible ? "infeasible" : "unbounded") << "\n";
    return kExitSolverFailure;
  }
  const double gap = cls.objective - oracle.objective;
  const double rel = std::abs(cls.objective) > 0.0 ? gap / std::abs(cls.objective) : gap;
  std::cout << "{\n";
  std::cout << "  \"nodes\": " << nodes << ",\n";
  std::cout << "  \"oracle_objective\": " << format_g17(oracle.objective) << ",\n";
  std::cout << "  \"analytic_objective\": " << format_g17(cls.objective) << ",\n";
  std::cout << "  \"gap\": " << format_g17(gap) << ",\n";
  std::cout << "  \"relative_gap\": " << format_g17(rel) << ",\n";
  std::cout << "  \"regime\": \"" << regime_name(cls.regime) << "\"\n";
  std::cout << "}\n";
  return kExitOk;
}

int run_verify(const std::string& path, const std::string& costate_path) {
  const ScenarioFile file = load(path);
  ClassifyOptions opts;
  opts.tol = file.config.tol;
  opts.attach_certificate = false;
  const Classification cls = classify(file.scenario, opts);
  const PmpReport report = check_pmp(file.scenario, cls, file.config.samples);
  const CandidateTable table = compare_candidates(file.scenario);
  const CandidateRow& best = table.rows[table.best];
  const bool agrees = candidate_regime(best.structure) == cls.regime ||
                      std::abs(best.objective - cls.objective) <=
                          1e-8 * (1.0 + std::abs(cls.objective));

  std::cout << "{\n";
  std::cout << "  \"regime\": \"" << regime_name(cls.regime) << "\",\n";
  std::cout << "  \"pass\": " << (report.pass ? "true" : "false") << ",\n";
  std::cout << "  \"max_violation\": " << format_g17(report.max_violation) << ",\n";
  std::cout << "  \"junctions_consistent\": " << (report.junctions_consistent ? "true" : "false")
            << ",\n";
  std::cout << "  \"terminal_consistent\": " << (report.terminal_consistent ? "true" : "false")
            << ",\n";
  std::cout << "  \"complementarity_ok\": " << (report.complementarity_ok ? "true" : "false")
            << ",\n";
  std::cout << "  \"best_candidate\": \"" << candidate_structure_name(best.structure) << "\",\n";
  std::cout << "  \"candidates_agree\": " << (agrees ? "true" : "false") << "\n";
  std::cout << "}\n";
  if (!costate_path.empty()) {
    emit(costate_csv(file.scenario, cls, file.config.samples + 1), costate_path);
  }
  return report.pass && agrees ? kExitOk : kExitCertificateFail;
}

int run_sweep(const std::string& path, const std::string& axis1_text,
              const std::string& axis2_text, const std::string& out_path) {
  const ScenarioFile file = load(path);
  const AxisSpec axis1 = parse_axis(axis1_text);
  const AxisSpec axis2 = parse_axis(axis2_text);
  ClassifyOptions opts;
  opts.tol = file.config.tol;
  opts.attach_certificate = false;
  const auto cells = regime_map(file.scenario, axis1, axis2, opts);
  emit(regime_map_csv(cells), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Growth-regime solver and verifier for the storage/enzyme allocation model"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  std::string costate_path;
  std::string axis1_text;
  std::string axis2_text;
  double dt = 0.0;
  std::size_t nodes = 0;

  CLI::App* cmd_classify = app.add_subcommand("classify", "Print the classification as JSON");
  cmd_classify->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  CLI::App* cmd_simulate = app.add_subcommand("simulate", "Write the optimal trajectory as CSV");
  cmd_simulate->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  cmd_simulate->add_option("--dt", dt, "Sample spacing (default: horizon/samples)");
  cmd_simulate->add_option("--out", out_path, "Output file (default: stdout)");

  CLI::App* cmd_oracle = app.add_subcommand("oracle", "Solve the discretized problem and report the gap");
  cmd_oracle->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  cmd_oracle->add_option("--nodes", nodes, "Discretization intervals (default: config lp_nodes)");

  CLI::App* cmd_verify = app.add_subcommand("verify", "Audit optimality conditions; exit 0 iff they pass");
  cmd_verify->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  cmd_verify->add_option("--costate-csv", costate_path, "Also write adjoint samples as CSV");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "Classify over a 2-D parameter grid, write CSV");
  cmd_sweep->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  cmd_sweep->add_option("--axis1", axis1_text, "First axis, name=lo:hi:count")->required();
  cmd_sweep->add_option("--axis2", axis2_text, "Second axis, name=lo:hi:count")->required();
  cmd_sweep->add_option("--out", out_path, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (cmd_classify->parsed()) {
      return run_classify(scenario_path);
    }
    if (cmd_simulate->parsed()) {
      return run_simulate(scenario_path, dt, out_path);
    }
    if (cmd_oracle->parsed()) {
      return run_oracle(scenario_path, nodes);
    }
    if (cmd_verify->parsed()) {
      return run_verify(scenario_path, costate_path);
    }
    if (cmd_sweep->parsed()) {
      return run_sweep(scenario_path, axis1_text, axis2_text, out_path);
    }
  } catch (const ScenarioFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const InvalidParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SolverFailureError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return kExitInputError;
}
