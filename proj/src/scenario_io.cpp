#include "growthctl/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "growthctl/costate.hpp"
#include "json.hpp"

namespace growthctl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& message) {
  throw ScenarioFormatError(origin + ": " + message);
}

double require_number(const json& node, const std::string& origin, const std::string& path) {
  if (!node.is_number()) {
    fail(origin, path + " must be a number");
  }
  const double v = node.get<double>();
  if (!std::isfinite(v)) {
    fail(origin, path + " must be finite");
  }
  return v;
}

double require_positive(const json& node, const std::string& origin, const std::string& path) {
  const double v = require_number(node, origin, path);
  if (!(v > 0.0)) {
    fail(origin, path + " must be positive");
  }
  return v;
}

void reject_unknown_keys(const json& obj, const std::string& origin, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(origin, path + ": unknown key \"" + item.key() + "\"");
    }
  }
}

}  // namespace

ScenarioFile parse_scenario_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, e.what());
  }
  if (!doc.is_object()) {
    fail(origin, "top level must be an object");
  }
  reject_unknown_keys(doc, origin, "/", {"params", "raw", "x0", "T", "config"});

  const bool has_params = doc.contains("params");
  const bool has_raw = doc.contains("raw");
  if (has_params == has_raw) {
    fail(origin, "exactly one of \"params\" or \"raw\" is required");
  }

  ScenarioFile out;
  if (has_params) {
    const json& p = doc["params"];
    if (!p.is_object()) {
      fail(origin, "/params must be an object");
    }
    reject_unknown_keys(p, origin, "/params", {"k_M", "k_E", "a_M", "a_E", "b_M", "b_E"});
    for (const char* key : {"k_M", "k_E", "a_M", "a_E", "b_M", "b_E"}) {
      if (!p.contains(key)) {
        fail(origin, std::string("/params/") + key + " is required");
      }
    }
    out.scenario.params.k_M = require_positive(p["k_M"], origin, "/params/k_M");
    out.scenario.params.k_E = require_positive(p["k_E"], origin, "/params/k_E");
    out.scenario.params.a_M = require_positive(p["a_M"], origin, "/params/a_M");
    out.scenario.params.a_E = require_positive(p["a_E"], origin, "/params/a_E");
    out.scenario.params.b_M = require_positive(p["b_M"], origin, "/params/b_M");
    out.scenario.params.b_E = require_positive(p["b_E"], origin, "/params/b_E");
  } else {
    const json& r = doc["raw"];
    if (!r.is_object()) {
      fail(origin, "/raw must be an object");
    }
    reject_unknown_keys(r, origin, "/raw", {"kA", "kM", "kE", "aM", "aE", "bM", "bE"});
    for (const char* key : {"kA", "kM", "kE", "aM", "aE", "bM", "bE"}) {
      if (!r.contains(key)) {
        fail(origin, std::string("/raw/") + key + " is required");
      }
    }
    out.from_raw = true;
    out.raw.kA = require_positive(r["kA"], origin, "/raw/kA");
    out.raw.kM = require_positive(r["kM"], origin, "/raw/kM");
    out.raw.kE = require_positive(r["kE"], origin, "/raw/kE");
    out.raw.aM = require_number(r["aM"], origin, "/raw/aM");
    out.raw.aE = require_number(r["aE"], origin, "/raw/aE");
    out.raw.bM = require_positive(r["bM"], origin, "/raw/bM");
    out.raw.bE = require_positive(r["bE"], origin, "/raw/bE");
    try {
      out.scenario.params = reduce_params(out.raw);
    } catch (const InvalidParameterError& e) {
      fail(origin, std::string("/raw: ") + e.what());
    }
  }

  if (!doc.contains("x0")) {
    fail(origin, "/x0 is required");
  }
  const json& x0 = doc["x0"];
  if (!x0.is_array() || x0.size() != 3) {
    fail(origin, "/x0 must be an array of three numbers [x_N, x_M, x_E]");
  }
  double comps[3];
  for (std::size_t i = 0; i < 3; ++i) {
    comps[i] = require_number(x0[i], origin, "/x0/" + std::to_string(i));
    if (comps[i] < 0.0) {
      fail(origin, "/x0/" + std::to_string(i) + " must be nonnegative");
    }
  }
  out.scenario.x0 = State{comps[0], comps[1], comps[2]};

  if (!doc.contains("T")) {
    fail(origin, "/T is required");
  }
  out.scenario.horizon = require_number(doc["T"], origin, "/T");
  if (out.scenario.horizon < 0.0) {
    fail(origin, "/T must be nonnegative");
  }

  if (doc.contains("config")) {
    const json& c = doc["config"];
    if (!c.is_object()) {
      fail(origin, "/config must be an object");
    }
    reject_unknown_keys(c, origin, "/config", {"tol", "lp_nodes", "samples"});
    if (c.contains("tol")) {
      out.config.tol = require_positive(c["tol"], origin, "/config/tol");
    }
    if (c.contains("lp_nodes")) {
      if (!c["lp_nodes"].is_number_unsigned() || c["lp_nodes"].get<std::size_t>() < 1) {
        fail(origin, "/config/lp_nodes must be a positive integer");
      }
      out.config.lp_nodes = c["lp_nodes"].get<std::size_t>();
    }
    if (c.contains("samples")) {
      if (!c["samples"].is_number_unsigned() || c["samples"].get<std::size_t>() < 1) {
        fail(origin, "/config/samples must be a positive integer");
      }
      out.config.samples = c["samples"].get<std::size_t>();
    }
  }
  return out;
}

ScenarioFile parse_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScenarioFormatError(path + ": cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string serialize_scenario(const ScenarioFile& file) {
  std::string out = "{\n";
  if (file.from_raw) {
    out += "  \"raw\": {";
    out += "\"kA\": " + format_g17(file.raw.kA);
    out += ", \"kM\": " + format_g17(file.raw.kM);
    out += ", \"kE\": " + format_g17(file.raw.kE);
    out += ", \"aM\": " + format_g17(file.raw.aM);
    out += ", \"aE\": " + format_g17(file.raw.aE);
    out += ", \"bM\": " + format_g17(file.raw.bM);
    out += ", \"bE\": " + format_g17(file.raw.bE);
    out += "},\n";
  } else {
    const ModelParams& p = file.scenario.params;
    out += "  \"params\": {";
    out += "\"k_M\": " + format_g17(p.k_M);
    out += ", \"k_E\": " + format_g17(p.k_E);
    out += ", \"a_M\": " + format_g17(p.a_M);
    out += ", \"a_E\": " + format_g17(p.a_E);
    out += ", \"b_M\": " + format_g17(p.b_M);
    out += ", \"b_E\": " + format_g17(p.b_E);
    out += "},\n";
  }
  out += "  \"x0\": [" + format_g17(file.scenario.x0.nutrient) + ", " +
         format_g17(file.scenario.x0.storage) + ", " + format_g17(file.scenario.x0.enzyme) +
         "],\n";
  out += "  \"T\": " + format_g17(file.scenario.horizon) + ",\n";
  out += "  \"config\": {\"tol\": " + format_g17(file.config.tol) +
         ", \"lp_nodes\": " + std::to_string(file.config.lp_nodes) +
         ", \"samples\": " + std::to_string(file.config.samples) + "}\n";
  out += "}\n";
  return out;
}

std::string classification_json(const Classification& cls) {
  std::string out = "{\n";
  out += "  \"regime\": \"" + std::string(regime_name(cls.regime)) + "\",\n";
  out += "  \"method\": \"" + std::string(classify_method_name(cls.method)) + "\",\n";
  out += "  \"objective\": " + format_g17(cls.objective) + ",\n";
  out += "  \"gamma1\": " + format_g17(cls.gamma1.gamma1) + ",\n";
  if (cls.tau1.has_value()) {
    out += "  \"tau1\": " + format_g17(*cls.tau1) + ",\n";
  }
  if (cls.tau_s.has_value()) {
    out += "  \"tau_s\": " + format_g17(*cls.tau_s) + ",\n";
  }
  out += std::string("  \"boundary\": ") + (cls.boundary ? "true" : "false") + ",\n";
  out += "  \"margins\": {";
  bool first = true;
  for (const auto& [name, value] : cls.margins) {
    if (!first) {
      out += ", ";
    }
    first = false;
    out += "\"" + name + "\": " + format_g17(value);
  }
  out += "}";
  if (cls.certificate.has_value()) {
    out += ",\n  \"certificate\": {\"pass\": ";
    out += cls.certificate->pass ? "true" : "false";
    out += ", \"max_violation\": " + format_g17(cls.certificate->max_violation);
    out += ", \"samples\": " + std::to_string(cls.certificate->samples) + "}";
  }
  out += "\n}\n";
  return out;
}

std::string trajectory_csv(const ModelParams& p, const Trajectory& traj, std::size_t rows) {
  std::string out = "t,x_N,x_M,x_E,u_M,u_E,biomass\n";
  for (const TrajectorySample& s : sample_trajectory(p, traj, rows)) {
    out += format_g17(s.t) + "," + format_g17(s.x.nutrient) + "," + format_g17(s.x.storage) +
           "," + format_g17(s.x.enzyme) + "," + format_g17(s.u.u_M) + "," +
           format_g17(s.u.u_E) + "," + format_g17(biomass(p, s.x)) + "\n";
  }
  return out;
}

std::string costate_csv(const Scenario& s, const Classification& cls, std::size_t rows) {
  std::string out = "t,lam1,lam2,lam3,phi_M,phi_E,active_arc\n";
  if (rows == 0) {
    return out;
  }
  const Trajectory traj = make_trajectory(s, cls);
  const PiecewiseCostate pc = backward_costate(s.params, traj, cls.gamma1);
  for (std::size_t i = 0; i < rows; ++i) {
    const double t = rows == 1 ? 0.0
                               : traj.horizon * static_cast<double>(i) /
                                     static_cast<double>(rows - 1);
    const Costate lam = pc.at(s.params, t);
    const SwitchReport sw = switching_values(s.params, lam);
    const Control u = control_at(s.params, traj, t);
    ArcKind active = ArcKind::Stationary;
    if (u.u_E > 0.0) {
      active = ArcKind::Exponential;
    } else if (u.u_M > 0.0) {
      active = ArcKind::Linear;
    }
    out += format_g17(t) + "," + format_g17(lam.lam1) + "," + format_g17(lam.lam2) + "," +
           format_g17(lam.lam3) + "," + format_g17(sw.phi_M) + "," + format_g17(sw.phi_E) +
           "," + arc_kind_name(active) + "\n";
  }
  return out;
}

std::string regime_map_csv(const std::vector<RegimeMapCell>& cells) {
  std::string out = "param1,param2,regime,tau1,tau_s,objective\n";
  for (const RegimeMapCell& cell : cells) {
    out += format_g17(cell.value1) + "," + format_g17(cell.value2) + "," +
           regime_name(cell.cls.regime) + ",";
    if (cell.cls.tau1.has_value()) {
      out += format_g17(*cell.cls.tau1);
    }
    out += ",";
    if (cell.cls.tau_s.has_value()) {
      out += format_g17(*cell.cls.tau_s);
    }
    out += "," + format_g17(cell.cls.objective) + "\n";
  }
  return out;
}

}  // namespace growthctl
