#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "growthctl/arcs.hpp"
#include "growthctl/model.hpp"
#include "growthctl/regimes.hpp"

namespace growthctl {

struct PmpSample {
  double t;
  double phi_M;
  double phi_E;
  ArcKind active;
  double violation;
};

struct PmpReport {
  std::vector<PmpSample> samples;
  double max_violation = 0.0;
  bool junctions_consistent = true;
  bool terminal_consistent = true;
  bool complementarity_ok = true;
  bool pass = false;
  std::vector<std::string> notes;
};

// Audits a classification against the first-order optimality conditions:
// rebuilds trajectory and adjoint, samples the switching values on a
// Chebyshev grid per arc, and requires the active arc to win pointwise
// (strictly away from junctions), plus terminal adjoint (gamma1, 0, 0) and
// gamma1 * x_N(T) = 0.
PmpReport check_pmp(const Scenario& s, const Classification& cls, std::size_t samples_per_arc = 1000,
                    double tol_scale = 1e-8);

enum class CandidateStructure {
  Stationary,
  Exponential,
  Linear,
  ExpLin,
  LinStat,
  ExpStat,
  ExpLinStat,
};

const char* candidate_structure_name(CandidateStructure structure);

struct CandidateRow {
  CandidateStructure structure;
  std::optional<double> tau1;
  std::optional<double> tau_s;
  double objective;
  bool feasible;
};

struct CandidateTable {
  std::vector<CandidateRow> rows;
  std::size_t best = 0;
};

// Exhaustive structure comparison: optimizes each structure's free switch
// times by golden-section (grid pre-scan guards unimodality) and tabulates
// objectives; the best row is an independent reference for classify.
CandidateTable compare_candidates(const Scenario& s, std::size_t resolution = 100);

Regime candidate_regime(CandidateStructure structure);

struct GapEntry {
  std::size_t nodes;
  double oracle_objective;
  double analytic_objective;
  double gap;
  double relative_gap;
};

struct GapReport {
  std::vector<GapEntry> entries;
  double empirical_order = 0.0;
};

GapReport oracle_gap(const Scenario& s, const Classification& cls,
                     const std::vector<std::size_t>& node_counts);

// Classification shaped as if `regime` had been decided, switch times
// optimized for that structure; used to mutation-test the certificate.
Classification classification_for(const Scenario& s, Regime regime,
                                  const ClassifyOptions& opts = {});

}  // namespace growthctl
