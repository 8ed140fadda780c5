#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "growthctl/lp_oracle.hpp"

namespace growthctl {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-12;
constexpr double kFeasTol = 1e-8;
constexpr std::size_t kMaxIterations = 1000000;

void validate_problem(const LPProblem& lp) {
  if (lp.objective.size() != lp.num_vars) {
    throw LpStructureError("objective length does not match variable count");
  }
  if (lp.eq_rows.size() != lp.eq_rhs.size() || lp.ub_rows.size() != lp.ub_rhs.size()) {
    throw LpStructureError("row/rhs count mismatch");
  }
  auto check_rows = [&](const std::vector<SparseRow>& rows) {
    for (const SparseRow& row : rows) {
      for (const LPEntry& e : row) {
        if (e.col >= lp.num_vars) {
          throw LpStructureError("column index out of range");
        }
        if (!std::isfinite(e.coef)) {
          throw LpStructureError("non-finite coefficient");
        }
      }
    }
  };
  check_rows(lp.eq_rows);
  check_rows(lp.ub_rows);
  for (double v : lp.eq_rhs) {
    if (!std::isfinite(v)) throw LpStructureError("non-finite rhs");
  }
  for (double v : lp.ub_rhs) {
    if (!std::isfinite(v)) throw LpStructureError("non-finite rhs");
  }
  for (double v : lp.objective) {
    if (!std::isfinite(v)) throw LpStructureError("non-finite objective coefficient");
  }
}

// Dense tableau: m rows over `width` columns plus a rhs column. The cost row
// is kept separately and updated with every pivot.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t width)
      : rows_(rows), width_(width), a_(rows * (width + 1), 0.0), basis_(rows, 0) {}

  double* row(std::size_t r) { return a_.data() + r * (width_ + 1); }
  const double* row(std::size_t r) const { return a_.data() + r * (width_ + 1); }
  double& rhs(std::size_t r) { return row(r)[width_]; }
  double rhs(std::size_t r) const { return row(r)[width_]; }

  std::size_t rows() const { return rows_; }
  std::size_t width() const { return width_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc, std::vector<double>& cost, double& value) {
    double* prow = row(pr);
    const double inv = 1.0 / prow[pc];
    for (std::size_t j = 0; j <= width_; ++j) {
      prow[j] *= inv;
    }
    prow[pc] = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      double* tr = row(r);
      const double factor = tr[pc];
      if (std::abs(factor) <= kDropTol) {
        tr[pc] = 0.0;
        continue;
      }
      for (std::size_t j = 0; j <= width_; ++j) {
        tr[j] -= factor * prow[j];
      }
      tr[pc] = 0.0;
    }
    const double cfactor = cost[pc];
    if (std::abs(cfactor) > 0.0) {
      for (std::size_t j = 0; j < width_; ++j) {
        cost[j] -= cfactor * prow[j];
      }
      value += cfactor * prow[width_];
      cost[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

 private:
  std::size_t rows_;
  std::size_t width_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

struct IterationState {
  std::size_t total = 0;
  std::size_t stalled = 0;
  bool bland = false;
};

// One simplex phase: maximize the given cost row over columns [0, limit).
// Returns false when the phase hit the unbounded ray.
bool run_phase(Tableau& t, std::vector<double>& cost, double& value, std::size_t limit,
               IterationState& iter) {
  while (true) {
    std::size_t entering = limit;
    if (iter.bland) {
      for (std::size_t j = 0; j < limit; ++j) {
        if (cost[j] > kPivotTol) {
          entering = j;
          break;
        }
      }
    } else {
      double best = kPivotTol;
      for (std::size_t j = 0; j < limit; ++j) {
        if (cost[j] > best) {
          best = cost[j];
          entering = j;
        }
      }
    }
    if (entering == limit) {
      return true;
    }

    std::size_t leaving = t.rows();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.row(r)[entering];
      if (a > kPivotTol) {
        const double ratio = t.rhs(r) / a;
        if (ratio < best_ratio - kDropTol ||
            (ratio < best_ratio + kDropTol &&
             (leaving == t.rows() || t.basis()[r] < t.basis()[leaving]))) {
          best_ratio = ratio;
          leaving = r;
        }
      }
    }
    if (leaving == t.rows()) {
      return false;
    }

    const double before = value;
    t.pivot(leaving, entering, cost, value);
    if (++iter.total > kMaxIterations) {
      throw SolverFailureError("simplex iteration cap exceeded");
    }
    if (value <= before + 1e-13 * (1.0 + std::abs(before))) {
      if (++iter.stalled > 50) {
        iter.bland = true;
      }
    } else {
      iter.stalled = 0;
      iter.bland = false;
    }
  }
}

}  // namespace

LPSolution simplex_solve(const LPProblem& lp) {
  validate_problem(lp);

  const std::size_t n = lp.num_vars;
  const std::size_t m_eq = lp.eq_rows.size();
  const std::size_t m_ub = lp.ub_rows.size();
  const std::size_t m = m_eq + m_ub;
  const std::size_t slack_start = n;

  // Rows with negative rhs are flipped, so their slack (if any) points the
  // wrong way and an artificial variable is required; equalities always get
  // one.
  std::vector<int> needs_artificial(m, 0);
  std::vector<int> flip(m, 0);
  for (std::size_t r = 0; r < m_eq; ++r) {
    needs_artificial[r] = 1;
    flip[r] = lp.eq_rhs[r] < 0.0;
  }
  for (std::size_t r = 0; r < m_ub; ++r) {
    flip[m_eq + r] = lp.ub_rhs[r] < 0.0;
    needs_artificial[m_eq + r] = flip[m_eq + r];
  }
  std::size_t n_art = 0;
  for (std::size_t r = 0; r < m; ++r) {
    n_art += static_cast<std::size_t>(needs_artificial[r]);
  }

  const std::size_t art_start = slack_start + m_ub;
  const std::size_t width = art_start + n_art;
  Tableau t(m, width);

  auto fill_row = [&](std::size_t r, const SparseRow& src, double rhs) {
    double* dst = t.row(r);
    const double sgn = flip[r] ? -1.0 : 1.0;
    for (const LPEntry& e : src) {
      dst[e.col] += sgn * e.coef;
    }
    t.rhs(r) = sgn * rhs;
  };
  for (std::size_t r = 0; r < m_eq; ++r) {
    fill_row(r, lp.eq_rows[r], lp.eq_rhs[r]);
  }
  for (std::size_t r = 0; r < m_ub; ++r) {
    fill_row(m_eq + r, lp.ub_rows[r], lp.ub_rhs[r]);
    t.row(m_eq + r)[slack_start + r] = flip[m_eq + r] ? -1.0 : 1.0;
  }
  std::size_t art = art_start;
  for (std::size_t r = 0; r < m; ++r) {
    if (needs_artificial[r]) {
      t.row(r)[art] = 1.0;
      t.basis()[r] = art;
      ++art;
    } else {
      t.basis()[r] = slack_start + (r - m_eq);
    }
  }

  IterationState iter;
  LPSolution sol;

  if (n_art > 0) {
    // Phase 1: maximize -(sum of artificials); canonicalize so the starting
    // basis has zero reduced costs.
    std::vector<double> cost(width, 0.0);
    double value = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (!needs_artificial[r]) continue;
      const double* tr = t.row(r);
      for (std::size_t j = 0; j < width; ++j) {
        cost[j] += tr[j];
      }
      value -= t.rhs(r);
    }
    for (std::size_t j = art_start; j < width; ++j) {
      cost[j] = 0.0;
    }
    if (!run_phase(t, cost, value, art_start, iter)) {
      throw SolverFailureError("phase-1 subproblem unbounded");
    }
    double art_residual = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis()[r] >= art_start) {
        art_residual += std::abs(t.rhs(r));
      }
    }
    if (-value > kFeasTol || art_residual > kFeasTol) {
      double scale = 1.0;
      for (double v : lp.eq_rhs) scale += std::abs(v);
      for (double v : lp.ub_rhs) scale += std::abs(v);
      if (-value > kFeasTol * scale || art_residual > kFeasTol * scale) {
        sol.status = LPStatus::Infeasible;
        sol.iterations = iter.total;
        return sol;
      }
    }
    // Pivot leftover (degenerate) artificials out of the basis when a real
    // column is available in their row.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis()[r] < art_start) continue;
      std::size_t pc = art_start;
      for (std::size_t j = 0; j < art_start; ++j) {
        if (std::abs(t.row(r)[j]) > kPivotTol) {
          pc = j;
          break;
        }
      }
      if (pc < art_start) {
        double dummy = 0.0;
        std::vector<double> nocost(width, 0.0);
        t.pivot(r, pc, nocost, dummy);
      }
    }
  }

  // Phase 2 over real columns only.
  std::vector<double> cost(width, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = lp.objective[j];
  }
  double value = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = t.basis()[r];
    if (b < width && std::abs(cost[b]) > 0.0) {
      const double factor = cost[b];
      const double* tr = t.row(r);
      for (std::size_t j = 0; j < width; ++j) {
        cost[j] -= factor * tr[j];
      }
      value += factor * t.rhs(r);
      cost[b] = 0.0;
    }
  }
  iter.stalled = 0;
  iter.bland = false;
  if (!run_phase(t, cost, value, art_start, iter)) {
    sol.status = LPStatus::Unbounded;
    sol.iterations = iter.total;
    return sol;
  }

  sol.status = LPStatus::Optimal;
  sol.primal.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = t.basis()[r];
    if (b < n) {
      sol.primal[b] = t.rhs(r);
    }
  }
  for (double& v : sol.primal) {
    if (v < 0.0 && v > -kFeasTol) {
      v = 0.0;
    }
  }
  sol.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sol.value += lp.objective[j] * sol.primal[j];
  }
  sol.basis = t.basis();
  sol.iterations = iter.total;
  return sol;
}

}  // namespace growthctl
