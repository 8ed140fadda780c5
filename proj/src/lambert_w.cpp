#include "growthctl/lambert_w.hpp"

#include <cmath>
#include <string>

namespace growthctl {

namespace {

// Expansion about the branch point x = -1/e, where both branches meet at -1.
// p = +sqrt(2(ex+1)) selects Principal, -sqrt the MinusOne branch.
double branch_point_series(double p) {
  const double p2 = p * p;
  return -1.0 + p - p2 / 3.0 + 11.0 * p * p2 / 72.0 - 43.0 * p2 * p2 / 540.0 +
         769.0 * p * p2 * p2 / 17280.0;
}

double initial_guess(WBranch branch, double x) {
  const double q = 2.0 * (std::exp(1.0) * x + 1.0);
  if (branch == WBranch::Principal) {
    if (q < 0.5) {
      return branch_point_series(std::sqrt(std::max(q, 0.0)));
    }
    if (std::abs(x) < 0.2) {
      return x * (1.0 - x + 1.5 * x * x);
    }
    if (x > std::exp(1.0)) {
      const double l1 = std::log(x);
      const double l2 = std::log(l1);
      return l1 - l2 + l2 / l1;
    }
    return std::log1p(x);
  }
  if (q < 0.5) {
    return branch_point_series(-std::sqrt(std::max(q, 0.0)));
  }
  const double l1 = std::log(-x);
  return l1 - std::log(-l1);
}

}  // namespace

double lambert_w(WBranch branch, double x) {
  const double branch_min = -std::exp(-1.0);
  if (!std::isfinite(x)) {
    throw LambertDomainError("lambert_w argument must be finite");
  }
  if (x < branch_min) {
    if (2.0 * (std::exp(1.0) * x + 1.0) > -1e-14) {
      return -1.0;
    }
    throw LambertDomainError("lambert_w argument " + std::to_string(x) + " below -1/e");
  }
  if (branch == WBranch::MinusOne && x >= 0.0) {
    throw LambertDomainError("MinusOne branch requires x in [-1/e, 0)");
  }
  if (x == 0.0) {
    return 0.0;
  }

  double w = initial_guess(branch, x);
  for (int iter = 0; iter < 50; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (f == 0.0) {
      break;
    }
    const double w1 = w + 1.0;
    const double denom = ew * w1 - (w + 2.0) * f / (2.0 * w1);
    if (denom == 0.0 || !std::isfinite(denom)) {
      break;
    }
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(w))) {
      break;
    }
  }
  return w;
}

}  // namespace growthctl
