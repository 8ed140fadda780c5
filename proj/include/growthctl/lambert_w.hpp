#pragma once

#include <stdexcept>

namespace growthctl {

// Real branches of the inverse of w -> w e^w. Principal covers w >= -1
// (x >= -1/e); MinusOne covers w <= -1 (-1/e <= x < 0).
enum class WBranch { Principal, MinusOne };

class LambertDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

double lambert_w(WBranch branch, double x);

}  // namespace growthctl
