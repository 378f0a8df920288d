#pragma once

#include "minimax/core.hpp"

#include <functional>

namespace minimax {

// gradient of a single-block objective, written into the second argument
using BlockGradient = std::function<void(const Vec& x, Vec& g)>;

struct AgdConfig {
  double l = 1;  // smoothness
  double m = 1;  // strong convexity
  int T = 0;     // iterations, one gradient each

  double kappa() const { return l / m; }
  double momentum() const;
  void validate() const;
};

Vec agd(const BlockGradient& grad, const Vec& x0, const AgdConfig& cfg);

// ceil(2 sqrt(kappa) ln(24 kappa)), the inner step count used by ABR
int abr_inner_steps(double kappa);

// (kappa + 1)(1 - 1/sqrt(kappa))^T, the guaranteed squared-error ratio
double agd_error_bound(double kappa, int T);

}  // namespace minimax
