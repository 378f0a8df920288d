#pragma once

#include "minimax/core.hpp"

namespace minimax {

enum class Baseline { GDA, ExtraGradient };

struct BaselineConfig {
  Baseline algorithm = Baseline::ExtraGradient;
  double step = 0;  // 0 selects the default for the algorithm
  // stop once ||F(z)|| <= tolerance * ||F(z0)||; 0 disables
  double tolerance = 0;
  long max_iterations = 1000000;
  double divergence_factor = 1e6;

  void validate() const;
};

// min{m_x, m_y} / (2 L^2)
double default_gda_step(const SmoothnessParams& p);
// 1 / (2 L)
double default_eg_step(const SmoothnessParams& p);
// relative gradient tolerance certifying ||z - z*|| <= epsilon ||z0 - z*||
double certified_gradient_ratio(const SmoothnessParams& p, double epsilon);

SolveReport gda_solve(const GradientOracle& oracle, const JointPoint& z0, const BaselineConfig& cfg,
                      const SmoothnessParams& params, const Monitor& monitor = {});
SolveReport eg_solve(const GradientOracle& oracle, const JointPoint& z0, const BaselineConfig& cfg,
                     const SmoothnessParams& params, const Monitor& monitor = {});

// High-accuracy saddle for a general oracle: ExtraGradient until the gradient
// norm drops to `gradient_tolerance` (absolute).
JointPoint reference_saddle(const GradientOracle& oracle, const SmoothnessParams& params,
                            const JointPoint& z0, double gradient_tolerance = 1e-12);

}  // namespace minimax
