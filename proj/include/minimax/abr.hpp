#pragma once

#include "minimax/agd.hpp"
#include "minimax/core.hpp"

#include <vector>

namespace minimax {

struct AbrConfig {
  double epsilon = 1e-6;  // target ratio in the summed norm ||dx|| + ||dy||
  SmoothnessParams params;
  long iteration_cap = 1000000;
  // 0 selects abr_inner_steps(kappa) for that block
  int inner_steps_x = 0;
  int inner_steps_y = 0;

  void validate() const;
};

// ceil(log2(4 sqrt(kappa_x + kappa_y) / epsilon)), zero when epsilon >= 1
long abr_rounds(const SmoothnessParams& p, double epsilon);

// L_xy <= sqrt(m_x m_y) / 2
bool abr_coupling_ok(const SmoothnessParams& p);

SolveReport abr_solve(const GradientOracle& oracle, const JointPoint& z0, const AbrConfig& cfg,
                      const Monitor& monitor = {});

// Per-round ratio of ||x - x*|| + c ||y - y*|| with c = 4 sqrt(m_y / m_x).
// Rounds starting below 1e-10 of the initial weighted error report 0: the
// reference point's rounding error dominates there.
std::vector<double> abr_round_contraction(const std::vector<JointPoint>& trace,
                                          const JointPoint& z_star, const SmoothnessParams& p);

}  // namespace minimax
