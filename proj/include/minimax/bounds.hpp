#pragma once

#include "minimax/core.hpp"

#include <string>
#include <utility>
#include <vector>

namespace minimax {

struct BoundCurve {
  std::string label;
  std::vector<std::pair<double, double>> values;  // (L_xy, complexity)
};

// sqrt(k_x + L_xy^2/(m_x m_y) + k_y) ln(1/eps)
double lower_bound(const SmoothnessParams& p, double epsilon);
// sqrt(k_x + L L_xy/(m_x m_y) + k_y) ln(1/eps); the cubic log factor is left out
double pbr_bound(const SmoothnessParams& p, double epsilon);
// the same with ln^3(R) ln(R/eps), R = L^2/(m_x m_y)
double pbr_bound_with_logs(const SmoothnessParams& p, double epsilon);
// sqrt(L^2/(m_x m_y)) ln^3(1/eps)
double linetal_bound(const SmoothnessParams& p, double epsilon);
// the recursive-splitting bound with C1 = 20, C2 = 8 and ||z0 - z*|| = 1
double rhss_bound(const SmoothnessParams& p, int k, double epsilon);

// Square-root terms alone (no epsilon or log dependence).
double lower_leading(const SmoothnessParams& p);
double pbr_leading(const SmoothnessParams& p);
double linetal_leading(const SmoothnessParams& p);
// the recursive-splitting square root at a fixed depth k
double rhss_leading(const SmoothnessParams& p, int k);
// with depth chosen as a slowly growing function of L^2/(m_x m_y), the extra
// factor is sub-polynomial and the square root matches lower_leading
double rhss_optimal_leading(const SmoothnessParams& p);

// Curves over an L_xy grid (strictly increasing) with the other params fixed.
// Leading-term series are labelled "<name>/leading", log-factor series
// "<name>/logs".
std::vector<BoundCurve> bound_curves(const SmoothnessParams& base, const std::vector<double>& grid,
                                     double epsilon, const std::vector<int>& depths = {1, 2, 3});

}  // namespace minimax
