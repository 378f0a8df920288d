#include "minimax/bounds.hpp"

#include "minimax/rhss.hpp"

#include <cmath>

namespace minimax {

namespace {

double log_inv(double epsilon) {
  if (!(epsilon > 0 && epsilon < 1)) throw ConfigError("epsilon must lie in (0, 1)");
  return std::log(1 / epsilon);
}

double ratio(const SmoothnessParams& p) { return p.L() * p.L() / (p.m_x * p.m_y); }

}  // namespace

double lower_leading(const SmoothnessParams& p) {
  return std::sqrt(p.kappa_x() + p.L_xy * p.L_xy / (p.m_x * p.m_y) + p.kappa_y());
}

double pbr_leading(const SmoothnessParams& p) {
  return std::sqrt(p.kappa_x() + p.L() * p.L_xy / (p.m_x * p.m_y) + p.kappa_y());
}

double linetal_leading(const SmoothnessParams& p) { return std::sqrt(ratio(p)); }

double rhss_leading(const SmoothnessParams& p, int k) {
  if (k < 1) throw ConfigError("recursion depth must be >= 1");
  const double coupling = p.L_xy / std::max(p.m_x, p.m_y);
  return std::sqrt(p.L_xy * p.L_xy / (p.m_x * p.m_y) +
                   (p.kappa_x() + p.kappa_y()) * (1 + std::pow(coupling, 1.0 / k)));
}

double rhss_optimal_leading(const SmoothnessParams& p) { return lower_leading(p); }

double lower_bound(const SmoothnessParams& p, double epsilon) {
  return lower_leading(p) * log_inv(epsilon);
}

double pbr_bound(const SmoothnessParams& p, double epsilon) {
  return pbr_leading(p) * log_inv(epsilon);
}

double pbr_bound_with_logs(const SmoothnessParams& p, double epsilon) {
  const double r = ratio(p);
  return pbr_leading(p) * std::pow(std::log(r), 3) * (std::log(r) + log_inv(epsilon));
}

double linetal_bound(const SmoothnessParams& p, double epsilon) {
  return linetal_leading(p) * std::pow(log_inv(epsilon), 3);
}

double rhss_bound(const SmoothnessParams& p, int k, double epsilon) {
  log_inv(epsilon);
  return theorem4_bound(p, k, epsilon, 1.0);
}

std::vector<BoundCurve> bound_curves(const SmoothnessParams& base, const std::vector<double>& grid,
                                     double epsilon, const std::vector<int>& depths) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigError("L_xy grid must be strictly increasing");
  std::vector<BoundCurve> out;
  auto add = [&](const std::string& label, auto fn) {
    BoundCurve c{label, {}};
    for (double l : grid) {
      SmoothnessParams p = base;
      p.L_xy = l;
      c.values.emplace_back(l, fn(p));
    }
    out.push_back(std::move(c));
  };
  add("lower/leading", [](const SmoothnessParams& p) { return lower_leading(p); });
  add("rhss-optimal/leading", [](const SmoothnessParams& p) { return rhss_optimal_leading(p); });
  for (int k : depths)
    add("rhss-k" + std::to_string(k) + "/leading",
        [k](const SmoothnessParams& p) { return rhss_leading(p, k); });
  add("pbr/leading", [](const SmoothnessParams& p) { return pbr_leading(p); });
  add("linetal/leading", [](const SmoothnessParams& p) { return linetal_leading(p); });
  add("lower/logs", [epsilon](const SmoothnessParams& p) { return lower_bound(p, epsilon); });
  for (int k : depths)
    add("rhss-k" + std::to_string(k) + "/logs",
        [k, epsilon](const SmoothnessParams& p) { return rhss_bound(p, k, epsilon); });
  add("pbr/logs", [epsilon](const SmoothnessParams& p) { return pbr_bound_with_logs(p, epsilon); });
  add("linetal/logs", [epsilon](const SmoothnessParams& p) { return linetal_bound(p, epsilon); });
  return out;
}

}  // namespace minimax
