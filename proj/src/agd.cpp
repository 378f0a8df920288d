#include "minimax/agd.hpp"

#include <cmath>

namespace minimax {

double AgdConfig::momentum() const {
  const double s = std::sqrt(kappa());
  return (s - 1) / (s + 1);
}

void AgdConfig::validate() const {
  if (!(m > 0 && m <= l && std::isfinite(l))) throw ConfigError("AGD needs 0 < m <= l");
  if (T < 0) throw ConfigError("AGD iteration count must be >= 0");
}

Vec agd(const BlockGradient& grad, const Vec& x0, const AgdConfig& cfg) {
  cfg.validate();
  const double step = 1.0 / cfg.l;
  const double theta = cfg.momentum();
  Vec x = x0, x_prev = x0, look = x0, g(x0.size());
  for (int t = 0; t < cfg.T; ++t) {
    grad(look, g);
    x_prev.swap(x);
    x = look - step * g;
    look = x + theta * (x - x_prev);
  }
  return x;
}

int abr_inner_steps(double kappa) {
  if (!(kappa >= 1)) throw ConfigError("condition number must be >= 1");
  return static_cast<int>(std::ceil(2 * std::sqrt(kappa) * std::log(24 * kappa)));
}

double agd_error_bound(double kappa, int T) {
  return (kappa + 1) * std::pow(1 - 1 / std::sqrt(kappa), T);
}

}  // namespace minimax
