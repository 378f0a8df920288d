#include "minimax/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace minimax {

void BaselineConfig::validate() const {
  if (!(step >= 0)) throw ConfigError("baseline step must be positive");
  if (!(tolerance >= 0 && tolerance < 1)) throw ConfigError("baseline tolerance must lie in [0, 1)");
  if (max_iterations < 1) throw ConfigError("baseline iteration cap must be >= 1");
  if (!(divergence_factor > 1)) throw ConfigError("divergence factor must exceed 1");
}

double default_gda_step(const SmoothnessParams& p) {
  const double L = p.L();
  return std::min(p.m_x, p.m_y) / (2 * L * L);
}

double default_eg_step(const SmoothnessParams& p) { return 1 / (2 * p.L()); }

double certified_gradient_ratio(const SmoothnessParams& p, double epsilon) {
  return std::min(p.m_x, p.m_y) * epsilon / (2 * p.L());
}

namespace {

// F = (grad_x f, -grad_y f)
void field(const GradientOracle& oracle, const JointPoint& z, JointPoint& F) {
  oracle.eval(z, F);
  F.y = -F.y;
}

SolveReport run(const GradientOracle& oracle, const JointPoint& z0, const BaselineConfig& cfg,
                const SmoothnessParams& params, const Monitor& monitor, bool extra) {
  cfg.validate();
  params.validate();
  z0.validate();
  const double step = cfg.step > 0 ? cfg.step : extra ? default_eg_step(params) : default_gda_step(params);
  const std::uint64_t start = oracle.evaluations();
  SolveReport rep;
  JointPoint z = z0, F = z0, Fbar = z0, bar = z0;
  field(oracle, z, F);
  const double f0 = F.norm();
  rep.residual_history.push_back({oracle.evaluations() - start, 1.0});
  monitor.start(rep, z, 0);
  rep.termination = Termination::IterationCap;
  if (f0 == 0) {
    rep.termination = Termination::ToleranceMet;
  } else {
    while (static_cast<long>(rep.outer_iterations) < cfg.max_iterations) {
      if (extra) {
        bar.x = z.x - step * F.x;
        bar.y = z.y - step * F.y;
        field(oracle, bar, Fbar);
        z.x -= step * Fbar.x;
        z.y -= step * Fbar.y;
      } else {
        z.x -= step * F.x;
        z.y -= step * F.y;
      }
      ++rep.outer_iterations;
      field(oracle, z, F);
      const double ratio = F.norm() / f0;
      rep.residual_history.push_back({oracle.evaluations() - start, ratio});
      monitor.step(rep, z, oracle.evaluations() - start);
      if (!std::isfinite(ratio) || ratio > cfg.divergence_factor) {
        rep.termination = Termination::Diverged;
        break;
      }
      if (ratio <= cfg.tolerance) {
        rep.termination = Termination::ToleranceMet;
        break;
      }
    }
  }
  rep.final_point = z;
  rep.gradient_evals = oracle.evaluations() - start;
  rep.matvec_products = rep.gradient_evals * oracle.matvecs_per_eval();
  return rep;
}

}  // namespace

SolveReport gda_solve(const GradientOracle& oracle, const JointPoint& z0, const BaselineConfig& cfg,
                      const SmoothnessParams& params, const Monitor& monitor) {
  return run(oracle, z0, cfg, params, monitor, false);
}

SolveReport eg_solve(const GradientOracle& oracle, const JointPoint& z0, const BaselineConfig& cfg,
                     const SmoothnessParams& params, const Monitor& monitor) {
  return run(oracle, z0, cfg, params, monitor, true);
}

JointPoint reference_saddle(const GradientOracle& oracle, const SmoothnessParams& params,
                            const JointPoint& z0, double gradient_tolerance) {
  const double f0 = oracle.eval(z0).norm();
  if (f0 <= gradient_tolerance) return z0;
  BaselineConfig cfg;
  cfg.algorithm = Baseline::ExtraGradient;
  cfg.tolerance = gradient_tolerance / f0;
  cfg.max_iterations = 50000000;
  const SolveReport r = eg_solve(oracle, z0, cfg, params);
  if (r.termination != Termination::ToleranceMet)
    throw InternalError("reference ExtraGradient run did not reach its tolerance");
  return r.final_point;
}

}  // namespace minimax
