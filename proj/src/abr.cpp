#include "minimax/abr.hpp"

#include <cmath>

namespace minimax {

void AbrConfig::validate() const {
  params.validate();
  if (!(epsilon > 0)) throw ConfigError("ABR epsilon must be positive");
  if (iteration_cap < 1) throw ConfigError("ABR iteration cap must be >= 1");
  if (inner_steps_x < 0 || inner_steps_y < 0) throw ConfigError("inner step counts must be >= 0");
}

long abr_rounds(const SmoothnessParams& p, double epsilon) {
  if (epsilon >= 1) return 0;
  return static_cast<long>(std::ceil(std::log2(4 * std::sqrt(p.kappa_x() + p.kappa_y()) / epsilon)));
}

bool abr_coupling_ok(const SmoothnessParams& p) {
  return p.L_xy <= 0.5 * std::sqrt(p.m_x * p.m_y);
}

SolveReport abr_solve(const GradientOracle& oracle, const JointPoint& z0, const AbrConfig& cfg,
                      const Monitor& monitor) {
  cfg.validate();
  z0.validate();
  const auto& p = cfg.params;
  SolveReport rep;
  rep.final_point = z0;
  const std::uint64_t start = oracle.evaluations();
  if (!abr_coupling_ok(p)) {
    rep.termination = Termination::PreconditionViolated;
    rep.note = "coupling exceeds sqrt(m_x m_y)/2";
    return rep;
  }
  const long T = abr_rounds(p, cfg.epsilon);
  const long rounds = std::min(T, cfg.iteration_cap);
  const AgdConfig xcfg{p.L_x, p.m_x, cfg.inner_steps_x ? cfg.inner_steps_x : abr_inner_steps(p.kappa_x())};
  const AgdConfig ycfg{p.L_y, p.m_y, cfg.inner_steps_y ? cfg.inner_steps_y : abr_inner_steps(p.kappa_y())};

  JointPoint z = z0;
  Vec scratch_x(z0.n()), scratch_y(z0.m());
  monitor.start(rep, z, 0);
  for (long t = 0; t < rounds; ++t) {
    const Vec y_fixed = z.y;
    z.x = agd([&](const Vec& x, Vec& g) { oracle.eval(x, y_fixed, g, scratch_y); }, z.x, xcfg);
    const Vec x_fixed = z.x;
    z.y = agd(
        [&](const Vec& y, Vec& g) {
          oracle.eval(x_fixed, y, scratch_x, g);
          g = -g;  // ascent on f is descent on -f
        },
        z.y, ycfg);
    ++rep.outer_iterations;
    monitor.step(rep, z, oracle.evaluations() - start);
  }
  rep.final_point = z;
  rep.gradient_evals = oracle.evaluations() - start;
  rep.matvec_products = rep.gradient_evals * oracle.matvecs_per_eval();
  rep.termination = rounds < T ? Termination::IterationCap : Termination::ToleranceMet;
  return rep;
}

std::vector<double> abr_round_contraction(const std::vector<JointPoint>& trace,
                                          const JointPoint& z_star, const SmoothnessParams& p) {
  const double c = 4 * std::sqrt(p.m_y / p.m_x);
  auto weighted = [&](const JointPoint& z) {
    return (z.x - z_star.x).norm() + c * (z.y - z_star.y).norm();
  };
  std::vector<double> ratios;
  if (trace.empty()) return ratios;
  // below this the reference's own rounding dominates the ratio
  const double floor = 1e-10 * weighted(trace.front());
  for (std::size_t t = 1; t < trace.size(); ++t) {
    const double before = weighted(trace[t - 1]);
    ratios.push_back(before <= floor ? 0.0 : weighted(trace[t]) / before);
  }
  return ratios;
}

}  // namespace minimax
