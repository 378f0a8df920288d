#include "minimax/prox.hpp"

#include <algorithm>
#include <cmath>

namespace minimax {

double AppaConfig::theta() const {
  const double s = std::sqrt(kappa());
  return (2 * s - 1) / (2 * s + 1);
}

double AppaConfig::tau() const {
  const double k = kappa();
  return 1 / (2 * std::sqrt(k) + 4 * k);
}

void AppaConfig::validate() const {
  if (!(modulus > 0 && beta >= modulus)) throw ConfigError("APPA needs beta >= modulus > 0");
  if (!(M > 1)) throw ConfigError("APPA precision multiplier must exceed 1");
  if (T < 0 || cap < 1) throw ConfigError("APPA iteration counts must be nonnegative");
}

SolveReport appa_minimax(const GradientOracle& oracle, const JointPoint& z0, const AppaConfig& cfg,
                         const ProxSubsolver& subsolver, const AppaStop& stop,
                         const Monitor& monitor) {
  cfg.validate();
  const std::uint64_t start = oracle.evaluations();
  const double theta = cfg.theta(), tau = cfg.tau();
  SolveReport rep;
  JointPoint z = z0;
  Vec center = z0.x;
  monitor.start(rep, z, 0);
  const long limit = cfg.T > 0 ? std::min(cfg.T, cfg.cap) : cfg.cap;
  bool stopped = false;
  while (static_cast<long>(rep.outer_iterations) < limit) {
    JointPoint next = subsolver(prox_augment_x(oracle, cfg.beta, center), z);
    center = next.x + theta * (next.x - z.x) + tau * (next.x - center);
    z = std::move(next);
    ++rep.outer_iterations;
    monitor.step(rep, z, oracle.evaluations() - start);
    if (stop && stop(z)) {
      stopped = true;
      break;
    }
  }
  rep.final_point = z;
  rep.gradient_evals = oracle.evaluations() - start;
  rep.matvec_products = rep.gradient_evals * oracle.matvecs_per_eval();
  const bool budget_done = cfg.T > 0 && static_cast<long>(rep.outer_iterations) == cfg.T;
  rep.termination = stopped || budget_done ? Termination::ToleranceMet : Termination::IterationCap;
  return rep;
}

long theorem2_iteration_bound(const SmoothnessParams& p, double beta, double epsilon) {
  if (!(epsilon > 0)) throw ConfigError("epsilon must be positive");
  const double kappa = beta / p.m_x;
  const double L = p.L();
  const double arg = 28 * kappa * kappa * (L / p.m_y) * std::sqrt(L * L / (p.m_x * p.m_y)) / epsilon;
  return static_cast<long>(std::ceil(8 * std::sqrt(kappa) * std::log(arg)));
}

double appa_precision_floor(const SmoothnessParams& p, double kappa) {
  const double L = p.L();
  return 20 * kappa *
         std::sqrt(2 * kappa + L / p.m_x + p.L_xy * p.L_xy / (p.m_x * p.m_y)) * (1 + L / p.m_y);
}

PbrConstants PbrConstants::from(const SmoothnessParams& p) {
  const double L = p.L();
  return {std::max(p.m_x, p.L_xy), std::max(p.m_y, p.L_xy),
          80 * L * L * L / std::pow(p.m_x * p.m_y, 1.5),
          96 * std::pow(L, 2.5) / (p.m_x * std::pow(p.m_y, 1.5))};
}

namespace {

long safety_cap(double multiplier, long theory) {
  return std::max<long>(100, static_cast<long>(std::ceil(multiplier * theory)));
}

}  // namespace

SolveReport appa_abr(const GradientOracle& g, const JointPoint& z0, double beta1,
                     const SmoothnessParams& params, Mode mode, const PbrOptions& opts) {
  const auto k = PbrConstants::from(params);
  const double L = params.L();
  const bool theory = mode == Mode::Theoretical;
  const std::uint64_t start = g.evaluations();

  // strong convexity 2 beta1 / concavity 2 beta2 and 3L smoothness after both
  // augmentations
  const SmoothnessParams inner{2 * beta1, 2 * k.beta2, 3 * L, params.L_xy, 3 * L};
  if (!abr_coupling_ok(inner)) throw InternalError("inner ABR coupling check failed");

  const double ratio =
      theory ? std::min(params.m_x, params.m_y) / (9 * L * k.M1) : opts.inner_tolerance;
  AbrConfig abr;
  abr.epsilon = theory ? 1 / k.M2 : opts.abr_tolerance;
  abr.params = inner;

  SolveReport rep;
  JointPoint grad = g.eval(z0);
  const double g0 = grad.norm();
  rep.residual_history.push_back({g.evaluations() - start, 1.0});
  const Index dim = z0.n() + z0.m();
  // already stationary up to rounding: nothing to gain from iterating
  if (g0 <= gradient_noise_floor(3 * L, 2 * z0.norm(), g0, dim)) {
    rep.final_point = z0;
    rep.gradient_evals = g.evaluations() - start;
    rep.matvec_products = rep.gradient_evals * g.matvecs_per_eval();
    return rep;
  }

  // the y-side proximal loop is the x-side loop of the flipped problem
  const GradientOracle flipped = flip_minmax(g);
  AppaConfig cfg;
  cfg.beta = k.beta2;
  cfg.modulus = params.m_y;
  cfg.M = theory ? k.M2 : 1 / opts.abr_tolerance;
  cfg.cap = safety_cap(opts.cap_multiplier,
                       theorem2_iteration_bound(params.flipped(), k.beta2, theory ? 1 / k.M1 : ratio));

  auto subsolve = [&](const GradientOracle& aug, const JointPoint& warm) {
    const SolveReport r = abr_solve(flip_minmax(aug), swap_blocks(warm), abr);
    if (r.termination == Termination::PreconditionViolated) throw InternalError(r.note);
    return swap_blocks(r.final_point);
  };
  // g carries the prox term, so its constant part involves the centre as well
  StallGuard stall;
  auto stop = [&](const JointPoint& zf) {
    g.eval(zf.y, zf.x, grad.x, grad.y);
    const double gn = grad.norm();
    rep.residual_history.push_back({g.evaluations() - start, gn / g0});
    return gn <= ratio * g0 || stall.done(gn, gradient_noise_floor(3 * L, zf.norm() + z0.norm(), g0, dim));
  };
  const SolveReport inner_rep = appa_minimax(flipped, swap_blocks(z0), cfg, subsolve, stop);

  rep.outer_iterations = inner_rep.outer_iterations;
  rep.final_point = swap_blocks(inner_rep.final_point);
  rep.termination = inner_rep.termination;
  rep.gradient_evals = g.evaluations() - start;
  rep.matvec_products = rep.gradient_evals * g.matvecs_per_eval();
  return rep;
}

SolveReport pbr_solve(const GradientOracle& oracle, const JointPoint& z0, double epsilon,
                      const SmoothnessParams& params, Mode mode, const PbrOptions& opts,
                      const Monitor& monitor) {
  params.validate();
  z0.validate();
  if (!(epsilon > 0)) throw ConfigError("PBR epsilon must be positive");
  if (z0.n() != oracle.n() || z0.m() != oracle.m()) throw ConfigError("start point dimension mismatch");
  const bool theory = mode == Mode::Theoretical;
  const std::uint64_t start = oracle.evaluations();

  // work on the balanced problem (L_x = L_y); certify in original coordinates
  const Rescaled bal = rescale(oracle, params);
  const SmoothnessParams& p = bal.params;
  const auto k = PbrConstants::from(p);
  const double distortion = std::max(bal.scale * bal.scale, 1 / (bal.scale * bal.scale));

  SolveReport rep;
  rep.final_point = z0;
  JointPoint grad = oracle.eval(z0);
  const double g0 = grad.norm();
  const double target =
      std::min(params.m_x, params.m_y) * epsilon * g0 / (2 * params.L());
  rep.residual_history.push_back({oracle.evaluations() - start, 1.0});
  auto finish = [&]() {
    rep.gradient_evals = oracle.evaluations() - start;
    rep.matvec_products = rep.gradient_evals * oracle.matvecs_per_eval();
    return rep;
  };
  if (g0 <= gradient_noise_floor(params.L(), z0.norm(), g0, z0.n() + z0.m())) {
    monitor.start(rep, z0, 0);
    return finish();
  }
  if (theory) {
    const double kappa1 = k.beta1 / p.m_x;
    const double kappa2 = k.beta2 / p.m_y;
    const SmoothnessParams middle{p.m_y, p.m_x + 2 * k.beta1, 3 * p.L(), p.L_xy, 3 * p.L()};
    if (k.M1 < appa_precision_floor(p, kappa1) || k.M2 < appa_precision_floor(middle, kappa2)) {
      rep.termination = Termination::PreconditionViolated;
      rep.note = "inner precision below the accelerated proximal point requirement";
      return finish();
    }
  }

  const long theory_count =
      theorem2_iteration_bound(p, k.beta1, epsilon / (std::sqrt(2.0) * distortion));
  AppaConfig cfg;
  cfg.beta = k.beta1;
  cfg.modulus = p.m_x;
  cfg.M = theory ? k.M1 : 1 / opts.inner_tolerance;
  cfg.T = theory ? theory_count : 0;
  cfg.cap = safety_cap(opts.cap_multiplier, theory_count);

  bool inner_capped = false;
  auto subsolve = [&](const GradientOracle& aug, const JointPoint& warm) {
    const SolveReport r = appa_abr(aug, warm, k.beta1, p, mode, opts);
    inner_capped = inner_capped || r.termination == Termination::IterationCap;
    return r.final_point;
  };
  StallGuard stall;
  auto stop = [&](const JointPoint& zb) {
    const JointPoint z = bal.to_original(zb);
    oracle.eval(z.x, z.y, grad.x, grad.y);
    const double gn = grad.norm();
    rep.residual_history.push_back({oracle.evaluations() - start, gn / g0});
    return gn <= target || stall.done(gn, gradient_noise_floor(params.L(), z.norm(), g0, z.n() + z.m()));
  };
  Monitor mapped = monitor;
  mapped.transform = [&bal](const JointPoint& z) { return bal.to_original(z); };
  const SolveReport outer = appa_minimax(bal.oracle, bal.from_original(z0), cfg, subsolve, stop, mapped);
  rep.error_history = outer.error_history;
  rep.iterates = outer.iterates;
  rep.outer_iterations = outer.outer_iterations;
  rep.final_point = bal.to_original(outer.final_point);
  rep.termination = outer.termination;
  if (inner_capped && rep.termination == Termination::ToleranceMet && theory)
    rep.note = "a middle-layer solve hit its safety cap";
  return finish();
}

}  // namespace minimax
