#include "minimax/rhss.hpp"

#include "minimax/abr.hpp"

#include <algorithm>
#include <cmath>

namespace minimax {

CgResult cg(const LinearMap& apply, const Vec& b, const Vec& x0, double epsilon,
            long max_iterations) {
  if (b.size() != x0.size()) throw ConfigError("CG dimension mismatch");
  CgResult res;
  res.x = x0;
  Vec r(b.size()), Ap(b.size());
  apply(x0, Ap);
  ++res.products;
  r = b - Ap;
  double rs = r.squaredNorm();
  const double stop = epsilon * std::sqrt(rs);
  if (rs == 0) {
    res.converged = true;
    return res;
  }
  Vec p = r;
  while (res.iterations < max_iterations) {
    apply(p, Ap);
    ++res.products;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0)) throw InternalError("CG breakdown: operator is not positive definite");
    const double a = rs / pAp;
    res.x += a * p;
    r -= a * Ap;
    ++res.iterations;
    const double rs_next = r.squaredNorm();
    if (std::sqrt(rs_next) <= stop) {
      res.converged = true;
      break;
    }
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }
  return res;
}

long cg_iteration_bound(double kappa, double epsilon) {
  if (!(kappa >= 1) || !(epsilon > 0)) throw ConfigError("CG bound needs kappa >= 1, epsilon > 0");
  const double s = std::sqrt(kappa);
  return static_cast<long>(std::ceil(s * std::log(2 * s / epsilon)));
}

HssScalars hss_scalars(const SmoothnessParams& p, int k) {
  if (k < 1) throw ConfigError("recursion depth must be >= 1");
  if (!(p.L_xy > 0)) throw ConfigError("splitting needs L_xy > 0");
  const double kd = k;
  return {p.m_x / p.m_y, std::pow(p.L_xy, -2 / kd) * std::pow(p.m_y, -(kd - 2) / kd),
          std::pow(p.L_xy, 1 / kd) * std::pow(p.m_y, 1 - 1 / kd)};
}

HssOperators make_hss_operators(const QuadraticSaddle& q, const SmoothnessParams& p, int k) {
  const auto sc = hss_scalars(p, k);
  const Index n = q.n(), m = q.m();
  HssOperators ops;
  ops.alpha = sc.alpha;
  ops.beta = sc.beta;
  ops.eta = sc.eta;
  ops.k = k;
  ops.G = Mat::Zero(n + m, n + m);
  ops.G.topLeftCorner(n, n) = q.A;
  ops.G.bottomRightCorner(m, m) = q.C;
  ops.S = Mat::Zero(n + m, n + m);
  ops.S.topRightCorner(n, m) = q.B;
  ops.S.bottomLeftCorner(m, n) = -q.B.transpose();
  ops.P = Mat::Zero(n + m, n + m);
  ops.P.topLeftCorner(n, n) = sc.alpha * Mat::Identity(n, n) + sc.beta * q.A;
  ops.P.bottomRightCorner(m, m) = Mat::Identity(m, m) + sc.beta * q.C;
  return ops;
}

Vec hss_exact_step(const HssOperators& ops, const Vec& z, const Vec& b) {
  const Mat shifted = ops.eta * ops.P;
  const Vec half = (shifted + ops.G).partialPivLu().solve((shifted - ops.S) * z + b);
  return (shifted + ops.S).partialPivLu().solve((shifted - ops.G) * half + b);
}

Mat hss_iteration_matrix(const HssOperators& ops) {
  const Mat shifted = ops.eta * ops.P;
  const Mat right = (shifted + ops.G).partialPivLu().solve(shifted - ops.S);
  return (shifted + ops.S).partialPivLu().solve((shifted - ops.G) * right);
}

double hss_spectral_bound(const HssOperators& ops) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(ops.G, ops.P, Eigen::EigenvaluesOnly);
  double worst = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()[i];
    worst = std::max(worst, std::abs((l - ops.eta) / (l + ops.eta)));
  }
  return worst;
}

namespace {
Mat weight_matrix(const HssOperators& ops) {
  Eigen::SelfAdjointEigenSolver<Mat> es(ops.P);
  return es.operatorInverseSqrt() * (ops.eta * ops.P + ops.S);
}
}  // namespace

double hss_weighted_error(const HssOperators& ops, const Vec& e) {
  return (weight_matrix(ops) * e).norm();
}

double hss_weighted_norm(const HssOperators& ops) {
  const Mat W = weight_matrix(ops);
  const Mat conj = W * hss_iteration_matrix(ops) * W.inverse();
  return Eigen::JacobiSVD<Mat>(conj).singularValues()[0];
}

double hss_spectral_radius(const HssOperators& ops) {
  return hss_iteration_matrix(ops).eigenvalues().cwiseAbs().maxCoeff();
}

double contraction_factor(const SmoothnessParams& p, int k) {
  if (k < 1) throw ConfigError("recursion depth must be >= 1");
  if (!(p.m_y < p.L_xy)) throw ConfigError("contraction factor needs m_y < L_xy");
  return 1 - 0.5 * std::pow(p.m_y / p.L_xy, 1.0 / k);
}

int optimal_k(const SmoothnessParams& p, double C1) {
  const double R = p.L() * p.L() / (p.m_x * p.m_y);
  const double lnR = std::log(R);
  if (!(lnR > 1)) throw ConfigError("optimal depth needs L^2/(m_x m_y) > e");
  if (!(C1 > 1)) throw ConfigError("C1 must exceed 1");
  const double k = std::sqrt(lnR / (2 * std::log(C1 * lnR)));
  return std::max(1, static_cast<int>(std::lround(k)));
}

double theorem4_bound(const SmoothnessParams& p, int k, double epsilon, double z0_error, double C1,
                      double C2) {
  if (k < 1) throw ConfigError("recursion depth must be >= 1");
  if (!(epsilon > 0 && z0_error > epsilon)) throw ConfigError("need z0_error > epsilon > 0");
  const double mm = p.m_x * p.m_y;
  const double L = p.L();
  const double coupling = p.L_xy / std::max(p.m_x, p.m_y);
  const double root = std::sqrt(p.L_xy * p.L_xy / mm +
                                (p.kappa_x() + p.kappa_y()) * (1 + std::pow(coupling, 1.0 / k)));
  return root * std::pow(C1 * std::log(C2 * L * L / mm), k + 3) * std::log(z0_error / epsilon);
}

RhssConstants RhssConstants::from(const SmoothnessParams& p, double epsilon) {
  const double L = p.L();
  return {192 * std::pow(L, 5) / (p.m_x * p.m_x * std::pow(p.m_y, 3)), 16 * p.L_xy / p.m_y,
          p.m_x * epsilon / (p.L_xy + p.L_x)};
}

RhssSubproblem rhss_subproblem(const QuadraticSaddle& q, const SmoothnessParams& p, int k,
                               const Vec& w) {
  const auto sc = hss_scalars(p, k);
  const Index n = q.n(), m = q.m();
  if (w.size() != n + m) throw ConfigError("subproblem right-hand side has wrong length");
  RhssSubproblem sub;
  sub.q.A = sc.eta * (sc.alpha * Mat::Identity(n, n) + sc.beta * q.A);
  sub.q.C = sc.eta * (Mat::Identity(m, m) + sc.beta * q.C);
  sub.q.B = q.B;
  sub.q.u = -w.head(n);
  sub.q.v = w.tail(m);
  // alpha <= 1 and L_x = L_y, so both diagonal blocks sit in
  // [eta alpha, eta (1 + beta L_x)]
  const double top = sc.eta * (1 + sc.beta * std::max(p.L_x, p.L_y));
  sub.params = {sc.eta * sc.alpha, sc.eta, top, p.L_xy, top};
  return sub;
}

void RhssConfig::validate() const {
  if (k < 1) throw ConfigError("recursion depth k must be >= 1");
  if (!(epsilon > 0 && epsilon < 1)) throw ConfigError("RHSS epsilon must lie in (0, 1)");
  if (iteration_cap < 0) throw ConfigError("iteration cap must be >= 0");
  if (!(cg_tolerance > 0 && cg_tolerance < 1)) throw ConfigError("CG tolerance must lie in (0, 1)");
  if (!(inner_tolerance >= 0 && inner_tolerance < 1))
    throw ConfigError("inner tolerance must lie in [0, 1)");
}

namespace {

void finish_counts(SolveReport& rep, std::uint64_t matvecs, std::uint64_t evals) {
  rep.matvec_products = matvecs;
  rep.gradient_evals = evals;
}

// Splitting iteration on a problem already satisfying L_x = L_y, m_x <= m_y and
// m_y < L_xy.
SolveReport split_solve(const QuadraticSaddle& q, const SmoothnessParams& p, const JointPoint& z0,
                        int k, double epsilon, const RhssConfig& cfg, const Monitor& monitor) {
  const bool theory = cfg.mode == Mode::Theoretical;
  if (k == 1) {
    const GradientOracle oracle = quadratic_oracle(q);
    SolveReport r = pbr_solve(oracle, z0, epsilon, p, cfg.mode, cfg.pbr, monitor);
    return r;
  }
  if (theory) epsilon = std::max(epsilon, 1e-12);
  const auto sc = hss_scalars(p, k);
  const auto c = RhssConstants::from(p, epsilon);
  const double cg_tol = theory ? 1 / c.M1 : cfg.cg_tolerance;
  const double sub_tol = theory ? 1 / c.M2
                         : cfg.inner_tolerance > 0 ? cfg.inner_tolerance
                                                   : std::pow(p.m_y / p.L_xy, 1.0 / k) / 16;
  const double rate = 0.25 * std::pow(p.m_y / p.L_xy, 1.0 / k);
  const long theory_count = static_cast<long>(std::ceil(std::log(1 / c.eps_tilde) / rate));
  const long cap = cfg.iteration_cap > 0 ? cfg.iteration_cap : 100 * std::max(1L, theory_count);

  const Index n = q.n(), m = q.m();
  std::uint64_t matvecs = 0, evals = 0;
  const Vec b = q.coupled_rhs();
  auto residual = [&](const JointPoint& z) {
    matvecs += 4;
    Vec r(n + m);
    r.head(n) = q.A * z.x + q.B * z.y + q.u;
    r.tail(m) = -q.B.transpose() * z.x + q.C * z.y - q.v;
    return r.norm();
  };
  // eta P + G, block diagonal and SPD
  const double dx = sc.eta * sc.alpha, dy = sc.eta, gain = sc.eta * sc.beta + 1;
  LinearMap shifted = [&](const Vec& in, Vec& out) {
    out.resize(n + m);
    out.head(n) = dx * in.head(n) + gain * (q.A * in.head(n));
    out.tail(m) = dy * in.tail(m) + gain * (q.C * in.tail(m));
  };

  SolveReport rep;
  JointPoint z = z0;
  monitor.start(rep, z, 0);
  const double r0 = residual(z);
  rep.residual_history.push_back({matvecs, r0 > 0 ? 1.0 : 0.0});
  if (r0 == 0) {
    rep.final_point = z;
    finish_counts(rep, matvecs, evals);
    return rep;
  }
  bool met = false;
  while (static_cast<long>(rep.outer_iterations) < cap) {
    // r = (eta P - S) z + b
    Vec r(n + m);
    r.head(n) = dx * z.x + (sc.eta * sc.beta) * (q.A * z.x) - q.B * z.y - q.u;
    r.tail(m) = dy * z.y + (sc.eta * sc.beta) * (q.C * z.y) + q.B.transpose() * z.x + q.v;
    matvecs += 4;
    const CgResult half = cg(shifted, r, z.stacked(), cg_tol, 100 * cg_iteration_bound(
        (gain * std::max(p.L_x, p.L_y) + dy) / dx, cg_tol));
    matvecs += 2 * half.products;
    // w = (eta P - G) z_half + b
    const auto xh = half.x.head(n), yh = half.x.tail(m);
    Vec w(n + m);
    w.head(n) = dx * xh + (sc.eta * sc.beta - 1) * (q.A * xh) - q.u;
    w.tail(m) = dy * yh + (sc.eta * sc.beta - 1) * (q.C * yh) + q.v;
    matvecs += 2;

    const RhssSubproblem sub = rhss_subproblem(q, p, k, w);
    const SolveReport inner = split_solve(sub.q, sub.params, z, k - 1, sub_tol, cfg, Monitor{});
    matvecs += inner.matvec_products;
    evals += inner.gradient_evals;
    z = inner.final_point;
    ++rep.outer_iterations;
    const double res = residual(z);
    rep.residual_history.push_back({matvecs, res / r0});
    monitor.step(rep, z, matvecs);
    if (res <= c.eps_tilde * r0) {
      met = true;
      break;
    }
  }
  rep.final_point = z;
  rep.termination = met ? Termination::ToleranceMet : Termination::IterationCap;
  finish_counts(rep, matvecs, evals);
  return rep;
}

}  // namespace

SolveReport rhss_solve(const QuadraticSaddle& q, const SmoothnessParams& params,
                       const JointPoint& z0, const RhssConfig& cfg, const Monitor& monitor) {
  params.validate();
  cfg.validate();
  q.check_shapes();
  z0.validate();
  if (z0.n() != q.n() || z0.m() != q.m()) throw ConfigError("start point dimension mismatch");

  // balance L_x = L_y, then put the smaller modulus on the primal block
  const double s = std::pow(params.L_y / params.L_x, 0.25);
  QuadraticSaddle qn = rescale_quadratic(q, s);
  SmoothnessParams pn = params;
  pn.m_x *= s * s;
  pn.m_y /= s * s;
  pn.L_x = pn.L_y = std::sqrt(params.L_x * params.L_y);
  const bool swap = pn.m_x > pn.m_y;
  if (swap) {
    qn = flip_quadratic(qn);
    pn = pn.flipped();
  }

  if (cfg.k == 1 || pn.L_xy <= pn.m_y) {
    SolveReport r = pbr_solve(quadratic_oracle(q), z0, cfg.epsilon, params, cfg.mode, cfg.pbr, monitor);
    if (cfg.k > 1) r.note = "coupling below m_y: solved by proximal best response";
    return r;
  }

  auto to_original = [s, swap](const JointPoint& zn) {
    const JointPoint w = swap ? swap_blocks(zn) : zn;
    return JointPoint{s * w.x, w.y / s};
  };
  JointPoint zn{z0.x / s, s * z0.y};
  if (swap) zn = swap_blocks(zn);
  const double distortion = std::max(s * s, 1 / (s * s));

  Monitor mapped = monitor;
  mapped.transform = to_original;
  SolveReport r = split_solve(qn, pn, zn, cfg.k, cfg.epsilon / distortion, cfg, mapped);
  r.final_point = to_original(r.final_point);
  return r;
}

}  // namespace minimax
