#include "support.hpp"

#include "minimax/prox.hpp"

#include <doctest.h>

#include <cmath>

using namespace minimax;
using namespace testing_support;

namespace {

// Exact solve of an affine-gradient saddle problem: probe the oracle's
// Jacobian column by column, then solve densely.
JointPoint exact_affine_saddle(const GradientOracle& g) {
  const Index n = g.n(), m = g.m();
  const JointPoint zero = JointPoint::zeros(n, m);
  const Vec g0 = g.eval(zero).stacked();
  Mat J(n + m, n + m);
  for (Index i = 0; i < n + m; ++i) {
    Vec e = Vec::Zero(n + m);
    e(i) = 1;
    J.col(i) = g.eval(JointPoint::split(e, n)).stacked() - g0;
  }
  return JointPoint::split(J.partialPivLu().solve(-g0), n);
}

}  // namespace

TEST_SUITE("prox") {

TEST_CASE("momentum constants at kappa one") {
  AppaConfig c;
  c.beta = 2;
  c.modulus = 2;
  CHECK(c.theta() == doctest::Approx(1.0 / 3));
  CHECK(c.tau() == doctest::Approx(1.0 / 6));
  c.beta = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("exact proximal steps reach the target within the outer bound") {
  const SmoothnessParams p{1, 2, 50, 10, 40};
  const auto q = seeded(6, 5, p, 13);
  const auto zs = direct_saddle(q);
  const JointPoint z0 = random_point(6, 5, 2);
  AppaConfig cfg;
  cfg.beta = p.m_x;
  cfg.modulus = p.m_x;
  cfg.M = 1e12;
  const double eps = 1e-6;
  cfg.T = theorem2_iteration_bound(p, cfg.beta, eps);
  const auto rep = appa_minimax(quadratic_oracle(q), z0, cfg,
                                [](const GradientOracle& aug, const JointPoint&) {
                                  return exact_affine_saddle(aug);
                                });
  CHECK(rep.termination == Termination::ToleranceMet);
  CHECK(rep.outer_iterations == static_cast<std::uint64_t>(cfg.T));
  CHECK(rel_error(rep.final_point, zs, z0) <= eps);
}

TEST_CASE("stop rule ends the outer loop early") {
  const SmoothnessParams p{1, 1, 10, 3, 10};
  const auto q = seeded(3, 3, p, 1);
  const auto zs = direct_saddle(q);
  AppaConfig cfg;
  cfg.beta = 4;
  cfg.modulus = 1;
  const auto rep = appa_minimax(
      quadratic_oracle(q), random_point(3, 3, 1), cfg,
      [](const GradientOracle& aug, const JointPoint&) { return exact_affine_saddle(aug); },
      [&](const JointPoint& z) { return (z - zs).norm() <= 1e-3; });
  CHECK(rep.termination == Termination::ToleranceMet);
  CHECK((rep.final_point - zs).norm() <= 1e-3);
  CHECK(rep.outer_iterations < 100);
}

TEST_CASE("outer loop started at the saddle stays put") {
  const SmoothnessParams p{1, 1, 10, 3, 10};
  const auto q = seeded(3, 3, p, 2);
  const auto zs = direct_saddle(q);
  AppaConfig cfg;
  cfg.beta = 3;
  cfg.modulus = 1;
  cfg.T = 5;
  const auto rep = appa_minimax(quadratic_oracle(q), zs, cfg,
                                [](const GradientOracle& aug, const JointPoint&) {
                                  return exact_affine_saddle(aug);
                                });
  CHECK((rep.final_point - zs).norm() <= 1e-12);
}

TEST_CASE("outer bound arithmetic") {
  // log argument equal to e
  const SmoothnessParams unit{1, 1, 1, 0, 1};
  CHECK(theorem2_iteration_bound(unit, 1, 28 / std::exp(1.0)) == 8);
  const SmoothnessParams p{1, 2, 100, 30, 100};
  CHECK(theorem2_iteration_bound(p, 30, 1e-6) == 1408);
  long prev = 0;
  for (double eps = 1e-1; eps > 1e-12; eps /= 10) {
    const long b = theorem2_iteration_bound(p, 30, eps);
    CHECK(b >= prev);
    prev = b;
  }
  CHECK_THROWS_AS(theorem2_iteration_bound(p, 30, 0), ConfigError);
}

TEST_CASE("two-layer constants") {
  const SmoothnessParams p{1, 2, 100, 30, 100};
  const auto k = PbrConstants::from(p);
  CHECK(k.beta1 == 30);
  CHECK(k.beta2 == 30);
  CHECK(k.M1 == doctest::Approx(28284271.2474619).epsilon(1e-13));
  CHECK(k.M2 == doctest::Approx(3394112.549695428).epsilon(1e-13));
  // weak coupling leaves the betas at the moduli
  const auto w = PbrConstants::from({1, 2, 100, 0.5, 100});
  CHECK(w.beta1 == 1);
  CHECK(w.beta2 == 2);
}

TEST_CASE("augmented inner problem passes the weak-coupling test") {
  SplitMix64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const double L = std::pow(10.0, 4 * rng.uniform());
    const SmoothnessParams p{1 + rng.uniform(), 1 + rng.uniform(), L + 2, (L + 2) * rng.uniform(), L + 2};
    const auto k = PbrConstants::from(p);
    CHECK(abr_coupling_ok({2 * k.beta1, 2 * k.beta2, 3 * p.L(), p.L_xy, 3 * p.L()}));
  }
}

TEST_CASE("middle layer started at its own saddle does no outer work") {
  // homogeneous problem centred at 0: the saddle is exactly 0
  const SmoothnessParams p{1, 1, 20, 5, 20};
  auto q = seeded(4, 4, p, 3);
  q.u.setZero();
  q.v.setZero();
  const auto k = PbrConstants::from(p);
  const auto g = prox_augment_x(quadratic_oracle(q), k.beta1, Vec::Zero(4));
  const auto rep = appa_abr(g, JointPoint::zeros(4, 4), k.beta1, p, Mode::Practical);
  CHECK(rep.outer_iterations == 0);
  CHECK(rep.gradient_evals == 1);
  CHECK(rep.final_point.norm() == 0);
}

TEST_CASE("middle layer started at a computed saddle stops at rounding level") {
  // LU saddle of an inhomogeneous problem: gradient there is pure rounding, so
  // a relative target would be unreachable
  const SmoothnessParams p{1, 1, 200, 30, 200};
  const auto q = seeded(6, 6, p, 4);
  const auto k = PbrConstants::from(p);
  const Vec xh = random_point(6, 1, 9).x;
  const auto g = prox_augment_x(quadratic_oracle(q), k.beta1, xh);
  const auto zg = exact_affine_saddle(g);
  const auto rep = appa_abr(g, zg, k.beta1, p, Mode::Practical);
  CHECK(rep.termination == Termination::ToleranceMet);
  CHECK(rep.outer_iterations <= 1);
  CHECK((rep.final_point - zg).norm() <= 1e-12 * (1 + zg.norm()));
}

TEST_CASE("middle layer in theoretical mode meets its precision") {
  const SmoothnessParams p{1, 1, 4, 2, 4};
  const auto q = seeded(3, 3, p, 5);
  const auto k = PbrConstants::from(p);
  const Vec xh = random_point(3, 1, 6).x;
  const auto g = prox_augment_x(quadratic_oracle(q), k.beta1, xh);
  const auto zg = exact_affine_saddle(g);
  const JointPoint z0 = random_point(3, 3, 7);
  const auto rep = appa_abr(g, z0, k.beta1, p, Mode::Theoretical);
  CHECK(rep.termination == Termination::ToleranceMet);
  // gradient ratio min(m)/(9 L M1) certifies this distance ratio
  CHECK(rel_error(rep.final_point, zg, z0) <= 1 / k.M1);
}

TEST_CASE("practical solve on the scaling-law instance") {
  const SmoothnessParams p{1, 1, 1e3, std::sqrt(1e3), 1e3};
  const auto q = seeded(20, 20, p, 0);
  const auto zs = direct_saddle(q);
  const JointPoint z0 = random_point(20, 20, 1);
  const auto rep = pbr_solve(quadratic_oracle(q), z0, 1e-6, p, Mode::Practical);
  CHECK(rep.termination == Termination::ToleranceMet);
  CHECK(rel_error(rep.final_point, zs, z0) <= 1e-6);
  MESSAGE("gradient evaluations: " << rep.gradient_evals);
  CHECK(rep.gradient_evals > 0);
}

TEST_CASE("start at the saddle costs one gradient") {
  const SmoothnessParams p{1, 1, 10, 3, 10};
  auto q = seeded(3, 3, p, 1);
  q.u.setZero();
  q.v.setZero();
  const auto rep = pbr_solve(quadratic_oracle(q), JointPoint::zeros(3, 3), 1e-6, p, Mode::Practical);
  CHECK(rep.outer_iterations == 0);
  CHECK(rep.gradient_evals == 1);
  CHECK(rep.final_point.norm() == 0);
}

TEST_CASE("weak coupling, unbalanced curvature and theoretical mode") {
  struct Case {
    SmoothnessParams p;
    Mode mode;
  };
  const Case cases[] = {
      {{1, 2, 30, 0.5, 30}, Mode::Practical},
      {{1, 2, 400, 8, 9}, Mode::Practical},
      {{2, 1, 6, 3, 5}, Mode::Theoretical},
  };
  std::uint64_t seed = 0;
  for (const auto& c : cases) {
    const auto q = seeded(4, 3, c.p, ++seed);
    const auto zs = direct_saddle(q);
    const JointPoint z0 = random_point(4, 3, seed + 10);
    const auto rep = pbr_solve(quadratic_oracle(q), z0, 1e-6, c.p, c.mode);
    CHECK(rep.termination == Termination::ToleranceMet);
    CHECK(rel_error(rep.final_point, zs, z0) <= 1e-6);
  }
}

TEST_CASE("residual history decays geometrically") {
  const SmoothnessParams p{1, 1, 200, 20, 200};
  const auto q = seeded(8, 8, p, 4);
  const auto rep = pbr_solve(quadratic_oracle(q), random_point(8, 8, 2), 1e-8, p, Mode::Practical);
  const auto& h = rep.residual_history;
  REQUIRE(h.size() >= 3);
  // least-squares slope of log residual against evaluation count
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : h) {
    const double x = static_cast<double>(s.eval_count), y = std::log(s.residual);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(h.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope < 0);
  CHECK(h.back().residual < 1e-8);
}

TEST_CASE("monitor reports errors in original coordinates") {
  const SmoothnessParams p{1, 1, 100, 5, 4};
  const auto q = seeded(4, 4, p, 6);
  const auto zs = direct_saddle(q);
  const JointPoint z0 = random_point(4, 4, 3);
  Monitor mon;
  mon.reference = zs;
  const auto rep = pbr_solve(quadratic_oracle(q), z0, 1e-6, p, Mode::Practical, {}, mon);
  REQUIRE(!rep.error_history.empty());
  CHECK(rep.error_history.back().residual == doctest::Approx(rel_error(rep.final_point, zs, z0)));
}

TEST_CASE("bad inputs") {
  const SmoothnessParams p{1, 1, 10, 3, 10};
  const auto o = quadratic_oracle(seeded(3, 3, p, 1));
  CHECK_THROWS_AS(pbr_solve(o, JointPoint::zeros(3, 3), 0, p, Mode::Practical), ConfigError);
  CHECK_THROWS_AS(pbr_solve(o, JointPoint::zeros(2, 3), 1e-3, p, Mode::Practical), ConfigError);
}

}  // TEST_SUITE
