#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace minimax;
using namespace testing_support;

TEST_SUITE("core") {

TEST_CASE("weighted error of unit offsets") {
  const JointPoint zs{Vec::Zero(1), Vec::Zero(1)};
  auto e = weighted_error(zs, zs);
  CHECK(e.sum_norm == 0);
  CHECK(e.joint_norm == 0);
  e = weighted_error({Vec::Ones(1), Vec::Ones(1)}, zs);
  CHECK(e.sum_norm == doctest::Approx(2.0));
  CHECK(e.joint_norm == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("summed and joint norms sandwich each other") {
  SplitMix64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const JointPoint a = random_point(4, 3, rng.next());
    const JointPoint b = random_point(4, 3, rng.next());
    const auto e = weighted_error(a, b);
    CHECK(e.joint_norm <= e.sum_norm * (1 + 1e-15));
    CHECK(e.sum_norm <= std::sqrt(2.0) * e.joint_norm * (1 + 1e-15));
  }
}

TEST_CASE("weighted error rejects mismatched blocks") {
  CHECK_THROWS_AS(weighted_error(JointPoint::zeros(2, 1), JointPoint::zeros(1, 1)), ConfigError);
}

TEST_CASE("point validation rejects NaN and empty blocks") {
  JointPoint z = JointPoint::zeros(2, 2);
  z.y(1) = std::nan("");
  CHECK_THROWS_AS(z.validate(), ConfigError);
  CHECK_THROWS_AS(JointPoint(Vec(0), Vec::Zero(1)).validate(), ConfigError);
  CHECK_NOTHROW(JointPoint::zeros(1, 1).validate());
}

TEST_CASE("smoothness parameter checks") {
  SmoothnessParams p{2, 1, 1, 0, 1};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {1, 1, 4, -1, 1};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {1, 2, 4, 3, 9};
  CHECK_NOTHROW(p.validate());
  CHECK(p.L() == 9);
  CHECK(p.kappa_x() == 4);
  CHECK(p.kappa_y() == 4.5);
  const auto f = p.flipped();
  CHECK(f.m_x == 2);
  CHECK(f.L_x == 9);
  CHECK(f.L_y == 4);
}

TEST_CASE("stacking and splitting round trip") {
  const JointPoint z = random_point(3, 5, 11);
  const Vec s = z.stacked();
  CHECK(s.size() == 8);
  CHECK(JointPoint::split(s, 3) == z);
}

TEST_CASE("balanced instance is left unchanged by rescale") {
  const SmoothnessParams p{1, 2, 10, 3, 10};
  const auto q = seeded(3, 3, p, 1);
  const auto r = rescale(quadratic_oracle(q), p);
  CHECK(r.scale == 1.0);
  CHECK(r.params.m_x == p.m_x);
  CHECK(r.params.L_xy == p.L_xy);
  const JointPoint z = random_point(3, 3, 2);
  CHECK(r.oracle.eval(z) == quadratic_oracle(q).eval(z));
}

TEST_CASE("separable rescale balances curvature") {
  // f = 2 x^2 - y^2 / 2, so L_x = 4, L_y = 1, s^2 = 1/2 and g = x^2 - y^2
  QuadraticSaddle q;
  q.A = Mat::Constant(1, 1, 4);
  q.B = Mat::Zero(1, 1);
  q.C = Mat::Constant(1, 1, 1);
  q.u = Vec::Zero(1);
  q.v = Vec::Zero(1);
  const SmoothnessParams p{4, 1, 4, 0, 1};
  const auto r = rescale(quadratic_oracle(q), p);
  CHECK(r.scale * r.scale == doctest::Approx(0.5));
  CHECK(r.params.L_x == doctest::Approx(2.0));
  CHECK(r.params.L_y == doctest::Approx(2.0));
  CHECK(r.oracle.eval(JointPoint{Vec::Ones(1), Vec::Zero(1)}).x(0) == doctest::Approx(2.0));
  CHECK(r.oracle.eval(JointPoint{Vec::Zero(1), Vec::Ones(1)}).y(0) == doctest::Approx(-2.0));
}

TEST_CASE("rescale preserves condition numbers and coupling, matches the quadratic map") {
  SplitMix64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const double Lx = std::pow(10.0, 1 + 3 * rng.uniform());
    const double Ly = std::pow(10.0, 1 + 3 * rng.uniform());
    const SmoothnessParams p{1, 1 + rng.uniform(), Lx, 0.5 * std::min(Lx, Ly), Ly};
    const auto q = seeded(5, 4, p, rng.next());
    const auto r = rescale(quadratic_oracle(q), p);
    CHECK(r.params.kappa_x() == doctest::Approx(p.kappa_x()).epsilon(1e-12));
    CHECK(r.params.kappa_y() == doctest::Approx(p.kappa_y()).epsilon(1e-12));
    CHECK(r.params.m_x * r.params.m_y == doctest::Approx(p.m_x * p.m_y).epsilon(1e-12));
    CHECK(r.params.L_xy == p.L_xy);
    CHECK(r.params.L_x == r.params.L_y);
    CHECK(r.params.L() <= p.L() * (1 + 1e-12));
    // measured spectra of the rescaled quadratic agree with the declared params
    const auto measured = measure_params(rescale_quadratic(q, r.scale));
    CHECK(measured.m_x == doctest::Approx(r.params.m_x).epsilon(1e-9));
    CHECK(measured.L_x == doctest::Approx(r.params.L_x).epsilon(1e-9));
    CHECK(measured.L_y == doctest::Approx(r.params.L_y).epsilon(1e-9));
    const auto qo = quadratic_oracle(rescale_quadratic(q, r.scale));
    const JointPoint z = random_point(5, 4, rng.next());
    const JointPoint d = r.oracle.eval(z) - qo.eval(z);
    CHECK(d.norm() <= 1e-10 * (1 + qo.eval(z).norm()));
    // coordinate maps are inverse to each other
    CHECK((r.to_original(r.from_original(z)) - z).norm() <= 1e-14 * z.norm());
  }
}

TEST_CASE("prox augmentation with zero weight is the identity") {
  const SmoothnessParams p{1, 1, 10, 2, 10};
  const auto f = quadratic_oracle(seeded(3, 2, p, 4));
  const auto g = prox_augment_x(f, 0.0, Vec::Ones(3));
  const JointPoint z = random_point(3, 2, 9);
  CHECK(g.eval(z) == f.eval(z));
}

TEST_CASE("prox of the zero function") {
  const auto f = zero_oracle(2, 1);
  const Vec xh = Vec::Constant(2, 3.0);
  const JointPoint z{Vec::Constant(2, 5.0), Vec::Ones(1)};
  const auto g = prox_augment_x(f, 0.5, xh).eval(z);
  CHECK(g.x(0) == doctest::Approx(2.0));  // 2 * 0.5 * (5 - 3)
  CHECK(g.y(0) == 0);
  const auto h = prox_augment_y(f, 0.5, Vec::Zero(1)).eval(z);
  CHECK(h.y(0) == doctest::Approx(-1.0));
  CHECK(h.x(0) == 0);
}

TEST_CASE("prox gradients match finite differences of the augmented value") {
  const SmoothnessParams p{1, 2, 20, 4, 20};
  const auto q = seeded(3, 3, p, 8);
  const Vec xh = random_point(3, 1, 1).x;
  const Vec yh = random_point(3, 1, 2).x;
  const double beta = 0.7;
  auto value = [&](const JointPoint& z) {
    return q.value(z) + beta * (z.x - xh).squaredNorm() - beta * (z.y - yh).squaredNorm();
  };
  const auto g = prox_augment_y(prox_augment_x(quadratic_oracle(q), beta, xh), beta, yh);
  const JointPoint z = random_point(3, 3, 3);
  const JointPoint grad = g.eval(z);
  const double h = 1e-6;
  for (int i = 0; i < 6; ++i) {
    JointPoint zp = z, zm = z;
    (i < 3 ? zp.x(i) : zp.y(i - 3)) += h;
    (i < 3 ? zm.x(i) : zm.y(i - 3)) -= h;
    const double fd = (value(zp) - value(zm)) / (2 * h);
    CHECK(fd == doctest::Approx(i < 3 ? grad.x(i) : grad.y(i - 3)).epsilon(1e-6));
  }
}

TEST_CASE("prox rejects a center of the wrong size") {
  CHECK_THROWS_AS(prox_augment_x(zero_oracle(2, 1), 1.0, Vec::Zero(3)), ConfigError);
  CHECK_THROWS_AS(prox_augment_y(zero_oracle(2, 1), 1.0, Vec::Zero(2)), ConfigError);
}

TEST_CASE("flip of the bilinear function") {
  // f = x y: flipped h(y, x) = -x y with gradient (-x, -y) in (y, x) order
  const auto f = GradientOracle(1, 1, [](const Vec& x, const Vec& y, Vec& gx, Vec& gy) {
    gx = y;
    gy = x;
  });
  const auto h = flip_minmax(f);
  const JointPoint w{Vec::Constant(1, 2.0), Vec::Constant(1, 3.0)};  // y = 2, x = 3
  const auto g = h.eval(w);
  CHECK(g.x(0) == -3.0);
  CHECK(g.y(0) == -2.0);
}

TEST_CASE("flip is an involution") {
  const SmoothnessParams p{1, 2, 10, 3, 12};
  const auto f = quadratic_oracle(seeded(4, 3, p, 6));
  const auto ff = flip_minmax(flip_minmax(f));
  SplitMix64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const JointPoint z = random_point(4, 3, rng.next());
    CHECK(ff.eval(z) == f.eval(z));
  }
  CHECK(swap_blocks(swap_blocks(random_point(4, 3, 5))) == random_point(4, 3, 5));
}

TEST_CASE("flip maps the saddle to the swapped saddle") {
  const SmoothnessParams p{1, 2, 10, 3, 12};
  const auto q = seeded(4, 3, p, 6);
  const auto zs = direct_saddle(q);
  const auto g = flip_minmax(quadratic_oracle(q)).eval(swap_blocks(zs));
  CHECK(g.norm() <= 1e-10);
  const auto zf = direct_saddle(flip_quadratic(q));
  CHECK((zf - swap_blocks(zs)).norm() <= 1e-10);
}

TEST_CASE("wrappers share the root counter") {
  const auto f = zero_oracle(2, 2);
  const auto g = flip_minmax(prox_augment_x(f, 1.0, Vec::Zero(2)));
  CHECK(f.evaluations() == 0);
  g.eval(JointPoint::zeros(2, 2));
  g.eval(JointPoint::zeros(2, 2));
  CHECK(f.evaluations() == 2);
  CHECK(g.evaluations() == 2);
}

TEST_CASE("gradient noise floor") {
  const double u = std::numeric_limits<double>::epsilon();
  CHECK(gradient_noise_floor(1, 1, 0, 4) == doctest::Approx(16 * u));
  CHECK(gradient_noise_floor(3, 0, 5, 1) == doctest::Approx(20 * u));
  // a backward-stable direct solve leaves a gradient below the floor
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SmoothnessParams p{1, 2, 1e3, 40, 300};
    const auto q = seeded(12, 9, p, seed);
    const JointPoint zs = direct_saddle(q);
    const double offset = std::sqrt(q.u.squaredNorm() + q.v.squaredNorm());
    CHECK(quadratic_oracle(q).eval(zs).norm() <= gradient_noise_floor(p.L(), zs.norm(), offset, 21));
  }
}

TEST_CASE("stall guard") {
  StallGuard under;
  CHECK(under.done(0.5, 1));

  // far above the floor: never stops on stalling alone
  StallGuard far(3);
  for (int i = 0; i < 10; ++i) CHECK_FALSE(far.done(100, 1));

  // near the floor: stops after `patience` checks without a new minimum
  StallGuard near(3);
  CHECK_FALSE(near.done(8, 1));
  CHECK_FALSE(near.done(9, 1));
  CHECK_FALSE(near.done(9, 1));
  CHECK(near.done(8.5, 1));

  // a new minimum resets the count
  StallGuard reset(2);
  CHECK_FALSE(reset.done(8, 1));
  CHECK_FALSE(reset.done(9, 1));
  CHECK_FALSE(reset.done(7, 1));
  CHECK_FALSE(reset.done(9, 1));
  CHECK(reset.done(9, 1));
}

TEST_CASE("mode and termination names") {
  CHECK(parse_mode("Theoretical") == Mode::Theoretical);
  CHECK(parse_mode(to_string(Mode::Practical)) == Mode::Practical);
  CHECK_THROWS_AS(parse_mode("fast"), ConfigError);
  CHECK(to_string(Termination::ToleranceMet) != to_string(Termination::Diverged));
}

}  // TEST_SUITE
