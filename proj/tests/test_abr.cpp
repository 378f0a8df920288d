#include "support.hpp"

#include "minimax/abr.hpp"

#include <doctest.h>

#include <cmath>

using namespace minimax;
using namespace testing_support;

namespace {

double summed_ratio(const JointPoint& z, const JointPoint& zs, const JointPoint& z0) {
  return weighted_error(z, zs).sum_norm / weighted_error(z0, zs).sum_norm;
}

}  // namespace

TEST_SUITE("abr") {

TEST_CASE("round count and coupling test") {
  CHECK(abr_rounds({1, 2, 100, 30, 100}, 1e-3) == 16);
  CHECK(abr_rounds({1, 1, 1, 0, 1}, 1.0) == 0);
  CHECK(abr_coupling_ok({4, 1, 10, 1.0, 10}));
  CHECK(!abr_coupling_ok({4, 1, 10, 1.01, 10}));
}

TEST_CASE("separable instance: the first round already sits at AGD accuracy") {
  const Vec a = Vec::LinSpaced(6, 1, 50), c = Vec::LinSpaced(5, 2, 20);
  const auto q = separable_instance(a, c, 3);
  const SmoothnessParams p{1, 2, 50, 0, 20};
  const auto zs = direct_saddle(q);
  const JointPoint z0 = random_point(6, 5, 1);
  Monitor mon;
  mon.record_iterates = true;
  const auto rep = abr_solve(quadratic_oracle(q), z0, {1e-3, p}, mon);
  CHECK(rep.termination == Termination::ToleranceMet);
  CHECK(summed_ratio(rep.final_point, zs, z0) <= 1e-3);
  REQUIRE(rep.iterates.size() >= 2);
  const double agd_x = std::sqrt(agd_error_bound(p.kappa_x(), abr_inner_steps(p.kappa_x())));
  const double agd_y = std::sqrt(agd_error_bound(p.kappa_y(), abr_inner_steps(p.kappa_y())));
  const auto ratios = abr_round_contraction(rep.iterates, zs, p);
  CHECK(ratios.front() <= std::max(agd_x, agd_y));
  // per block the first round is just AGD from z0
  CHECK((rep.iterates[1].x - zs.x).norm() <= agd_x * (z0.x - zs.x).norm());
  CHECK((rep.iterates[1].y - zs.y).norm() <= agd_y * (z0.y - zs.y).norm());
}

TEST_CASE("weakly coupled seeded instance meets the summed target") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const SmoothnessParams p{1, 4, 100, 0.4 * std::sqrt(4.0), 60};
    const auto q = seeded(20, 20, p, seed);
    const auto zs = direct_saddle(q);
    const JointPoint z0 = random_point(20, 20, seed + 50);
    for (double eps : {1e-2, 1e-6}) {
      const auto rep = abr_solve(quadratic_oracle(q), z0, {eps, p});
      CHECK(rep.termination == Termination::ToleranceMet);
      CHECK(summed_ratio(rep.final_point, zs, z0) <= eps);
    }
  }
}

TEST_CASE("coupling beyond the hypothesis is refused") {
  const SmoothnessParams p{1, 1, 10, 0.6, 10};
  const auto q = seeded(4, 4, p, 1);
  const auto rep = abr_solve(quadratic_oracle(q), random_point(4, 4, 2), {1e-3, p});
  CHECK(rep.termination == Termination::PreconditionViolated);
  CHECK(rep.gradient_evals == 0);
}

TEST_CASE("gradient count is rounds times inner steps") {
  const SmoothnessParams p{1, 2, 30, 0.5, 50};
  const auto q = seeded(5, 5, p, 9);
  const auto rep = abr_solve(quadratic_oracle(q), random_point(5, 5, 3), {1e-4, p});
  const long T = abr_rounds(p, 1e-4);
  CHECK(rep.outer_iterations == static_cast<std::uint64_t>(T));
  CHECK(rep.gradient_evals ==
        static_cast<std::uint64_t>(T * (abr_inner_steps(p.kappa_x()) + abr_inner_steps(p.kappa_y()))));
  CHECK(rep.matvec_products == rep.gradient_evals * quadratic_oracle(q).matvecs_per_eval());
}

TEST_CASE("explicit inner counts override the defaults") {
  const SmoothnessParams p{1, 1, 10, 0.2, 10};
  const auto q = seeded(3, 3, p, 2);
  AbrConfig cfg{1e-2, p};
  cfg.inner_steps_x = 3;
  cfg.inner_steps_y = 4;
  const auto rep = abr_solve(quadratic_oracle(q), random_point(3, 3, 1), cfg);
  CHECK(rep.gradient_evals == static_cast<std::uint64_t>(abr_rounds(p, 1e-2) * 7));
}

TEST_CASE("vacuous target returns the start") {
  const SmoothnessParams p{1, 1, 10, 0.2, 10};
  const auto q = seeded(3, 3, p, 2);
  const JointPoint z0 = random_point(3, 3, 4);
  const auto rep = abr_solve(quadratic_oracle(q), z0, {1.5, p});
  CHECK(rep.final_point == z0);
  CHECK(rep.gradient_evals == 0);
  CHECK(rep.termination == Termination::ToleranceMet);
}

TEST_CASE("cap below the round count") {
  const SmoothnessParams p{1, 1, 10, 0.2, 10};
  const auto q = seeded(3, 3, p, 2);
  AbrConfig cfg{1e-6, p};
  cfg.iteration_cap = 2;
  const auto rep = abr_solve(quadratic_oracle(q), random_point(3, 3, 4), cfg);
  CHECK(rep.termination == Termination::IterationCap);
  CHECK(rep.outer_iterations == 2);
}

TEST_CASE("round contraction: at the saddle and on a weak instance") {
  const SmoothnessParams p{2, 1, 40, 0.5 * std::sqrt(2.0), 25};
  const auto q = seeded(8, 6, p, 21);
  const auto zs = direct_saddle(q);
  const std::vector<JointPoint> still(4, zs);
  for (double r : abr_round_contraction(still, zs, p)) CHECK(r == 0);

  Monitor mon;
  mon.record_iterates = true;
  const auto rep = abr_solve(quadratic_oracle(q), random_point(8, 6, 7), {1e-8, p}, mon);
  const auto ratios = abr_round_contraction(rep.iterates, zs, p);
  CHECK(ratios.size() == rep.outer_iterations);
  for (double r : ratios) CHECK(r <= 0.55);
}

TEST_CASE("bad config") {
  CHECK_THROWS_AS(AbrConfig({0.0, {}}).validate(), ConfigError);
  AbrConfig c{1e-3, {}};
  c.iteration_cap = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

}  // TEST_SUITE
