#pragma once

#include "minimax/core.hpp"
#include "minimax/problems.hpp"
#include "minimax/prox.hpp"

#include <functional>

namespace minimax {

using LinearMap = std::function<void(const Vec& in, Vec& out)>;

struct CgResult {
  Vec x;
  long iterations = 0;
  long products = 0;  // operator applications, including the initial residual
  bool converged = false;
};

// Stops when ||r_k|| <= epsilon ||b - A x0||. Throws InternalError on
// breakdown (p'Ap <= 0).
CgResult cg(const LinearMap& apply, const Vec& b, const Vec& x0, double epsilon,
            long max_iterations = 100000);

// ceil(sqrt(kappa) ln(2 sqrt(kappa) / epsilon))
long cg_iteration_bound(double kappa, double epsilon);

// Splitting of J = G + S for a problem with L_x = L_y and m_x <= m_y.
struct HssOperators {
  Mat G;  // diag(A, C)
  Mat S;  // [[0, B], [-B', 0]]
  Mat P;  // diag(alpha I + beta A, I + beta C)
  double alpha = 1;
  double beta = 1;
  double eta = 1;
  int k = 1;
};

struct HssScalars {
  double alpha;
  double beta;
  double eta;
};

HssScalars hss_scalars(const SmoothnessParams& p, int k);
HssOperators make_hss_operators(const QuadraticSaddle& q, const SmoothnessParams& p, int k);

// One splitting step with dense direct solves.
Vec hss_exact_step(const HssOperators& ops, const Vec& z, const Vec& b);
// (eta P + S)^-1 (eta P - G) (eta P + G)^-1 (eta P - S)
Mat hss_iteration_matrix(const HssOperators& ops);
// max over the spectrum of P^-1 G of |lambda - eta| / (lambda + eta)
double hss_spectral_bound(const HssOperators& ops);
// The bound above controls M in the norm ||e||_W = ||P^{-1/2} (eta P + S) e||,
// where M is a Cayley factor times a symmetric one. In the plain 2-norm it can
// fail once P is not a multiple of I.
double hss_weighted_error(const HssOperators& ops, const Vec& e);
double hss_weighted_norm(const HssOperators& ops);
double hss_spectral_radius(const HssOperators& ops);

// 1 - (m_y / L_xy)^{1/k} / 2
double contraction_factor(const SmoothnessParams& p, int k);

// rounded sqrt(ln R / (2 ln(C1 ln R))), R = L^2/(m_x m_y), clamped to >= 1
int optimal_k(const SmoothnessParams& p, double C1 = 20);

double theorem4_bound(const SmoothnessParams& p, int k, double epsilon, double z0_error,
                      double C1 = 20, double C2 = 8);

struct RhssConstants {
  double M1;
  double M2;
  double eps_tilde;

  static RhssConstants from(const SmoothnessParams& p, double epsilon);
};

// The skew-shifted system (eta P + S) z = w written as a quadratic saddle,
// with the parameter bounds used for its declared class.
struct RhssSubproblem {
  QuadraticSaddle q;
  SmoothnessParams params;
};

RhssSubproblem rhss_subproblem(const QuadraticSaddle& q, const SmoothnessParams& p, int k,
                               const Vec& w);

struct RhssConfig {
  int k = 2;
  double epsilon = 1e-6;  // target ||z - z*|| / ||z0 - z*||
  Mode mode = Mode::Practical;
  long iteration_cap = 0;  // 0: 100x the theoretical outer count
  // practical mode only
  double cg_tolerance = 1e-10;
  double inner_tolerance = 0;  // 0: (m_y / L_xy)^{1/k} / 16
  PbrOptions pbr;

  void validate() const;
};

SolveReport rhss_solve(const QuadraticSaddle& q, const SmoothnessParams& params,
                       const JointPoint& z0, const RhssConfig& cfg, const Monitor& monitor = {});

}  // namespace minimax
