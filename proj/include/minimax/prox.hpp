#pragma once

#include "minimax/abr.hpp"
#include "minimax/core.hpp"

#include <functional>

namespace minimax {

struct AppaConfig {
  double beta = 1;     // proximal weight
  double modulus = 1;  // strong convexity of the proximal block
  double M = 10;       // inner precision multiplier
  long T = 0;          // fixed outer count; 0 runs until the stop rule fires
  long cap = 100000;   // safety cap

  double kappa() const { return beta / modulus; }
  double theta() const;
  double tau() const;
  void validate() const;
};

// Solves the augmented problem (primal block proxed) from a warm start.
using ProxSubsolver =
    std::function<JointPoint(const GradientOracle& augmented, const JointPoint& warm)>;
// Checked after each outer step; true ends the run.
using AppaStop = std::function<bool(const JointPoint& z)>;

// Inexact accelerated proximal point on the primal block.
SolveReport appa_minimax(const GradientOracle& oracle, const JointPoint& z0, const AppaConfig& cfg,
                         const ProxSubsolver& subsolver, const AppaStop& stop = {},
                         const Monitor& monitor = {});

// ceil(8 sqrt(kappa) ln(28 kappa^2 (L/m_y) sqrt(L^2/(m_x m_y)) / epsilon)), kappa = beta/m_x
long theorem2_iteration_bound(const SmoothnessParams& p, double beta, double epsilon);

// Lower bound on M under which the inexact outer loop keeps its rate.
double appa_precision_floor(const SmoothnessParams& p, double kappa);

struct PbrConstants {
  double beta1;
  double beta2;
  double M1;
  double M2;

  static PbrConstants from(const SmoothnessParams& p);
};

struct PbrOptions {
  // practical mode only: relative gradient reduction for the middle layer and
  // the summed-error target handed to ABR
  double inner_tolerance = 1e-2;
  double abr_tolerance = 1e-2;
  double cap_multiplier = 100;
};

// Middle layer on g = f + beta1 ||x - x_hat||^2 (the oracle passed in). `params`
// describe f.
SolveReport appa_abr(const GradientOracle& g, const JointPoint& z0, double beta1,
                     const SmoothnessParams& params, Mode mode, const PbrOptions& opts = {});

// Returns a point with ||z - z*|| <= epsilon ||z0 - z*||.
SolveReport pbr_solve(const GradientOracle& oracle, const JointPoint& z0, double epsilon,
                      const SmoothnessParams& params, Mode mode, const PbrOptions& opts = {},
                      const Monitor& monitor = {});

}  // namespace minimax
