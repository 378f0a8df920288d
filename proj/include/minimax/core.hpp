#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace minimax {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Error categories. The CLI maps each one to its own exit code.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PreconditionError : std::domain_error {
  using std::domain_error::domain_error;
};
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct JointPoint {
  Vec x;
  Vec y;

  JointPoint() = default;
  JointPoint(Vec x_, Vec y_) : x(std::move(x_)), y(std::move(y_)) {}
  static JointPoint zeros(Index n, Index m) { return {Vec::Zero(n), Vec::Zero(m)}; }

  Index n() const { return x.size(); }
  Index m() const { return y.size(); }
  Vec stacked() const;
  static JointPoint split(const Vec& z, Index n);
  double norm() const { return std::sqrt(x.squaredNorm() + y.squaredNorm()); }
  bool finite() const { return x.allFinite() && y.allFinite(); }
  // throws ConfigError on empty blocks or non-finite entries
  void validate() const;
};

JointPoint operator-(const JointPoint& a, const JointPoint& b);
JointPoint operator+(const JointPoint& a, const JointPoint& b);
JointPoint operator*(double s, const JointPoint& a);
bool operator==(const JointPoint& a, const JointPoint& b);

struct SmoothnessParams {
  double m_x = 1;
  double m_y = 1;
  double L_x = 1;
  double L_xy = 0;
  double L_y = 1;

  double L() const;
  double kappa_x() const { return L_x / m_x; }
  double kappa_y() const { return L_y / m_y; }
  // params of h(y, x) = -f(x, y)
  SmoothnessParams flipped() const { return {m_y, m_x, L_y, L_xy, L_x}; }
  void validate() const;
};

struct WeightedError {
  double sum_norm;
  double joint_norm;
};

// ||x - x*|| + ||y - y*|| and ||z - z*||
WeightedError weighted_error(const JointPoint& z, const JointPoint& z_star);

// Rounding level of a computed gradient near z: each entry of the linear part
// carries about machine epsilon times L ||z||, plus the constant term.
// Gradient-norm targets below this cannot be certified.
double gradient_noise_floor(double L, double z_norm, double g_norm, Index dim);

// Stop test for gradient-driven loops near rounding level. The floor above is
// an estimate; nested and rescaled oracles can stall a few times higher. Stops
// once the norm is under the floor, or within 16x of it with no new minimum
// over `patience` consecutive checks.
class StallGuard {
 public:
  explicit StallGuard(int patience = 20) : patience_(patience) {}
  bool done(double g_norm, double floor);

 private:
  int patience_;
  int since_best_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

// Gradient oracle with an evaluation counter shared by every wrapper built on
// top of it, so composite solvers report exactly the root's call count.
class GradientOracle {
 public:
  using Kernel = std::function<void(const Vec& x, const Vec& y, Vec& gx, Vec& gy)>;

  GradientOracle(Index n, Index m, Kernel kernel, int matvecs_per_eval = 0);

  Index n() const { return n_; }
  Index m() const { return m_; }

  void eval(const Vec& x, const Vec& y, Vec& gx, Vec& gy) const;
  void eval(const JointPoint& z, JointPoint& g) const { eval(z.x, z.y, g.x, g.y); }
  JointPoint eval(const JointPoint& z) const;

  std::uint64_t evaluations() const { return *counter_; }
  // dense block products behind one evaluation (0 when not a quadratic)
  int matvecs_per_eval() const { return matvecs_; }

  // Wrapper sharing this oracle's counter; `kernel` should call kernel() of
  // this oracle, which does not count.
  GradientOracle wrap(Index n, Index m, Kernel kernel) const;
  const Kernel& kernel() const { return kernel_; }

 private:
  GradientOracle(Index n, Index m, Kernel kernel, std::shared_ptr<std::uint64_t> counter,
                 int matvecs);

  Index n_;
  Index m_;
  Kernel kernel_;
  std::shared_ptr<std::uint64_t> counter_;
  int matvecs_;
};

// g(x, y) = f(s x, y / s) with s = (L_y / L_x)^{1/4}
struct Rescaled {
  GradientOracle oracle;
  SmoothnessParams params;
  double scale = 1;  // s

  JointPoint to_original(const JointPoint& z) const;
  JointPoint from_original(const JointPoint& z) const;
};

Rescaled rescale(const GradientOracle& oracle, const SmoothnessParams& params);

// f + beta ||x - x_hat||^2
GradientOracle prox_augment_x(const GradientOracle& oracle, double beta, const Vec& x_hat);
// f - beta ||y - y_hat||^2
GradientOracle prox_augment_y(const GradientOracle& oracle, double beta, const Vec& y_hat);
// h(y, x) = -f(x, y); points of the flipped oracle are (y, x)
GradientOracle flip_minmax(const GradientOracle& oracle);
JointPoint swap_blocks(const JointPoint& z);

enum class Mode { Theoretical, Practical };
enum class Termination { ToleranceMet, IterationCap, PreconditionViolated, Diverged };

std::string to_string(Mode mode);
std::string to_string(Termination t);
Mode parse_mode(const std::string& s);

struct ResidualSample {
  std::uint64_t eval_count;
  double residual;
};

struct SolveReport {
  std::uint64_t outer_iterations = 0;
  std::uint64_t gradient_evals = 0;
  std::uint64_t matvec_products = 0;
  JointPoint final_point;
  // solver-native residual (gradient or linear residual norm, relative to start)
  std::vector<ResidualSample> residual_history;
  // ||z_t - z*|| / ||z_0 - z*|| per outer iteration, when a reference is given
  std::vector<ResidualSample> error_history;
  std::vector<JointPoint> iterates;  // z_0, z_1, ... when requested
  Termination termination = Termination::ToleranceMet;
  std::string note;
};

// Optional instrumentation. Never touches the oracle.
struct Monitor {
  std::optional<JointPoint> reference;
  bool record_iterates = false;
  // maps solver coordinates to the caller's before recording
  std::function<JointPoint(const JointPoint&)> transform;

  void start(SolveReport& r, const JointPoint& z0, std::uint64_t count) const;
  void step(SolveReport& r, const JointPoint& z, std::uint64_t count) const;

 private:
  mutable double initial_error_ = 0;
};

}  // namespace minimax
