#include "minimax/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minimax {

Vec JointPoint::stacked() const {
  Vec z(x.size() + y.size());
  z << x, y;
  return z;
}

JointPoint JointPoint::split(const Vec& z, Index n) {
  return {z.head(n), z.tail(z.size() - n)};
}

void JointPoint::validate() const {
  if (x.size() < 1 || y.size() < 1) throw ConfigError("joint point blocks must be nonempty");
  if (!finite()) throw ConfigError("joint point has non-finite entries");
}

static void check_dims(const JointPoint& a, const JointPoint& b) {
  if (a.n() != b.n() || a.m() != b.m()) throw ConfigError("joint point dimension mismatch");
}

JointPoint operator-(const JointPoint& a, const JointPoint& b) {
  check_dims(a, b);
  return {a.x - b.x, a.y - b.y};
}

JointPoint operator+(const JointPoint& a, const JointPoint& b) {
  check_dims(a, b);
  return {a.x + b.x, a.y + b.y};
}

JointPoint operator*(double s, const JointPoint& a) { return {s * a.x, s * a.y}; }

bool operator==(const JointPoint& a, const JointPoint& b) {
  return a.n() == b.n() && a.m() == b.m() && a.x == b.x && a.y == b.y;
}

double SmoothnessParams::L() const { return std::max({L_x, L_xy, L_y}); }

void SmoothnessParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(finite(m_x) && finite(m_y) && finite(L_x) && finite(L_xy) && finite(L_y)))
    throw ConfigError("smoothness params must be finite");
  if (!(m_x > 0 && m_y > 0)) throw ConfigError("m_x and m_y must be positive");
  if (!(m_x <= L_x)) throw ConfigError("need m_x <= L_x");
  if (!(m_y <= L_y)) throw ConfigError("need m_y <= L_y");
  if (!(L_xy >= 0)) throw ConfigError("L_xy must be nonnegative");
}

double gradient_noise_floor(double L, double z_norm, double g_norm, Index dim) {
  const double u = std::numeric_limits<double>::epsilon();
  return 4 * u * std::sqrt(static_cast<double>(dim)) * (2 * L * z_norm + g_norm);
}

bool StallGuard::done(double g_norm, double floor) {
  if (g_norm <= floor) return true;
  if (g_norm < best_) {
    best_ = g_norm;
    since_best_ = 0;
    return false;
  }
  return ++since_best_ >= patience_ && g_norm <= 16 * floor;
}

WeightedError weighted_error(const JointPoint& z, const JointPoint& z_star) {
  check_dims(z, z_star);
  const double ex = (z.x - z_star.x).norm();
  const double ey = (z.y - z_star.y).norm();
  return {ex + ey, std::hypot(ex, ey)};
}

GradientOracle::GradientOracle(Index n, Index m, Kernel kernel, int matvecs_per_eval)
    : GradientOracle(n, m, std::move(kernel), std::make_shared<std::uint64_t>(0),
                     matvecs_per_eval) {}

GradientOracle::GradientOracle(Index n, Index m, Kernel kernel,
                               std::shared_ptr<std::uint64_t> counter, int matvecs)
    : n_(n), m_(m), kernel_(std::move(kernel)), counter_(std::move(counter)), matvecs_(matvecs) {
  if (n < 1 || m < 1) throw ConfigError("oracle dimensions must be positive");
}

void GradientOracle::eval(const Vec& x, const Vec& y, Vec& gx, Vec& gy) const {
  if (x.size() != n_ || y.size() != m_) throw ConfigError("oracle input dimension mismatch");
  ++*counter_;
  kernel_(x, y, gx, gy);
}

JointPoint GradientOracle::eval(const JointPoint& z) const {
  JointPoint g{Vec(n_), Vec(m_)};
  eval(z.x, z.y, g.x, g.y);
  return g;
}

GradientOracle GradientOracle::wrap(Index n, Index m, Kernel kernel) const {
  return GradientOracle(n, m, std::move(kernel), counter_, matvecs_);
}

JointPoint Rescaled::to_original(const JointPoint& z) const { return {scale * z.x, z.y / scale}; }

JointPoint Rescaled::from_original(const JointPoint& z) const {
  return {z.x / scale, scale * z.y};
}

Rescaled rescale(const GradientOracle& oracle, const SmoothnessParams& params) {
  params.validate();
  const double s = std::pow(params.L_y / params.L_x, 0.25);
  const double s2 = s * s;
  SmoothnessParams p = params;
  p.m_x = params.m_x * s2;
  p.L_x = params.L_x * s2;
  p.m_y = params.m_y / s2;
  p.L_y = params.L_y / s2;
  if (s == 1.0) return {oracle, params, 1.0};
  // L_x' and L_y' agree analytically; pin them so the equality is exact
  p.L_x = p.L_y = std::sqrt(params.L_x * params.L_y);
  auto inner = oracle.kernel();
  auto kernel = [inner, s](const Vec& x, const Vec& y, Vec& gx, Vec& gy) {
    inner(s * x, y / s, gx, gy);
    gx *= s;
    gy /= s;
  };
  return {oracle.wrap(oracle.n(), oracle.m(), kernel), p, s};
}

GradientOracle prox_augment_x(const GradientOracle& oracle, double beta, const Vec& x_hat) {
  if (x_hat.size() != oracle.n()) throw ConfigError("prox center dimension mismatch");
  if (!(beta >= 0)) throw ConfigError("prox weight must be nonnegative");
  auto inner = oracle.kernel();
  return oracle.wrap(oracle.n(), oracle.m(),
                     [inner, beta, x_hat](const Vec& x, const Vec& y, Vec& gx, Vec& gy) {
                       inner(x, y, gx, gy);
                       gx += (2 * beta) * (x - x_hat);
                     });
}

GradientOracle prox_augment_y(const GradientOracle& oracle, double beta, const Vec& y_hat) {
  if (y_hat.size() != oracle.m()) throw ConfigError("prox center dimension mismatch");
  if (!(beta >= 0)) throw ConfigError("prox weight must be nonnegative");
  auto inner = oracle.kernel();
  return oracle.wrap(oracle.n(), oracle.m(),
                     [inner, beta, y_hat](const Vec& x, const Vec& y, Vec& gx, Vec& gy) {
                       inner(x, y, gx, gy);
                       gy -= (2 * beta) * (y - y_hat);
                     });
}

GradientOracle flip_minmax(const GradientOracle& oracle) {
  auto inner = oracle.kernel();
  return oracle.wrap(oracle.m(), oracle.n(),
                     [inner](const Vec& yf, const Vec& xf, Vec& gyf, Vec& gxf) {
                       // flipped primal is the inner dual block and vice versa
                       inner(xf, yf, gxf, gyf);
                       gyf = -gyf;
                       gxf = -gxf;
                     });
}

JointPoint swap_blocks(const JointPoint& z) { return {z.y, z.x}; }

std::string to_string(Mode mode) {
  return mode == Mode::Theoretical ? "theoretical" : "practical";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ToleranceMet: return "ToleranceMet";
    case Termination::IterationCap: return "IterationCap";
    case Termination::PreconditionViolated: return "PreconditionViolated";
    case Termination::Diverged: return "Diverged";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "theoretical") return Mode::Theoretical;
  if (t == "practical") return Mode::Practical;
  throw ConfigError("unknown mode '" + s + "' (expected theoretical or practical)");
}

void Monitor::start(SolveReport& r, const JointPoint& z0_in, std::uint64_t count) const {
  const JointPoint z0 = transform ? transform(z0_in) : z0_in;
  if (record_iterates) r.iterates.push_back(z0);
  if (reference) {
    initial_error_ = (z0 - *reference).norm();
    r.error_history.push_back({count, initial_error_ > 0 ? 1.0 : 0.0});
  }
}

void Monitor::step(SolveReport& r, const JointPoint& z_in, std::uint64_t count) const {
  if (!record_iterates && !reference) return;
  const JointPoint z = transform ? transform(z_in) : z_in;
  if (record_iterates) r.iterates.push_back(z);
  if (reference) {
    const double e = (z - *reference).norm();
    r.error_history.push_back({count, initial_error_ > 0 ? e / initial_error_ : e});
  }
}

}  // namespace minimax
