#include "minimax/problems.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace minimax {

namespace {

Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

Mat rotate(const Vec& eigs, SplitMix64& rng) {
  const Mat q = random_orthogonal(eigs.size(), rng);
  return symmetrize(q * eigs.asDiagonal() * q.transpose());
}

Vec gaussian_vec(Index n, SplitMix64& rng) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

double QuadraticSaddle::value(const JointPoint& z) const {
  return 0.5 * z.x.dot(A * z.x) + z.x.dot(B * z.y) - 0.5 * z.y.dot(C * z.y) + u.dot(z.x) +
         v.dot(z.y);
}

Mat QuadraticSaddle::coupled_matrix() const {
  const Index n = this->n(), m = this->m();
  Mat J(n + m, n + m);
  J.topLeftCorner(n, n) = A;
  J.topRightCorner(n, m) = B;
  J.bottomLeftCorner(m, n) = -B.transpose();
  J.bottomRightCorner(m, m) = C;
  return J;
}

Vec QuadraticSaddle::coupled_rhs() const {
  Vec b(n() + m());
  b << -u, v;
  return b;
}

void QuadraticSaddle::check_shapes() const {
  const Index n = A.rows(), m = C.rows();
  if (n < 1 || m < 1) throw ConfigError("quadratic blocks must be nonempty");
  if (A.cols() != n || C.cols() != m) throw ConfigError("A and C must be square");
  if (B.rows() != n || B.cols() != m) throw ConfigError("B must be n x m");
  if (u.size() != n || v.size() != m) throw ConfigError("u, v lengths must match A, C");
  const double tol = 1e-12;
  if ((A - A.transpose()).norm() > tol * std::max(1.0, A.norm()))
    throw ConfigError("A must be symmetric");
  if ((C - C.transpose()).norm() > tol * std::max(1.0, C.norm()))
    throw ConfigError("C must be symmetric");
}

QuadraticSaddle flip_quadratic(const QuadraticSaddle& q) {
  return {q.C, -q.B.transpose(), q.A, -q.v, -q.u};
}

QuadraticSaddle rescale_quadratic(const QuadraticSaddle& q, double s) {
  return {s * s * q.A, q.B, q.C / (s * s), s * q.u, q.v / s};
}

std::string to_string(SpectrumShape s) {
  switch (s) {
    case SpectrumShape::Endpoints: return "Endpoints";
    case SpectrumShape::LogUniform: return "LogUniform";
    case SpectrumShape::Clustered: return "Clustered";
  }
  return "?";
}

SpectrumShape parse_spectrum(const std::string& s) {
  if (s == "Endpoints" || s == "endpoints") return SpectrumShape::Endpoints;
  if (s == "LogUniform" || s == "loguniform") return SpectrumShape::LogUniform;
  if (s == "Clustered" || s == "clustered") return SpectrumShape::Clustered;
  throw ConfigError("unknown spectrum shape '" + s + "'");
}

std::string to_string(CouplingLayout c) {
  return c == CouplingLayout::Aligned ? "Aligned" : "Random";
}

CouplingLayout parse_coupling(const std::string& s) {
  if (s == "Random" || s == "random") return CouplingLayout::Random;
  if (s == "Aligned" || s == "aligned") return CouplingLayout::Aligned;
  throw ConfigError("unknown coupling layout '" + s + "'");
}

void InstanceSpec::validate() const {
  if (n < 1 || m < 1) throw ConfigError("instance dimensions must be >= 1");
  params.validate();
  if (n == 1 && params.m_x != params.L_x)
    throw ConfigError("n = 1 cannot realize distinct m_x and L_x");
  if (m == 1 && params.m_y != params.L_y)
    throw ConfigError("m = 1 cannot realize distinct m_y and L_y");
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

Mat random_orthogonal(Index n, SplitMix64& rng) {
  Mat g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Vec spectrum_values(Index size, double lo, double hi, SpectrumShape shape, SplitMix64& rng) {
  Vec e(size);
  if (size == 1) {
    e[0] = hi;
    return e;
  }
  const double span = std::log(hi / lo);
  e[0] = lo;
  e[size - 1] = hi;
  for (Index i = 1; i + 1 < size; ++i) {
    double t = 0;
    switch (shape) {
      case SpectrumShape::Endpoints: t = static_cast<double>(i) / (size - 1); break;
      case SpectrumShape::LogUniform: t = rng.uniform(); break;
      case SpectrumShape::Clustered: t = 0.1 * rng.uniform(); break;
    }
    e[i] = lo * std::exp(t * span);
  }
  std::sort(e.data(), e.data() + size);
  e[0] = lo;
  e[size - 1] = hi;
  return e;
}

QuadraticSaddle make_quadratic(const InstanceSpec& spec) {
  spec.validate();
  const auto& p = spec.params;
  SplitMix64 rng(spec.seed);
  const Vec a = spectrum_values(spec.n, p.m_x, p.L_x, spec.spectrum, rng);
  const Mat Qa = random_orthogonal(spec.n, rng);
  const Vec c = spectrum_values(spec.m, p.m_y, p.L_y, spec.spectrum, rng);
  const Mat Qc = random_orthogonal(spec.m, rng);
  QuadraticSaddle q;
  q.A = symmetrize(Qa * a.asDiagonal() * Qa.transpose());
  q.C = symmetrize(Qc * c.asDiagonal() * Qc.transpose());

  // singular values between min(L_xy, m_x, m_y) and L_xy, ascending
  const Index k = std::min(spec.n, spec.m);
  const double low = std::min({p.L_xy, p.m_x, p.m_y});
  Vec sigma = Vec::Constant(k, p.L_xy);
  if (p.L_xy > 0 && k > 1) {
    if (spec.spectrum == SpectrumShape::Clustered) {
      sigma.setConstant(p.L_xy);
    } else {
      SplitMix64 spread(rng.next());
      sigma = spectrum_values(k, low, p.L_xy, spec.spectrum, spread);
    }
  }
  if (spec.coupling == CouplingLayout::Aligned) {
    q.B = Qa.leftCols(k) * sigma.asDiagonal() * Qc.leftCols(k).transpose();
  } else {
    const Mat U = random_orthogonal(spec.n, rng).leftCols(k);
    const Mat V = random_orthogonal(spec.m, rng).leftCols(k);
    q.B = U * sigma.asDiagonal() * V.transpose();
  }
  q.u = gaussian_vec(spec.n, rng);
  q.v = gaussian_vec(spec.m, rng);
  return q;
}

GradientOracle quadratic_oracle(const QuadraticSaddle& q) {
  q.check_shapes();
  auto data = std::make_shared<const QuadraticSaddle>(q);
  return GradientOracle(
      q.n(), q.m(),
      [data](const Vec& x, const Vec& y, Vec& gx, Vec& gy) {
        gx.noalias() = data->A * x;
        gx.noalias() += data->B * y;
        gx += data->u;
        gy.noalias() = data->B.transpose() * x;
        gy.noalias() -= data->C * y;
        gy += data->v;
      },
      4);
}

JointPoint direct_saddle(const QuadraticSaddle& q) {
  q.check_shapes();
  const Mat J = q.coupled_matrix();
  const Vec b = q.coupled_rhs();
  Eigen::PartialPivLU<Mat> lu(J);
  Vec z = lu.solve(b);
  z += lu.solve(b - J * z);  // one refinement step
  const double res = (J * z - b).norm();
  if (!z.allFinite() || res > 1e-10 * b.norm())
    throw InternalError("direct saddle solve failed (residual " + std::to_string(res) + ")");
  return JointPoint::split(z, q.n());
}

double duality_gap_raw(const QuadraticSaddle& q, const JointPoint& z) {
  const BestResponse br(q);
  const JointPoint primal{z.x, br.y_star_of_x(z.x)};
  const JointPoint dual{br.x_star_of_y(z.y), z.y};
  return q.value(primal) - q.value(dual);
}

double duality_gap(const QuadraticSaddle& q, const JointPoint& z) {
  return std::max(0.0, duality_gap_raw(q, z));
}

BestResponse::BestResponse(const QuadraticSaddle& q) : q_(&q), a_(q.A), c_(q.C) {
  if (a_.info() != Eigen::Success || c_.info() != Eigen::Success)
    throw ConfigError("A and C must be positive definite");
}

Vec BestResponse::x_star_of_y(const Vec& y) const { return a_.solve(-(q_->B * y + q_->u)); }

Vec BestResponse::y_star_of_x(const Vec& x) const {
  return c_.solve(q_->B.transpose() * x + q_->v);
}

QuadraticSaddle separable_instance(const Vec& a_eigs, const Vec& c_eigs, std::uint64_t seed) {
  if (a_eigs.size() < 1 || c_eigs.size() < 1) throw ConfigError("empty spectrum");
  if ((a_eigs.array() <= 0).any() || (c_eigs.array() <= 0).any())
    throw ConfigError("separable spectra must be positive");
  SplitMix64 rng(seed);
  QuadraticSaddle q;
  q.A = rotate(a_eigs, rng);
  q.C = rotate(c_eigs, rng);
  q.B = Mat::Zero(a_eigs.size(), c_eigs.size());
  q.u = gaussian_vec(a_eigs.size(), rng);
  q.v = gaussian_vec(c_eigs.size(), rng);
  return q;
}

SmoothnessParams measure_params(const QuadraticSaddle& q) {
  Eigen::SelfAdjointEigenSolver<Mat> ea(q.A, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Mat> ec(q.C, Eigen::EigenvaluesOnly);
  Eigen::JacobiSVD<Mat> sb(q.B);
  const auto& a = ea.eigenvalues();
  const auto& c = ec.eigenvalues();
  return {a[0], c[0], a[a.size() - 1], sb.singularValues()[0], c[c.size() - 1]};
}

SmoothnessParams LogBarrierSaddle::declared(const SmoothnessParams& base_params) const {
  SmoothnessParams p = base_params;
  p.m_x -= 2 * rho;
  p.L_x += 2 * rho;
  if (!(p.m_x > 0)) throw ConfigError("log-barrier weight too large for m_x");
  return p;
}

GradientOracle LogBarrierSaddle::oracle() const {
  auto inner = quadratic_oracle(base);
  auto kernel = inner.kernel();
  const double r = rho;
  // a fresh root: the wrapped quadratic kernel is called uncounted
  return GradientOracle(base.n(), base.m(),
                        [kernel, r](const Vec& x, const Vec& y, Vec& gx, Vec& gy) {
                          kernel(x, y, gx, gy);
                          gx.array() += 2 * r * x.array() / (1 + x.array().square());
                        });
}

JointPoint random_point(Index n, Index m, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return {gaussian_vec(n, rng), gaussian_vec(m, rng)};
}

void write_matrix_market(const std::filesystem::path& path, const Mat& a) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "%%MatrixMarket matrix array real general\n" << a.rows() << ' ' << a.cols() << '\n';
  char buf[40];
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", a(i, j));
      out << buf;
    }
}

Mat read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "array" ||
      lower(field) != "real")
    throw ConfigError(path.string() + ": expected a real array-format Matrix Market header");
  symmetry = lower(symmetry);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ConfigError(path.string() + ": unsupported symmetry '" + symmetry + "'");
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::istringstream dims(line);
  Index rows = 0, cols = 0;
  if (!(dims >> rows >> cols) || rows < 1 || cols < 1)
    throw ConfigError(path.string() + ": bad size line");
  Mat a = Mat::Zero(rows, cols);
  auto next = [&](double& v) {
    if (!(in >> v)) throw ConfigError(path.string() + ": truncated data");
  };
  for (Index j = 0; j < cols; ++j)
    for (Index i = symmetry == "symmetric" ? j : 0; i < rows; ++i) {
      next(a(i, j));
      if (symmetry == "symmetric") a(j, i) = a(i, j);
    }
  return a;
}

void write_instance(const std::filesystem::path& sidecar, const InstanceFile& inst) {
  inst.q.check_shapes();
  const auto dir = sidecar.parent_path();
  const std::string stem = sidecar.stem().string();
  nlohmann::json files;
  auto put = [&](const char* key, const Mat& a) {
    const std::string name = stem + "." + key + ".mtx";
    write_matrix_market(dir / name, a);
    files[key] = name;
  };
  put("A", inst.q.A);
  put("B", inst.q.B);
  put("C", inst.q.C);
  put("u", inst.q.u);
  put("v", inst.q.v);
  const auto& p = inst.params;
  nlohmann::json j{{"format", "minimax-quadratic"},
                   {"n", inst.q.n()},
                   {"m", inst.q.m()},
                   {"seed", inst.seed},
                   {"params",
                    {{"m_x", p.m_x}, {"m_y", p.m_y}, {"L_x", p.L_x}, {"L_xy", p.L_xy}, {"L_y", p.L_y}}},
                   {"files", files}};
  std::ofstream out(sidecar);
  if (!out) throw ConfigError("cannot write " + sidecar.string());
  out << j.dump(2) << '\n';
}

InstanceFile read_instance(const std::filesystem::path& sidecar) {
  std::ifstream in(sidecar);
  if (!in) throw ConfigError("cannot open " + sidecar.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(sidecar.string() + ": " + e.what());
  }
  auto field = [&](const nlohmann::json& obj, const char* key) -> const nlohmann::json& {
    if (!obj.contains(key)) throw ConfigError(sidecar.string() + ": missing field '" + key + "'");
    return obj.at(key);
  };
  InstanceFile inst;
  try {
    const auto& p = field(j, "params");
    inst.params = {field(p, "m_x").get<double>(), field(p, "m_y").get<double>(),
                   field(p, "L_x").get<double>(), field(p, "L_xy").get<double>(),
                   field(p, "L_y").get<double>()};
    inst.seed = j.value("seed", std::uint64_t{0});
    const auto& files = field(j, "files");
    const auto dir = sidecar.parent_path();
    auto load = [&](const char* key) { return read_matrix_market(dir / field(files, key).get<std::string>()); };
    inst.q.A = load("A");
    inst.q.B = load("B");
    inst.q.C = load("C");
    const Mat u = load("u"), v = load("v");
    if (u.cols() != 1 || v.cols() != 1) throw ConfigError("u and v must be column vectors");
    inst.q.u = u.col(0);
    inst.q.v = v.col(0);
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError(sidecar.string() + ": " + e.what());
  }
  inst.params.validate();
  inst.q.check_shapes();
  return inst;
}

}  // namespace minimax
