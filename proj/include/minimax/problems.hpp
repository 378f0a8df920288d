#pragma once

#include "minimax/core.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

namespace minimax {

// f(x, y) = 1/2 x'Ax + x'By - 1/2 y'Cy + u'x + v'y
struct QuadraticSaddle {
  Mat A;
  Mat B;
  Mat C;
  Vec u;
  Vec v;

  Index n() const { return A.rows(); }
  Index m() const { return C.rows(); }
  double value(const JointPoint& z) const;
  // J = [[A, B], [-B', C]], rhs = [-u; v]; the saddle solves J z = rhs
  Mat coupled_matrix() const;
  Vec coupled_rhs() const;
  // throws ConfigError when shapes disagree or A, C are not symmetric
  void check_shapes() const;
};

// min_y max_x of -f, i.e. blocks swapped: A' = C, B' = -B', C' = A, u' = -v, v' = -u
QuadraticSaddle flip_quadratic(const QuadraticSaddle& q);
// same map as core::rescale with x scale s
QuadraticSaddle rescale_quadratic(const QuadraticSaddle& q, double s);

enum class SpectrumShape { Endpoints, LogUniform, Clustered };
std::string to_string(SpectrumShape s);
SpectrumShape parse_spectrum(const std::string& s);

// Random: independent orthogonal factors for A, B, C. Aligned: B couples the
// i-th smallest eigenvector of A to the i-th smallest of C through its i-th
// smallest singular value, so weakly curved directions are also weakly coupled.
enum class CouplingLayout { Random, Aligned };
std::string to_string(CouplingLayout c);
CouplingLayout parse_coupling(const std::string& s);

struct InstanceSpec {
  Index n = 1;
  Index m = 1;
  SmoothnessParams params;
  std::uint64_t seed = 0;
  SpectrumShape spectrum = SpectrumShape::Endpoints;
  CouplingLayout coupling = CouplingLayout::Random;

  void validate() const;
};

// SplitMix64: word k of stream `seed` is mix(seed + k * golden), so any draw is
// addressable by its counter.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();  // in [0, 1), 53 bits
  double normal();   // Box-Muller

 private:
  std::uint64_t state_;
  double spare_ = 0;
  bool has_spare_ = false;
};

// Haar-like orthogonal factor: Q of a seeded Gaussian matrix, columns signed so
// that diag(R) > 0.
Mat random_orthogonal(Index n, SplitMix64& rng);

// Eigenvalues in [lo, hi] for the given shape, sorted ascending. For size >= 2
// both extremes appear exactly.
Vec spectrum_values(Index size, double lo, double hi, SpectrumShape shape, SplitMix64& rng);

QuadraticSaddle make_quadratic(const InstanceSpec& spec);
GradientOracle quadratic_oracle(const QuadraticSaddle& q);
JointPoint direct_saddle(const QuadraticSaddle& q);
// nonnegative gap max_y f(x, .) - min_x f(., y)
double duality_gap(const QuadraticSaddle& q, const JointPoint& z);
double duality_gap_raw(const QuadraticSaddle& q, const JointPoint& z);

class BestResponse {
 public:
  explicit BestResponse(const QuadraticSaddle& q);
  Vec x_star_of_y(const Vec& y) const;  // argmin_x f(x, y)
  Vec y_star_of_x(const Vec& x) const;  // argmax_y f(x, y)

 private:
  const QuadraticSaddle* q_;
  Eigen::LLT<Mat> a_;
  Eigen::LLT<Mat> c_;
};

// B = 0 instance with A, C having the given eigenvalues (rotated by seeded
// orthogonal factors) and seeded linear terms.
QuadraticSaddle separable_instance(const Vec& a_eigs, const Vec& c_eigs, std::uint64_t seed);

// Extreme spectral values measured by dense decomposition.
SmoothnessParams measure_params(const QuadraticSaddle& q);

// f + sum_i rho * log(1 + x_i^2). Its x-Hessian moves by at most 2 rho either
// way, so the declared params widen by 2 rho.
struct LogBarrierSaddle {
  QuadraticSaddle base;
  double rho = 0;

  SmoothnessParams declared(const SmoothnessParams& base_params) const;
  GradientOracle oracle() const;
};

// Random initial point (standard Gaussian entries) from a seed.
JointPoint random_point(Index n, Index m, std::uint64_t seed);

// Matrix Market array format, real general.
void write_matrix_market(const std::filesystem::path& path, const Mat& a);
Mat read_matrix_market(const std::filesystem::path& path);

struct InstanceFile {
  QuadraticSaddle q;
  SmoothnessParams params;
  std::uint64_t seed = 0;
};

// Writes A.mtx, B.mtx, C.mtx, u.mtx, v.mtx next to a JSON sidecar holding
// params, seed and file names.
void write_instance(const std::filesystem::path& sidecar, const InstanceFile& inst);
InstanceFile read_instance(const std::filesystem::path& sidecar);

}  // namespace minimax
