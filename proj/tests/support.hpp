#pragma once

#include "minimax/core.hpp"
#include "minimax/problems.hpp"

#include <cstdlib>
#include <filesystem>
#include <string>

namespace testing_support {

using namespace minimax;

inline QuadraticSaddle seeded(Index n, Index m, SmoothnessParams p, std::uint64_t seed,
                              SpectrumShape shape = SpectrumShape::Endpoints) {
  InstanceSpec s;
  s.n = n;
  s.m = m;
  s.params = p;
  s.seed = seed;
  s.spectrum = shape;
  return make_quadratic(s);
}

inline double rel_error(const JointPoint& z, const JointPoint& z_star, const JointPoint& z0) {
  return (z - z_star).norm() / (z0 - z_star).norm();
}

inline GradientOracle zero_oracle(Index n, Index m) {
  return GradientOracle(n, m, [](const Vec& x, const Vec& y, Vec& gx, Vec& gy) {
    gx = Vec::Zero(x.size());
    gy = Vec::Zero(y.size());
  });
}

// per-test scratch directory under the build tree (or /tmp)
inline std::filesystem::path scratch(const std::string& name) {
  const char* root = std::getenv("MINIMAX_SCRATCH");
  std::filesystem::path p = root ? root : std::filesystem::temp_directory_path() / "minimax-tests";
  p /= name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing_support
