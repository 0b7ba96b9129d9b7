#pragma once

// Hand-rolled generators for the property tests. Each case draws from a
// fixed-seed engine so failures are reproducible by case index.

#include <cstdint>
#include <random>

#include "gdisp/patch_stats.hpp"
#include "gdisp/types.hpp"

namespace gdisp::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  ParamPointd theta() { return {uniform(-10, 10), uniform(0.2, 20), uniform(-0.6, 0.6)}; }

  /// Stats with an arbitrary symmetric PSD neighbour block and a matching rho,
  /// i.e. something a real field could produce.
  PatchStatsd stats() {
    Eigen::Matrix<double, 9, 9> a;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) a(i, j) = uniform(-1, 1);
    const double scale = uniform(0.1, 3.0);
    const Eigen::Matrix<double, 9, 9> cov = scale * a * a.transpose() / 9.0;
    return decompose_patch_covariance<double>(cov);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gdisp::testing
