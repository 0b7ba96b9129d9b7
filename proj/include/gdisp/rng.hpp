#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gdisp {

/// Seeded generator with a fixed, documented algorithm.
///
/// Raw bits come from std::mt19937_64, whose output sequence is pinned by the
/// C++ standard. Uniforms take the top 53 bits; Gaussians use the Box-Muller
/// transform, consuming two uniforms per pair and caching the second variate.
/// std::normal_distribution is avoided because its algorithm is
/// implementation-defined.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+box-muller/v1";

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1), safe to take the log of.
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal variate.
  double gaussian();

  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finaliser over (seed, stream); used to derive independent seeds
/// for repeats and time-reversed replays.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace gdisp
