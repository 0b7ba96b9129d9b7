#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "gdisp/rng.hpp"
#include "gdisp/types.hpp"

namespace gdisp {

using LatticeValues = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One outcome of a pairwise isotropic GMRF on an n x m torus, together with
/// the generator state that will drive its next sweeps.
///
/// Boundaries wrap around, so every site has exactly eight neighbours.
/// Instances are independent values: copying a lattice copies its RNG state.
class FieldLattice {
 public:
  FieldLattice(LatticeValues values, std::uint64_t seed, Rng rng);

  int height() const { return static_cast<int>(values_.rows()); }
  int width() const { return static_cast<int>(values_.cols()); }
  std::uint64_t seed() const { return seed_; }

  const LatticeValues& values() const { return values_; }
  LatticeValues& values() { return values_; }
  Rng& rng() { return rng_; }

  /// Value at (row, col) with toroidal wrap for any integer offset.
  double wrapped(int row, int col) const;

  /// Sum over the eight neighbours of (row, col) of (x_j - mu).
  double centred_neighbour_sum(int row, int col, double mu) const;

  bool operator==(const FieldLattice&) const = default;

 private:
  LatticeValues values_;
  std::uint64_t seed_;
  Rng rng_;
};

/// i.i.d. Normal(mu, sigma2) draws on an n x m torus. Requires n, m >= 3.
FieldLattice init_field(int n, int m, const ParamPointd& theta, std::uint64_t seed);

/// Redraws every site i.i.d. from Normal(mu, sigma2), continuing the lattice's
/// own generator stream.
void reinitialize(FieldLattice& field, const ParamPointd& theta);

/// Local conditional density p(x | eta, theta): Gaussian with mean
/// mu + beta * neighbour_sum_centred and variance sigma2.
double local_conditional_density(double x, double neighbour_sum_centred, const ParamPointd& theta);

/// How a proposal drawn independently from Normal(mu, sigma2) is accepted.
///
/// `hastings` uses p(y)q(x) / (p(x)q(y)) and leaves the GMRF conditional
/// invariant. `metropolis` uses the bare ratio p(y) / p(x); since the proposal
/// is not symmetric, its stationary conditional is Normal(mu + beta s / 2,
/// sigma2 / 2) rather than the model's.
enum class AcceptanceRule { hastings, metropolis };

std::string to_string(AcceptanceRule rule);
AcceptanceRule acceptance_rule_from_string(const std::string& text);

/// Acceptance probability for replacing `current` with `proposal`.
double acceptance_probability(double current, double proposal, double neighbour_sum_centred,
                              const ParamPointd& theta,
                              AcceptanceRule rule = AcceptanceRule::hastings);

/// In-place raster-order sweeps with independence proposals.
void run_sweeps(FieldLattice& field, const ParamPointd& theta, int n_sweeps,
                AcceptanceRule rule = AcceptanceRule::hastings);

inline FieldLattice metropolis_sweep(FieldLattice field, const ParamPointd& theta, int n_sweeps,
                                     AcceptanceRule rule = AcceptanceRule::hastings) {
  run_sweeps(field, theta, n_sweeps, rule);
  return field;
}

/// Debug dump: `<stem>.csv` (row-major values) and `<stem>.json` sidecar
/// holding n, m, seed and theta.
void dump_lattice(const FieldLattice& field, const ParamPointd& theta,
                  const std::filesystem::path& stem);

}  // namespace gdisp
