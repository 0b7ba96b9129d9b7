#pragma once

#include <array>

#include <Eigen/Core>

#include "gdisp/lattice.hpp"

namespace gdisp {

template <typename Scalar>
using PatchCovariance = Eigen::Matrix<Scalar, 9, 9>;

/// Neighbour offsets (drow, dcol) in the fixed order NW, N, NE, W, E, SW, S, SE.
/// Patch vectors pile the 3x3 window row by row, so the centre is entry 4.
inline constexpr std::array<std::array<int, 2>, 9> kPatchOffsets{{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 0}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};
inline constexpr int kPatchCentre = 4;

/// Covariance summaries of 3x3 patches.
///
/// `rho` holds the covariances between the centre and its eight neighbours,
/// `sigma_minus` the covariances among the neighbours. The five scalars are the
/// entry sums ||.||_+ used by the metric; Kronecker sums come from
/// ||A (x) B||_+ = ||A||_+ ||B||_+, so no Kronecker product is ever formed.
template <typename Scalar>
struct PatchStats {
  Eigen::Matrix<Scalar, 8, 1> rho = Eigen::Matrix<Scalar, 8, 1>::Zero();
  Eigen::Matrix<Scalar, 8, 8> sigma_minus = Eigen::Matrix<Scalar, 8, 8>::Zero();
  Scalar s_rho{0};
  Scalar s_sig{0};
  Scalar s_rho_rho{0};
  Scalar s_rho_sig{0};
  Scalar s_sig_sig{0};
  /// Set when the source field was constant (all covariances zero).
  bool degenerate = false;

  /// Stats built from the two entry sums alone; rho/sigma_minus stay zero.
  /// Used for synthetic inputs and in the geometry tests.
  static PatchStats from_sums(Scalar s_rho, Scalar s_sig) {
    PatchStats out;
    out.s_rho = s_rho;
    out.s_sig = s_sig;
    out.fill_kronecker_sums();
    return out;
  }

  void fill_kronecker_sums() {
    s_rho_rho = s_rho * s_rho;
    s_rho_sig = s_rho * s_sig;
    s_sig_sig = s_sig * s_sig;
  }
};

using PatchStatsd = PatchStats<double>;

/// Population (1/N) covariance of the n*m toroidal 3x3 patch vectors.
PatchCovariance<double> patch_covariance(const FieldLattice& field);

/// Splits a 9x9 patch covariance into rho / sigma_minus and fills the sums.
template <typename Scalar>
PatchStats<Scalar> decompose_patch_covariance(const PatchCovariance<Scalar>& cov) {
  PatchStats<Scalar> out;
  int a = 0;
  for (int i = 0; i < 9; ++i) {
    if (i == kPatchCentre) continue;
    out.rho(a) = cov(kPatchCentre, i);
    int b = 0;
    for (int j = 0; j < 9; ++j) {
      if (j == kPatchCentre) continue;
      out.sigma_minus(a, b) = cov(i, j);
      ++b;
    }
    ++a;
  }
  out.s_rho = out.rho.sum();
  out.s_sig = out.sigma_minus.sum();
  out.fill_kronecker_sums();
  return out;
}

/// Patch statistics of one field outcome. A constant field yields all-zero
/// stats with `degenerate` set rather than an error.
PatchStatsd compute_patch_stats(const FieldLattice& field);

}  // namespace gdisp
