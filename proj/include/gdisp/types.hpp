#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "gdisp/error.hpp"

namespace gdisp {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

/// Neighbourhood cardinality of the second-order (3x3) system.
inline constexpr int kNeighbourCount = 8;

/// Position (mu, sigma^2, beta) on the parametric manifold.
template <typename Scalar>
struct ParamPoint {
  Scalar mu{0};
  Scalar sigma2{1};
  Scalar beta{0};

  Vec3<Scalar> vector() const { return {mu, sigma2, beta}; }
  static ParamPoint from_vector(const Vec3<Scalar>& v) { return {v(0), v(1), v(2)}; }

  bool operator==(const ParamPoint&) const = default;
};

/// Velocity in the (mu, sigma^2, beta) coordinate directions.
template <typename Scalar>
struct TangentVector {
  Scalar a1{0};
  Scalar a2{0};
  Scalar a3{0};

  Vec3<Scalar> vector() const { return {a1, a2, a3}; }
  static TangentVector from_vector(const Vec3<Scalar>& v) { return {v(0), v(1), v(2)}; }

  bool operator==(const TangentVector&) const = default;
};

using ParamPointd = ParamPoint<double>;
using TangentVectord = TangentVector<double>;

template <typename Scalar>
void require_positive_variance(const ParamPoint<Scalar>& theta) {
  using std::isfinite;
  if (!(theta.sigma2 > Scalar(0)) || !isfinite(static_cast<double>(theta.sigma2))) {
    throw InvalidParameter("sigma2 must be positive and finite, got " +
                           std::to_string(static_cast<double>(theta.sigma2)));
  }
}

}  // namespace gdisp
