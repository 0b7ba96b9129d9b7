#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "gdisp/patch_stats.hpp"
#include "gdisp/types.hpp"

// Geometry of the (mu, sigma^2, beta) manifold of pairwise isotropic GMRFs on
// a second-order neighbourhood. Coordinates are indexed 0 = mu, 1 = sigma^2,
// 2 = beta throughout. Every function is a pure function of its arguments and
// is templated on the scalar type.

namespace gdisp {

/// Default diagonal regulariser applied before inverting the metric.
inline constexpr double kDefaultLambda = 1e-3;

/// Block-determinant threshold below which the metric counts as singular.
inline constexpr double kSingularThreshold = 1e-12;

template <typename Scalar>
struct MetricTensor {
  Mat3<Scalar> g = Mat3<Scalar>::Zero();

  /// Quadratic form g(v, v).
  Scalar speed2(const Vec3<Scalar>& v) const { return v.dot(g * v); }
};

template <typename Scalar>
struct InverseMetric {
  Mat3<Scalar> ginv = Mat3<Scalar>::Zero();
  Scalar lambda_reg{0};
};

/// d g / d sigma^2 and d g / d beta. d g / d mu vanishes identically.
template <typename Scalar>
struct MetricDerivatives {
  Mat3<Scalar> d_sigma2 = Mat3<Scalar>::Zero();
  Mat3<Scalar> d_beta = Mat3<Scalar>::Zero();

  /// d g / d theta_k for k = 0, 1, 2.
  Mat3<Scalar> along(int k) const {
    if (k == 1) return d_sigma2;
    if (k == 2) return d_beta;
    return Mat3<Scalar>::Zero();
  }
};

/// Christoffel symbols of the second kind: gamma[k](i, j) = Gamma^k_ij.
template <typename Scalar>
struct ChristoffelTensor {
  std::array<Mat3<Scalar>, 3> gamma{Mat3<Scalar>::Zero(), Mat3<Scalar>::Zero(),
                                    Mat3<Scalar>::Zero()};

  /// Geodesic acceleration a_k = -alpha^T Gamma^k alpha.
  Vec3<Scalar> acceleration(const Vec3<Scalar>& alpha) const {
    return {-alpha.dot(gamma[0] * alpha), -alpha.dot(gamma[1] * alpha),
            -alpha.dot(gamma[2] * alpha)};
  }
};

template <typename Scalar>
struct EntropyTriple {
  Scalar value{0};       // H_beta
  Scalar d_beta{0};      // dH/dbeta
  Scalar d2_beta{0};     // d2H/dbeta2
};

template <typename Scalar>
struct CurvatureReport {
  Mat3<Scalar> second_form = Mat3<Scalar>::Zero();
  Mat3<Scalar> shape_operator = Mat3<Scalar>::Zero();
  Scalar gaussian_curvature{0};
  Scalar mean_curvature{0};
  /// Real parts of the shape-operator eigenvalues.
  Vec3<Scalar> principal_curvatures = Vec3<Scalar>::Zero();
  bool complex_principal = false;
  Scalar entropy{0};
  Scalar d_entropy{0};
  Scalar d2_entropy{0};
};

namespace detail {

template <typename Scalar>
struct Powers {
  Scalar s2, s4, s6, s8, s10;
  explicit Powers(Scalar sigma2)
      : s2(sigma2),
        s4(sigma2 * sigma2),
        s6(s4 * sigma2),
        s8(s4 * s4),
        s10(s8 * sigma2) {}
};

}  // namespace detail

/// Metric tensor from the Kronecker-form component formulas. Only g11, g22,
/// g23 = g32 and g33 are nonzero.
template <typename Scalar>
MetricTensor<Scalar> metric_tensor(const ParamPoint<Scalar>& theta, const PatchStats<Scalar>& st) {
  require_positive_variance(theta);
  const Scalar b = theta.beta;
  const Scalar delta = kNeighbourCount;
  const detail::Powers<Scalar> p(theta.sigma2);
  const Scalar one_minus = Scalar(1) - b * delta;
  const Scalar corr = Scalar(2) * b * st.s_rho - b * b * st.s_sig;

  MetricTensor<Scalar> out;
  auto& g = out.g;
  g(0, 0) = one_minus * one_minus / p.s2 * (Scalar(1) - corr / p.s2);
  g(1, 1) = Scalar(1) / (Scalar(2) * p.s4) - corr / p.s6 +
            (Scalar(3) * b * b * st.s_rho_rho - Scalar(3) * b * b * b * st.s_rho_sig +
             Scalar(3) * b * b * b * b * st.s_sig_sig) /
                p.s8;
  g(1, 2) = (st.s_rho - b * st.s_sig) / p.s4 -
            (Scalar(6) * b * st.s_rho_rho - Scalar(9) * b * b * st.s_rho_sig +
             Scalar(3) * b * b * b * st.s_sig_sig) /
                (Scalar(2) * p.s6);
  g(2, 1) = g(1, 2);
  g(2, 2) = st.s_sig / p.s2 +
            (Scalar(2) * st.s_rho_rho - Scalar(6) * b * st.s_rho_sig +
             Scalar(3) * b * b * st.s_sig_sig) /
                p.s4;
  return out;
}

/// Closed-form inverse of (g + lambda I), exploiting the decoupled mu row.
template <typename Scalar>
InverseMetric<Scalar> inverse_metric(const MetricTensor<Scalar>& metric, Scalar lambda_reg) {
  using std::abs;
  if (!(lambda_reg >= Scalar(0))) throw InvalidParameter("lambda_reg must be >= 0");
  const Mat3<Scalar> a = metric.g + lambda_reg * Mat3<Scalar>::Identity();
  const Scalar det = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  if (abs(det) < Scalar(kSingularThreshold) || abs(a(0, 0)) < Scalar(kSingularThreshold)) {
    throw SingularMetric("metric is singular after regularisation (lambda = " +
                         std::to_string(static_cast<double>(lambda_reg)) + ")");
  }
  InverseMetric<Scalar> out;
  out.lambda_reg = lambda_reg;
  out.ginv(0, 0) = Scalar(1) / a(0, 0);
  out.ginv(1, 1) = a(2, 2) / det;
  out.ginv(1, 2) = -a(1, 2) / det;
  out.ginv(2, 1) = out.ginv(1, 2);
  out.ginv(2, 2) = a(1, 1) / det;
  return out;
}

/// Analytic partial derivatives of the metric with the patch stats held fixed.
template <typename Scalar>
MetricDerivatives<Scalar> metric_derivatives(const ParamPoint<Scalar>& theta,
                                             const PatchStats<Scalar>& st) {
  require_positive_variance(theta);
  const Scalar b = theta.beta;
  const Scalar delta = kNeighbourCount;
  const detail::Powers<Scalar> p(theta.sigma2);
  const Scalar one_minus = Scalar(1) - b * delta;
  const Scalar sq = one_minus * one_minus;
  const Scalar corr = Scalar(2) * b * st.s_rho - b * b * st.s_sig;
  const Scalar quartic = Scalar(3) * b * b * st.s_rho_rho - Scalar(3) * b * b * b * st.s_rho_sig +
                         Scalar(3) * b * b * b * b * st.s_sig_sig;
  const Scalar cubic = Scalar(6) * b * st.s_rho_rho - Scalar(9) * b * b * st.s_rho_sig +
                       Scalar(3) * b * b * b * st.s_sig_sig;
  const Scalar quad33 = Scalar(2) * st.s_rho_rho - Scalar(6) * b * st.s_rho_sig +
                        Scalar(3) * b * b * st.s_sig_sig;

  MetricDerivatives<Scalar> out;
  auto& ds = out.d_sigma2;
  ds(0, 0) = -sq / p.s4 + Scalar(2) * sq * corr / p.s6;
  ds(1, 1) = Scalar(-1) / p.s6 + Scalar(3) * corr / p.s8 - Scalar(4) * quartic / p.s10;
  ds(1, 2) = Scalar(-2) * (st.s_rho - b * st.s_sig) / p.s6 + Scalar(3) * cubic / (Scalar(2) * p.s8);
  ds(2, 1) = ds(1, 2);
  ds(2, 2) = -st.s_sig / p.s4 - Scalar(2) * quad33 / p.s6;

  auto& db = out.d_beta;
  db(0, 0) = -Scalar(2) * delta * one_minus / p.s2 * (Scalar(1) - corr / p.s2) -
             sq / p.s4 * (Scalar(2) * st.s_rho - Scalar(2) * b * st.s_sig);
  db(1, 1) = -(Scalar(2) * st.s_rho - Scalar(2) * b * st.s_sig) / p.s6 +
             (Scalar(6) * b * st.s_rho_rho - Scalar(9) * b * b * st.s_rho_sig +
              Scalar(12) * b * b * b * st.s_sig_sig) /
                 p.s8;
  db(1, 2) = -st.s_sig / p.s4 -
             (Scalar(6) * st.s_rho_rho - Scalar(18) * b * st.s_rho_sig +
              Scalar(9) * b * b * st.s_sig_sig) /
                 (Scalar(2) * p.s6);
  db(2, 1) = db(1, 2);
  // Exact beta-derivative of g33 as written in metric_tensor().
  db(2, 2) = -(Scalar(6) * st.s_rho_sig - Scalar(6) * b * st.s_sig_sig) / p.s4;
  return out;
}

/// The 14 nonzero Christoffel symbols from their closed forms; the other 13
/// are structurally zero because g does not depend on mu and g couples mu to
/// nothing.
template <typename Scalar>
ChristoffelTensor<Scalar> christoffel_symbols(const InverseMetric<Scalar>& inv,
                                              const MetricDerivatives<Scalar>& dg) {
  const auto& gi = inv.ginv;
  const Scalar half{0.5};
  const Scalar d2g11 = dg.d_sigma2(0, 0), d3g11 = dg.d_beta(0, 0);
  const Scalar d2g22 = dg.d_sigma2(1, 1), d3g22 = dg.d_beta(1, 1);
  const Scalar d2g23 = dg.d_sigma2(1, 2), d3g32 = dg.d_beta(2, 1);
  const Scalar d2g33 = dg.d_sigma2(2, 2), d3g33 = dg.d_beta(2, 2);

  ChristoffelTensor<Scalar> out;
  auto& g1 = out.gamma[0];
  auto& g2 = out.gamma[1];
  auto& g3 = out.gamma[2];

  g2(0, 0) = -half * (d2g11 * gi(1, 1) + d3g11 * gi(2, 1));
  g3(0, 0) = -half * (d2g11 * gi(1, 2) + d3g11 * gi(2, 2));

  g1(0, 1) = g1(1, 0) = half * d2g11 * gi(0, 0);
  g1(0, 2) = g1(2, 0) = half * d3g11 * gi(0, 0);

  const Scalar c22 = Scalar(2) * d2g23 - d3g22;
  g2(1, 1) = half * (d2g22 * gi(1, 1) + c22 * gi(2, 1));
  g3(1, 1) = half * (d2g22 * gi(1, 2) + c22 * gi(2, 2));

  g2(1, 2) = g2(2, 1) = half * (d3g22 * gi(1, 1) + d2g33 * gi(2, 1));
  g3(1, 2) = g3(2, 1) = half * (d3g22 * gi(1, 2) + d2g33 * gi(2, 2));

  const Scalar c33 = Scalar(2) * d3g32 - d2g33;
  g2(2, 2) = half * (c33 * gi(1, 1) + d3g33 * gi(2, 1));
  g3(2, 2) = half * (c33 * gi(1, 2) + d3g33 * gi(2, 2));
  return out;
}

template <typename Scalar>
ChristoffelTensor<Scalar> christoffel_symbols(const MetricTensor<Scalar>& /*metric*/,
                                              const InverseMetric<Scalar>& inv,
                                              const MetricDerivatives<Scalar>& dg) {
  return christoffel_symbols(inv, dg);
}

/// Gaussian entropy H_G = 1/2 ln(2 pi e sigma^2).
template <typename Scalar>
Scalar gaussian_entropy(Scalar sigma2) {
  using std::log;
  return Scalar(0.5) * log(Scalar(2) * std::numbers::pi_v<Scalar> * std::numbers::e_v<Scalar> * sigma2);
}

/// Entropy H_beta of the local conditional model and its beta derivatives.
template <typename Scalar>
EntropyTriple<Scalar> entropy(const ParamPoint<Scalar>& theta, const PatchStats<Scalar>& st) {
  require_positive_variance(theta);
  const Scalar b = theta.beta;
  const Scalar s2 = theta.sigma2;
  EntropyTriple<Scalar> out;
  out.value = gaussian_entropy(s2) - (b * st.s_rho - b * b / Scalar(2) * st.s_sig) / s2;
  out.d_beta = -(st.s_rho - b * st.s_sig) / s2;
  out.d2_beta = st.s_sig / s2;
  return out;
}

/// Second-order Fisher information. The (sigma^2, beta) and (beta, beta)
/// entries are taken from the entropy derivatives, which they equal; the mu
/// row mirrors the metric's zero pattern.
template <typename Scalar>
Mat3<Scalar> second_fundamental_form(const ParamPoint<Scalar>& theta, const PatchStats<Scalar>& st,
                                     const EntropyTriple<Scalar>& h) {
  const Scalar b = theta.beta;
  const detail::Powers<Scalar> p(theta.sigma2);
  const Scalar one_minus = Scalar(1) - b * Scalar(kNeighbourCount);
  Mat3<Scalar> ii = Mat3<Scalar>::Zero();
  ii(0, 0) = one_minus * one_minus / p.s2;
  ii(1, 1) = Scalar(1) / (Scalar(2) * p.s4) - (Scalar(2) * b * st.s_rho - b * b * st.s_sig) / p.s6;
  ii(1, 2) = ii(2, 1) = -h.d_beta / p.s2;
  ii(2, 2) = h.d2_beta;
  return ii;
}

/// Shape operator P = -II (I)^{-1} and its invariants, given an explicit
/// inverse of the first fundamental form.
template <typename Scalar>
CurvatureReport<Scalar> shape_operator_report(const Mat3<Scalar>& second_form,
                                              const Mat3<Scalar>& first_form_inverse) {
  CurvatureReport<Scalar> out;
  out.second_form = second_form;
  out.shape_operator = -second_form * first_form_inverse;
  out.gaussian_curvature = out.shape_operator.determinant();
  out.mean_curvature = out.shape_operator.trace();

  Eigen::EigenSolver<Mat3<Scalar>> solver(out.shape_operator, /*computeEigenvectors=*/false);
  const auto ev = solver.eigenvalues();
  const Scalar scale = std::max(Scalar(1), out.shape_operator.cwiseAbs().maxCoeff());
  for (int i = 0; i < 3; ++i) {
    out.principal_curvatures(i) = ev(i).real();
    using std::abs;
    if (abs(ev(i).imag()) > Scalar(1e-12) * scale) out.complex_principal = true;
  }
  return out;
}

/// Full curvature record at theta: II, P = -II (g + lambda I)^{-1}, its
/// invariants and the entropy triple.
template <typename Scalar>
CurvatureReport<Scalar> curvature_report(const ParamPoint<Scalar>& theta,
                                         const PatchStats<Scalar>& st,
                                         Scalar lambda_reg = Scalar(kDefaultLambda)) {
  const auto h = entropy(theta, st);
  const auto inv = inverse_metric(metric_tensor(theta, st), lambda_reg);
  auto out = shape_operator_report(second_fundamental_form(theta, st, h), inv.ginv);
  out.entropy = h.value;
  out.d_entropy = h.d_beta;
  out.d2_entropy = h.d2_beta;
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian submanifold (beta = 0, independent sites).

/// Embedded 2D metric diag(1/sigma^2, 1/(2 sigma^4), 0).
template <typename Scalar>
MetricTensor<Scalar> gaussian_metric(Scalar sigma2) {
  MetricTensor<Scalar> out;
  out.g(0, 0) = Scalar(1) / sigma2;
  out.g(1, 1) = Scalar(1) / (Scalar(2) * sigma2 * sigma2);
  return out;
}

/// Exact inverse on the (mu, sigma^2) block; the beta row stays zero.
template <typename Scalar>
InverseMetric<Scalar> gaussian_inverse_metric(Scalar sigma2) {
  InverseMetric<Scalar> out;
  out.ginv(0, 0) = sigma2;
  out.ginv(1, 1) = Scalar(2) * sigma2 * sigma2;
  return out;
}

template <typename Scalar>
MetricDerivatives<Scalar> gaussian_metric_derivatives(Scalar sigma2) {
  MetricDerivatives<Scalar> out;
  out.d_sigma2(0, 0) = Scalar(-1) / (sigma2 * sigma2);
  out.d_sigma2(1, 1) = Scalar(-1) / (sigma2 * sigma2 * sigma2);
  return out;
}

/// Closed-form Christoffel symbols of the Gaussian submanifold:
/// Gamma^1_12 = -1/(2 sigma^2), Gamma^2_11 = 1, Gamma^2_22 = -1/sigma^2.
template <typename Scalar>
ChristoffelTensor<Scalar> gaussian_christoffel(Scalar sigma2) {
  ChristoffelTensor<Scalar> out;
  out.gamma[0](0, 1) = out.gamma[0](1, 0) = Scalar(-1) / (Scalar(2) * sigma2);
  out.gamma[1](0, 0) = Scalar(1);
  out.gamma[1](1, 1) = Scalar(-1) / sigma2;
  return out;
}

/// Shape-operator curvature of the Gaussian submanifold restricted to the
/// (mu, sigma^2) plane, where II coincides with the metric.
template <typename Scalar>
CurvatureReport<Scalar> gaussian_curvature_report(Scalar sigma2) {
  const auto g = gaussian_metric(sigma2).g;
  const Eigen::Matrix<Scalar, 2, 2> ii = g.template topLeftCorner<2, 2>();
  const Eigen::Matrix<Scalar, 2, 2> inv = gaussian_inverse_metric(sigma2).ginv.template topLeftCorner<2, 2>();
  const Eigen::Matrix<Scalar, 2, 2> shape = -ii * inv;

  CurvatureReport<Scalar> out;
  out.second_form = g;
  out.shape_operator.template topLeftCorner<2, 2>() = shape;
  out.gaussian_curvature = shape.determinant();
  out.mean_curvature = shape.trace();
  out.principal_curvatures << shape(0, 0), shape(1, 1), Scalar(0);
  out.entropy = gaussian_entropy(sigma2);
  return out;
}

}  // namespace gdisp
