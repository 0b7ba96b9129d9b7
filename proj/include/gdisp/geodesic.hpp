#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gdisp/info_geometry.hpp"
#include "gdisp/lattice.hpp"
#include "gdisp/types.hpp"

namespace gdisp {

enum class Mode { random_field, gaussian_analytic };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& text);

/// When the Christoffel symbols are evaluated inside an RK4 step. `per_step`
/// computes them once at the start of each step and holds them across the
/// four stages, which makes the scheme first order in h. `per_stage`
/// re-evaluates them at every stage position (classical fourth-order RK4) and
/// is only available where they are cheap, i.e. in gaussian_analytic mode.
enum class ChristoffelUpdate { per_step, per_stage };

std::string to_string(ChristoffelUpdate update);
ChristoffelUpdate christoffel_update_from_string(const std::string& text);

struct IntegratorConfig {
  double t_start = 0.0;
  double t_end = 10.0;
  int n_steps = 1000;
  int lattice_n = 128;
  int lattice_m = 128;
  int mcmc_sweeps = 100;
  std::uint64_t seed = 0;
  double lambda_reg = kDefaultLambda;
  Mode mode = Mode::random_field;
  bool warm_start = true;
  double sigma2_floor = 1e-3;
  AcceptanceRule acceptance = AcceptanceRule::hastings;
  ChristoffelUpdate christoffel_update = ChristoffelUpdate::per_step;

  double step() const { return (t_end - t_start) / n_steps; }

  /// Throws InvalidParameter when h <= 0, n_steps < 1, sigma2_floor <= 0 etc.
  void validate() const;

  bool operator==(const IntegratorConfig&) const = default;
};

struct TraceRecord {
  double t = 0.0;
  ParamPointd theta;
  TangentVectord alpha;
  double entropy = 0.0;
  double curvature = 0.0;
  /// Coordinate arc length sum ||alpha|| h accumulated before this record.
  double arc_length = 0.0;
  /// Metric arc length sum sqrt(alpha^T g alpha) h accumulated before this record.
  double metric_length = 0.0;
};

/// Records at t_start and after every completed step (n_steps + 1 rows for a
/// full run).
struct GeodesicTrace {
  Mode mode = Mode::random_field;
  std::vector<TraceRecord> steps;
  double total_length = 0.0;
  double total_metric_length = 0.0;
  bool terminated_early = false;
  std::string reason;

  const TraceRecord& front() const { return steps.front(); }
  const TraceRecord& back() const { return steps.back(); }
};

/// Classical RK4 step of gamma' = alpha, alpha'_k = -alpha^T Gamma^k(gamma) alpha,
/// where `christoffel_at(position)` supplies the symbols at each stage.
template <typename Scalar, typename ChristoffelField>
std::pair<Vec3<Scalar>, Vec3<Scalar>> rk4_advance(const Vec3<Scalar>& position,
                                                  const Vec3<Scalar>& velocity,
                                                  ChristoffelField&& christoffel_at, Scalar h) {
  auto accel = [&](const Vec3<Scalar>& x, const Vec3<Scalar>& v) {
    return christoffel_at(x).acceleration(v);
  };
  const Scalar half = h / Scalar(2);

  const Vec3<Scalar> k1x = velocity;
  const Vec3<Scalar> k1v = accel(position, velocity);
  const Vec3<Scalar> k2x = velocity + half * k1v;
  const Vec3<Scalar> k2v = accel(position + half * k1x, k2x);
  const Vec3<Scalar> k3x = velocity + half * k2v;
  const Vec3<Scalar> k3v = accel(position + half * k2x, k3x);
  const Vec3<Scalar> k4x = velocity + h * k3v;
  const Vec3<Scalar> k4v = accel(position + h * k3x, k4x);

  const Scalar sixth = h / Scalar(6);
  return {position + sixth * (k1x + Scalar(2) * k2x + Scalar(2) * k3x + k4x),
          velocity + sixth * (k1v + Scalar(2) * k2v + Scalar(2) * k3v + k4v)};
}

/// One RK4 step with the Christoffel tensor held fixed across all four stages.
template <typename Scalar>
std::pair<ParamPoint<Scalar>, TangentVector<Scalar>> rk4_step(
    const ParamPoint<Scalar>& theta, const TangentVector<Scalar>& alpha,
    const ChristoffelTensor<Scalar>& gamma, Scalar h) {
  if (!(h > Scalar(0))) throw InvalidParameter("step size must be positive");
  const auto [x, v] = rk4_advance<Scalar>(
      theta.vector(), alpha.vector(), [&](const Vec3<Scalar>&) -> const auto& { return gamma; }, h);
  using std::isfinite;
  if (!x.allFinite() || !v.allFinite()) throw NonfiniteState("RK4 step produced a non-finite state");
  return {ParamPoint<Scalar>::from_vector(x), TangentVector<Scalar>::from_vector(v)};
}

/// Integrates a geodesic from (theta0, alpha0) over [t_start, t_end].
///
/// random_field: each outer iteration brings a lattice to the current theta
/// by MCMC (warm or cold start), estimates patch stats, and evaluates metric,
/// regularised inverse, derivatives and Christoffel symbols; those symbols
/// stay fixed across the four RK4 stages.
///
/// gaussian_analytic: beta is pinned at 0 and the closed-form submanifold
/// symbols are used, once per step or at every stage per christoffel_update.
///
/// A run that leaves the domain (sigma^2 <= sigma2_floor, non-finite state,
/// singular metric) stops early and returns the partial trace.
GeodesicTrace integrate_geodesic(const IntegratorConfig& config, const ParamPointd& theta0,
                                 const TangentVectord& alpha0);

/// Time-reversed replay: starts at the forward end point with the negated
/// final velocity, for as many steps as the forward run completed.
/// random_field runs use a fresh MCMC stream seeded by derive_seed(config.seed, 1).
GeodesicTrace reverse_replay(const IntegratorConfig& config, const GeodesicTrace& forward);

struct DispersionMetrics {
  double geo_ab = 0.0;
  double geo_ba = 0.0;
  double length_gap = 0.0;
  /// Distance between the reverse run's end point and the forward start.
  double endpoint_gap = 0.0;
  /// Straight-line distance from A to B in parameter space.
  double euclid_ab = 0.0;
};

DispersionMetrics dispersion_metrics(const GeodesicTrace& forward, const GeodesicTrace& reverse);

}  // namespace gdisp
