#include "gdisp/geodesic.hpp"

#include <cmath>
#include <optional>

#include "gdisp/lattice.hpp"
#include "gdisp/patch_stats.hpp"
#include "gdisp/rng.hpp"

namespace gdisp {

std::string to_string(Mode mode) {
  return mode == Mode::random_field ? "random_field" : "gaussian_analytic";
}

Mode mode_from_string(const std::string& text) {
  if (text == "random_field") return Mode::random_field;
  if (text == "gaussian_analytic") return Mode::gaussian_analytic;
  throw ParseError("unknown mode '" + text + "' (expected random_field or gaussian_analytic)");
}

std::string to_string(ChristoffelUpdate update) {
  return update == ChristoffelUpdate::per_step ? "per_step" : "per_stage";
}

ChristoffelUpdate christoffel_update_from_string(const std::string& text) {
  if (text == "per_step") return ChristoffelUpdate::per_step;
  if (text == "per_stage") return ChristoffelUpdate::per_stage;
  throw ParseError("unknown christoffel_update '" + text + "' (expected per_step or per_stage)");
}

void IntegratorConfig::validate() const {
  if (n_steps < 1) throw InvalidParameter("n_steps must be >= 1");
  if (!(step() > 0.0) || !std::isfinite(step())) throw InvalidParameter("step size must be positive");
  if (!(sigma2_floor > 0.0)) throw InvalidParameter("sigma2_floor must be positive");
  if (!(lambda_reg >= 0.0)) throw InvalidParameter("lambda_reg must be >= 0");
  if (mode == Mode::random_field) {
    if (lattice_n < 3 || lattice_m < 3) throw InvalidDimension("lattice must be at least 3x3");
    if (mcmc_sweeps < 1) throw InvalidParameter("mcmc_sweeps must be >= 1");
    if (christoffel_update == ChristoffelUpdate::per_stage) {
      throw InvalidParameter("per_stage Christoffel updates need gaussian_analytic mode");
    }
  }
}

namespace {

/// Geometry sampled at one outer iteration.
struct LocalGeometry {
  MetricTensor<double> metric;
  ChristoffelTensor<double> christoffel;
  double entropy = 0.0;
  double curvature = 0.0;
};

LocalGeometry random_field_geometry(const ParamPointd& theta, const PatchStatsd& stats,
                                    double lambda_reg) {
  LocalGeometry out;
  out.metric = metric_tensor(theta, stats);
  const auto inv = inverse_metric(out.metric, lambda_reg);
  out.christoffel = christoffel_symbols(inv, metric_derivatives(theta, stats));
  const auto h = entropy(theta, stats);
  out.entropy = h.value;
  out.curvature =
      shape_operator_report(second_fundamental_form(theta, stats, h), inv.ginv).gaussian_curvature;
  return out;
}

LocalGeometry gaussian_geometry(const ParamPointd& theta) {
  LocalGeometry out;
  out.metric = gaussian_metric(theta.sigma2);
  out.christoffel = gaussian_christoffel(theta.sigma2);
  const auto report = gaussian_curvature_report(theta.sigma2);
  out.entropy = report.entropy;
  out.curvature = report.gaussian_curvature;
  return out;
}

/// Keeps a lattice in step with the moving parameter point.
class FieldTracker {
 public:
  explicit FieldTracker(const IntegratorConfig& config) : config_(config) {}

  PatchStatsd stats_at(const ParamPointd& theta) {
    if (!field_) {
      field_.emplace(init_field(config_.lattice_n, config_.lattice_m, theta, config_.seed));
    } else if (!config_.warm_start) {
      reinitialize(*field_, theta);
    }
    run_sweeps(*field_, theta, config_.mcmc_sweeps, config_.acceptance);
    return compute_patch_stats(*field_);
  }

 private:
  const IntegratorConfig& config_;
  std::optional<FieldLattice> field_;
};

bool in_domain(const Vec3<double>& x, const Vec3<double>& v, double floor, std::string& reason) {
  if (!x.allFinite() || !v.allFinite()) {
    reason = "non-finite state";
    return false;
  }
  if (!(x(1) > floor)) {
    reason = "sigma2 fell below floor";
    return false;
  }
  return true;
}

}  // namespace

GeodesicTrace integrate_geodesic(const IntegratorConfig& config, const ParamPointd& theta0,
                                 const TangentVectord& alpha0) {
  config.validate();
  if (!(theta0.sigma2 > config.sigma2_floor)) {
    throw InvalidParameter("initial sigma2 must exceed sigma2_floor");
  }
  const bool analytic = config.mode == Mode::gaussian_analytic;
  if (analytic && (theta0.beta != 0.0 || alpha0.a3 != 0.0)) {
    throw InvalidParameter("gaussian_analytic runs require beta0 = 0 and alpha3 = 0");
  }
  if (!theta0.vector().allFinite() || !alpha0.vector().allFinite()) {
    throw InvalidParameter("initial state must be finite");
  }

  const double h = config.step();
  GeodesicTrace trace;
  trace.mode = config.mode;
  trace.steps.reserve(static_cast<std::size_t>(config.n_steps) + 1);

  FieldTracker tracker(config);
  Vec3<double> x = theta0.vector();
  Vec3<double> v = alpha0.vector();
  double arc = 0.0;
  double metric_arc = 0.0;

  for (int i = 0;; ++i) {
    const auto theta = ParamPointd::from_vector(x);
    LocalGeometry geo;
    try {
      geo = analytic ? gaussian_geometry(theta)
                     : random_field_geometry(theta, tracker.stats_at(theta), config.lambda_reg);
    } catch (const Error& e) {
      trace.terminated_early = true;
      trace.reason = e.what();
      break;
    }

    trace.steps.push_back({config.t_start + i * h, theta, TangentVectord::from_vector(v),
                           geo.entropy, geo.curvature, arc, metric_arc});
    if (i == config.n_steps) break;

    std::pair<Vec3<double>, Vec3<double>> next;
    if (config.christoffel_update == ChristoffelUpdate::per_stage) {
      next = rk4_advance<double>(
          x, v, [](const Vec3<double>& p) { return gaussian_christoffel(p(1)); }, h);
    } else {
      next = rk4_advance<double>(
          x, v, [&](const Vec3<double>&) -> const auto& { return geo.christoffel; }, h);
    }

    std::string reason;
    if (!in_domain(next.first, next.second, config.sigma2_floor, reason)) {
      trace.terminated_early = true;
      trace.reason = reason + " at t = " + std::to_string(config.t_start + (i + 1) * h);
      break;
    }
    arc += v.norm() * h;
    metric_arc += std::sqrt(std::max(geo.metric.speed2(v), 0.0)) * h;
    x = next.first;
    v = next.second;
  }

  if (!trace.steps.empty()) {
    trace.total_length = trace.steps.back().arc_length;
    trace.total_metric_length = trace.steps.back().metric_length;
  }
  return trace;
}

GeodesicTrace reverse_replay(const IntegratorConfig& config, const GeodesicTrace& forward) {
  if (forward.steps.size() < 2) {
    throw InvalidParameter("reverse replay needs a forward trace with at least one step");
  }
  IntegratorConfig reversed = config;
  reversed.seed = derive_seed(config.seed, 1);
  // Retrace only the span the forward run covered.
  const int done = static_cast<int>(forward.steps.size()) - 1;
  if (done < config.n_steps) {
    reversed.n_steps = done;
    reversed.t_end = config.t_start + done * config.step();
  }
  const auto& end = forward.steps.back();
  const TangentVectord back{-end.alpha.a1, -end.alpha.a2, -end.alpha.a3};
  return integrate_geodesic(reversed, end.theta, back);
}

DispersionMetrics dispersion_metrics(const GeodesicTrace& forward, const GeodesicTrace& reverse) {
  if (forward.steps.empty() || reverse.steps.empty()) {
    throw InvalidParameter("dispersion metrics need nonempty traces");
  }
  DispersionMetrics out;
  out.geo_ab = forward.total_length;
  out.geo_ba = reverse.total_length;
  out.length_gap = std::abs(out.geo_ab - out.geo_ba);
  const auto a = forward.front().theta.vector();
  out.endpoint_gap = (reverse.back().theta.vector() - a).norm();
  out.euclid_ab = (forward.back().theta.vector() - a).norm();
  return out;
}

}  // namespace gdisp
