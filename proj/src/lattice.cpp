#include "gdisp/lattice.hpp"

#include <cassert>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

#include "gdisp/format.hpp"

namespace gdisp {

namespace {

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

void check_dimensions(int n, int m) {
  if (n < 3 || m < 3) {
    throw InvalidDimension("lattice must be at least 3x3, got " + std::to_string(n) + "x" +
                           std::to_string(m));
  }
}

}  // namespace

FieldLattice::FieldLattice(LatticeValues values, std::uint64_t seed, Rng rng)
    : values_(std::move(values)), seed_(seed), rng_(std::move(rng)) {
  check_dimensions(height(), width());
}

double FieldLattice::wrapped(int row, int col) const {
  return values_(wrap(row, height()), wrap(col, width()));
}

double FieldLattice::centred_neighbour_sum(int row, int col, double mu) const {
  const int n = height();
  const int m = width();
  const int up = row == 0 ? n - 1 : row - 1;
  const int down = row == n - 1 ? 0 : row + 1;
  const int left = col == 0 ? m - 1 : col - 1;
  const int right = col == m - 1 ? 0 : col + 1;
  const double sum = values_(up, left) + values_(up, col) + values_(up, right) +
                     values_(row, left) + values_(row, right) + values_(down, left) +
                     values_(down, col) + values_(down, right);
  return sum - kNeighbourCount * mu;
}

FieldLattice init_field(int n, int m, const ParamPointd& theta, std::uint64_t seed) {
  check_dimensions(n, m);
  require_positive_variance(theta);
  FieldLattice field(LatticeValues::Zero(n, m), seed, Rng(seed));
  reinitialize(field, theta);
  return field;
}

void reinitialize(FieldLattice& field, const ParamPointd& theta) {
  require_positive_variance(theta);
  const double sd = std::sqrt(theta.sigma2);
  auto& values = field.values();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    values.data()[i] = field.rng().gaussian(theta.mu, sd);
  }
}

double local_conditional_density(double x, double neighbour_sum_centred,
                                 const ParamPointd& theta) {
  require_positive_variance(theta);
  const double r = x - theta.mu - theta.beta * neighbour_sum_centred;
  return std::exp(-r * r / (2.0 * theta.sigma2)) / std::sqrt(2.0 * std::numbers::pi * theta.sigma2);
}

std::string to_string(AcceptanceRule rule) {
  return rule == AcceptanceRule::hastings ? "hastings" : "metropolis";
}

AcceptanceRule acceptance_rule_from_string(const std::string& text) {
  if (text == "hastings") return AcceptanceRule::hastings;
  if (text == "metropolis") return AcceptanceRule::metropolis;
  throw ParseError("unknown acceptance rule '" + text + "' (expected hastings or metropolis)");
}

namespace {

// With proposal density q = Normal(mu, sigma2) and target p(. | eta), the
// Hastings ratio p(y)q(x) / (p(x)q(y)) reduces to
// exp(beta * s * (y - x) / sigma2), s the centred neighbour sum.
double log_acceptance(double x, double y, double s, const ParamPointd& theta, AcceptanceRule rule) {
  if (rule == AcceptanceRule::hastings) return theta.beta * s * (y - x) / theta.sigma2;
  const double m = theta.mu + theta.beta * s;
  return ((x - m) * (x - m) - (y - m) * (y - m)) / (2.0 * theta.sigma2);
}

}  // namespace

double acceptance_probability(double current, double proposal, double neighbour_sum_centred,
                              const ParamPointd& theta, AcceptanceRule rule) {
  require_positive_variance(theta);
  const double log_ratio = log_acceptance(current, proposal, neighbour_sum_centred, theta, rule);
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

void run_sweeps(FieldLattice& field, const ParamPointd& theta, int n_sweeps, AcceptanceRule rule) {
  require_positive_variance(theta);
  if (n_sweeps < 1) {
    throw InvalidParameter("n_sweeps must be >= 1, got " + std::to_string(n_sweeps));
  }
  const int n = field.height();
  const int m = field.width();
  const double sd = std::sqrt(theta.sigma2);
  auto& values = field.values();
  auto& rng = field.rng();

  for (int sweep = 0; sweep < n_sweeps; ++sweep) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const double s = field.centred_neighbour_sum(i, j, theta.mu);
        const double y = rng.gaussian(theta.mu, sd);
        const double x = values(i, j);
        const double log_ratio = log_acceptance(x, y, s, theta, rule);
        if (log_ratio >= 0.0) {
          values(i, j) = y;
          continue;
        }
        const double p = std::exp(log_ratio);
        assert(p >= 0.0 && p <= 1.0);
        if (rng.uniform() < p) values(i, j) = y;
      }
    }
  }
}

void dump_lattice(const FieldLattice& field, const ParamPointd& theta,
                  const std::filesystem::path& stem) {
  std::ofstream csv(std::filesystem::path(stem).concat(".csv"));
  if (!csv) throw IoError("cannot open " + stem.string() + ".csv");
  for (int i = 0; i < field.height(); ++i) {
    for (int j = 0; j < field.width(); ++j) {
      if (j > 0) csv << ',';
      csv << format_number(field.values()(i, j));
    }
    csv << '\n';
  }
  nlohmann::json header{{"n", field.height()},
                        {"m", field.width()},
                        {"seed", field.seed()},
                        {"theta", {{"mu", theta.mu}, {"sigma2", theta.sigma2}, {"beta", theta.beta}}},
                        {"rng", std::string(Rng::kAlgorithm)}};
  std::ofstream side(std::filesystem::path(stem).concat(".json"));
  if (!side) throw IoError("cannot open " + stem.string() + ".json");
  side << header.dump(2) << '\n';
}

}  // namespace gdisp
