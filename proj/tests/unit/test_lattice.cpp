#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "generators.hpp"
#include "gdisp/lattice.hpp"
#include "gdisp/patch_stats.hpp"

using namespace gdisp;

namespace {

double normal_pdf(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

double normal_cdf(double x, double mean, double var) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2 * var));
}

struct Moments {
  double mean = 0, var = 0;
};

Moments moments(const LatticeValues& v) {
  Moments m;
  m.mean = v.mean();
  m.var = (v.array() - m.mean).square().mean();
  return m;
}

double ks_statistic(const LatticeValues& v, double mean, double var) {
  std::vector<double> xs(v.data(), v.data() + v.size());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i], mean, var);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

}  // namespace

TEST_CASE("lattice: init rejects bad dimensions and variance") {
  CHECK_THROWS_AS(init_field(2, 5, {0, 1, 0}, 1), InvalidDimension);
  CHECK_THROWS_AS(init_field(5, 2, {0, 1, 0}, 1), InvalidDimension);
  CHECK_THROWS_AS(init_field(5, 5, {0, 0, 0}, 1), InvalidParameter);
  CHECK_THROWS_AS(init_field(5, 5, {0, -1, 0}, 1), InvalidParameter);
}

TEST_CASE("lattice: vanishing variance concentrates at the mean") {
  const auto f = init_field(3, 3, {5, 1e-4, 0}, 99);
  for (int i = 0; i < 9; ++i) CHECK(std::abs(f.values().data()[i] - 5.0) < 0.05);
}

TEST_CASE("lattice: 128x128 init matches Normal(0, 1)") {
  const auto f = init_field(128, 128, {0, 1, 0}, 42);
  const auto m = moments(f.values());
  CHECK(std::abs(m.mean) < 3.0 / 128);
  CHECK(std::abs(m.var - 1) < 0.05);
}

TEST_CASE("lattice: seeded determinism") {
  auto a = init_field(64, 64, {10, 4, 0}, 7);
  auto b = init_field(64, 64, {10, 4, 0}, 7);
  CHECK(a == b);
  run_sweeps(a, {10, 4, 0.05}, 3);
  run_sweeps(b, {10, 4, 0.05}, 3);
  CHECK(a.values() == b.values());
  const auto c = init_field(64, 64, {10, 4, 0}, 8);
  CHECK(a.values() != c.values());
}

TEST_CASE("lattice: neighbour sum wraps around the torus") {
  LatticeValues v(3, 4);
  v << 1, 2, 3, 4,
       5, 6, 7, 8,
       9, 10, 11, 12;
  const FieldLattice f(v, 0, Rng(0));
  // Corner (0, 0): neighbours are rows {2, 0, 1} x cols {3, 0, 1} minus the centre.
  const double expected = (12 + 9 + 10) + (4 + 2) + (8 + 5 + 6);
  CHECK(f.centred_neighbour_sum(0, 0, 0.0) == expected);
  CHECK(f.centred_neighbour_sum(0, 0, 1.0) == expected - 8);
  CHECK(f.wrapped(-1, -1) == 12);
  CHECK(f.wrapped(3, 4) == 1);
}

TEST_CASE("lattice: local conditional density examples") {
  CHECK(local_conditional_density(0, 0, {0, 1, 0}) == doctest::Approx(0.3989422804));
  CHECK(local_conditional_density(1, 2, {0, 1, 0.5}) == doctest::Approx(0.3989422804));
  CHECK(local_conditional_density(3, 0, {3, 4, 0.2}) == doctest::Approx(1 / std::sqrt(2 * std::numbers::pi * 4)));
  CHECK_THROWS_AS(local_conditional_density(0, 0, {0, 0, 0}), InvalidParameter);
}

TEST_CASE("lattice: acceptance probabilities against density ratios") {
  testing::Gen gen(11);
  for (int k = 0; k < 500; ++k) {
    const ParamPointd th{gen.uniform(-3, 3), gen.uniform(0.3, 4), gen.uniform(-0.3, 0.3)};
    const double x = gen.uniform(-5, 5), y = gen.uniform(-5, 5), s = gen.uniform(-6, 6);
    const double px = local_conditional_density(x, s, th), py = local_conditional_density(y, s, th);
    const double qx = normal_pdf(x, th.mu, th.sigma2), qy = normal_pdf(y, th.mu, th.sigma2);

    const double h = acceptance_probability(x, y, s, th, AcceptanceRule::hastings);
    const double m = acceptance_probability(x, y, s, th, AcceptanceRule::metropolis);
    CHECK(h == doctest::Approx(std::min(1.0, py * qx / (px * qy))).epsilon(1e-9));
    CHECK(m == doctest::Approx(std::min(1.0, py / px)).epsilon(1e-9));
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
    if (py >= px) CHECK(m == 1.0);
  }
}

TEST_CASE("lattice: zero sweeps is an error") {
  auto f = init_field(8, 8, {0, 1, 0}, 1);
  CHECK_THROWS_AS(run_sweeps(f, {0, 1, 0}, 0), InvalidParameter);
  CHECK_THROWS_AS(run_sweeps(f, {0, -1, 0}, 1), InvalidParameter);
  CHECK_THROWS_AS(metropolis_sweep(f, {0, 1, 0}, -3), InvalidParameter);
}

TEST_CASE("lattice: beta = 0 sweeps sample Normal(mu, sigma2)") {
  auto f = init_field(128, 128, {0, 1, 0}, 3);
  run_sweeps(f, {2, 3, 0}, 100);
  const auto m = moments(f.values());
  CHECK(std::abs(m.mean - 2) < 3 * std::sqrt(3.0 / (128 * 128)));
  CHECK(std::abs(m.var - 3) < 0.3);
  // 1% critical value of the one-sample KS test: 1.628 / sqrt(N).
  CHECK(ks_statistic(f.values(), 2, 3) < 1.628 / 128);
}

TEST_CASE("lattice: the plain Metropolis ratio halves the variance at beta = 0") {
  // Its stationary law is proportional to p * q = Normal(mu, sigma2 / 2).
  auto f = init_field(128, 128, {0, 1, 0}, 4);
  run_sweeps(f, {0, 1, 0}, 100, AcceptanceRule::metropolis);
  const auto m = moments(f.values());
  CHECK(std::abs(m.mean) < 0.03);
  CHECK(std::abs(m.var - 0.5) < 0.05);
  CHECK(ks_statistic(f.values(), 0, 0.5) < 1.628 / 128);
}

TEST_CASE("lattice: positive beta correlates neighbours") {
  auto f = init_field(96, 96, {0, 1, 0}, 5);
  run_sweeps(f, {0, 1, 0.1}, 100);
  const auto st = compute_patch_stats(f);
  CHECK(st.s_rho / 8 > 0.05);
  for (int i = 0; i < 8; ++i) CHECK(st.rho(i) > 0);
}

TEST_CASE("lattice: dump writes values and a sidecar") {
  const auto dir = std::filesystem::temp_directory_path() / "gdisp_lattice_dump";
  std::filesystem::create_directories(dir);
  const auto f = init_field(4, 5, {1, 2, 0}, 6);
  dump_lattice(f, {1, 2, 0}, dir / "field");
  std::ifstream csv(dir / "field.csv");
  int lines = 0;
  for (std::string line; std::getline(csv, line);) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(lines == 4);
  CHECK(std::filesystem::exists(dir / "field.json"));
}
