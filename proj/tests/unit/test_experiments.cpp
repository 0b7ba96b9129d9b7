#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gdisp/experiments.hpp"
#include "gdisp/format.hpp"
#include "gdisp/rng.hpp"
#include "gdisp/trace_io.hpp"

using namespace gdisp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gdisp_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr const char* kSmallField = R"(
version = 1

[defaults]
mode = "random_field"
t_end = 0.1
n_steps = 10
lattice = [12, 12]
mcmc_sweeps = 3
seed = 77

[[experiment]]
name = "a"
theta0 = [0.0, 1.0, 0.0]
alpha0 = [0.5, 0.2, 0.1]
acceptance = "metropolis"

[[experiment]]
name = "b"
theta0 = { mu = 1.0, sigma2 = 2.0, beta = 0.05 }
alpha0 = { a1 = 0.1, a3 = -0.2 }
repeats = 2
)";

}  // namespace

TEST_CASE("batch: TOML defaults and overrides") {
  const Batch b = parse_batch_toml(kSmallField);
  REQUIRE(b.experiments.size() == 2);
  const auto& a = b.experiments[0];
  CHECK(a.name == "a");
  CHECK(a.mode() == Mode::random_field);
  CHECK(a.integrator.lattice_n == 12);
  CHECK(a.integrator.lattice_m == 12);
  CHECK(a.integrator.acceptance == AcceptanceRule::metropolis);
  CHECK(a.integrator.christoffel_update == ChristoffelUpdate::per_step);
  CHECK(a.repeats == 1);
  const auto& e = b.experiments[1];
  CHECK(e.integrator.acceptance == AcceptanceRule::hastings);
  CHECK(e.theta0 == ParamPointd{1.0, 2.0, 0.05});
  CHECK(e.alpha0 == TangentVectord{0.1, 0.0, -0.2});
  CHECK(e.repeats == 2);
  CHECK(e.integrator.seed == 77);
  CHECK(e.integrator.step() == doctest::Approx(0.01));
}

TEST_CASE("batch: two-component inputs leave beta at zero") {
  const Batch b = parse_batch_toml(R"(
[[experiment]]
name = "g"
mode = "gaussian_analytic"
theta0 = [3.0, 4.0]
alpha0 = [1.0, 2.0]
christoffel_update = "per_stage"
)");
  REQUIRE(b.experiments.size() == 1);
  CHECK(b.experiments[0].theta0 == ParamPointd{3.0, 4.0, 0.0});
  CHECK(b.experiments[0].alpha0 == TangentVectord{1.0, 2.0, 0.0});
  CHECK(b.experiments[0].integrator.christoffel_update == ChristoffelUpdate::per_stage);
}

TEST_CASE("batch: malformed input is a ParseError") {
  const char* bad[] = {
      "version = 2\n",
      "colour = 1\n",
      "[defaults]\nstep = 0.1\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, 1.0]\nalpha0 = [1.0, 0.0]\nbogus = 1\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, 1.0]\nalpha0 = [1.0, 0.0]\n"
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, 1.0]\nalpha0 = [1.0, 0.0]\n",
      "[[experiment]]\ntheta0 = [0.0, 1.0]\nalpha0 = [1.0, 0.0]\n",
      "[[experiment]]\nname = \"x\"\nalpha0 = [1.0, 0.0]\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0]\nalpha0 = [1.0, 0.0]\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = { mu = 1.0 }\nalpha0 = [1.0, 0.0]\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, -1.0]\nalpha0 = [1.0, 0.0]\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, 1.0]\nalpha0 = [1.0, 0.0]\nmode = \"magic\"\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, 1.0]\nalpha0 = [1.0, 0.0]\nacceptance = \"gibbs\"\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, 1.0]\nalpha0 = [1.0, 0.0]\nn_steps = 0\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, 1.0]\nalpha0 = [1.0, 0.0]\nrepeats = 0\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, 1.0]\nalpha0 = [1.0, 0.0]\nseed = -3\n",
      // stage-wise symbols only exist in closed form
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, 1.0]\nalpha0 = [1.0, 0.0]\n"
      "christoffel_update = \"per_stage\"\n",
      "[[experiment]]\nname = \"x\"\ntheta0 = [0.0, 1.0\n",
  };
  for (const char* text : bad) {
    CAPTURE(std::string(text));
    CHECK_THROWS_AS(parse_batch_toml(text), ParseError);
  }
}

TEST_CASE("batch: TOML and JSON agree") {
  const Batch toml = parse_batch_toml(kSmallField);
  const Batch json = parse_batch(batch_to_json(toml));
  CHECK(json.experiments == toml.experiments);

  const fs::path dir = scratch("json_load");
  std::ofstream(dir / "b.json") << batch_to_json(toml).dump();
  CHECK(load_batch(dir / "b.json").experiments == toml.experiments);
  std::ofstream(dir / "broken.json") << "{\"version\": 1,";
  CHECK_THROWS_AS(load_batch(dir / "broken.json"), ParseError);
  CHECK_THROWS_AS(load_batch(dir / "absent.toml"), IoError);
}

TEST_CASE("batch: shipped table1 config matches the built-in reference batch") {
  const Batch shipped = load_batch(fs::path(GDISP_CONFIG_DIR) / "table1.toml");
  const Batch builtin = table1_batch();
  REQUIRE(shipped.experiments.size() == builtin.experiments.size());
  for (std::size_t i = 0; i < builtin.experiments.size(); ++i) {
    CAPTURE(i);
    CHECK(shipped.experiments[i].theta0 == builtin.experiments[i].theta0);
    CHECK(shipped.experiments[i].alpha0 == builtin.experiments[i].alpha0);
    CHECK(shipped.experiments[i].integrator == builtin.experiments[i].integrator);
  }
  for (const char* f : {"table2.toml", "dispersion_row11.toml"}) {
    CAPTURE(f);
    CHECK_NOTHROW(load_batch(fs::path(GDISP_CONFIG_DIR) / f));
  }
}

TEST_CASE("batch: repeat seeds") {
  CHECK(repeat_seed(5, 0) == 5);
  CHECK(repeat_seed(5, 1) == derive_seed(5, 101));
  CHECK(repeat_seed(5, 1) != repeat_seed(5, 2));
  CHECK(repeat_seed(5, 1) != derive_seed(5, 1));  // never collides with the reverse stream
}

TEST_CASE("run: empty batch writes empty summaries") {
  const fs::path dir = scratch("empty");
  const auto result = run_batch(parse_batch_toml("version = 1\n"), dir);
  CHECK(result.rows.empty());
  CHECK(result.all_succeeded());
  CHECK(fs::exists(dir / "summary.csv"));
  const auto doc = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(doc["results"].empty());
}

TEST_CASE("run: summary rows") {
  const fs::path dir = scratch("rows");
  const auto result = run_batch(parse_batch_toml(kSmallField), dir);
  REQUIRE(result.rows.size() == 3);
  for (const auto& r : result.rows) {
    CAPTURE(r.name);
    CHECK_FALSE(r.terminated_early);
    CHECK(r.h == doctest::Approx(0.01));
    const double euclid = (r.b.vector() - r.a.vector()).norm();
    CHECK(std::abs(r.euclid - euclid) < 1e-10);
    CHECK(std::isfinite(r.endpoint_gap));
  }
  CHECK(result.rows[1].seed == 77);
  CHECK(result.rows[2].seed == repeat_seed(77, 1));
  for (const char* f : {"a_r0_forward.csv", "a_r0_reverse.csv", "b_r0_forward.csv", "b_r1_reverse.csv"}) {
    CHECK(fs::exists(dir / "traces" / f));
  }
  const std::string csv = slurp(dir / "summary.csv");
  CHECK(csv.rfind("name,repeat,seed,mode,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("run: summary.json reproduces the run byte for byte") {
  const fs::path first = scratch("replay_1");
  const fs::path second = scratch("replay_2");
  run_batch(parse_batch_toml(kSmallField), first);
  run_batch(load_batch(first / "summary.json"), second);
  for (const auto& entry : fs::directory_iterator(first / "traces")) {
    CAPTURE(entry.path().filename().string());
    CHECK(slurp(entry.path()) == slurp(second / "traces" / entry.path().filename()));
  }
  CHECK(slurp(first / "summary.csv") == slurp(second / "summary.csv"));
}

TEST_CASE("run: jobs do not change results") {
  const Batch b = parse_batch_toml(kSmallField);
  const auto serial = run_batch(b, {}, {1, {}});
  const auto parallel = run_batch(b, {}, {3, {}});
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].b == parallel.rows[i].b);
    CHECK(serial.rows[i].geo_ba == parallel.rows[i].geo_ba);
  }
}

TEST_CASE("run: seed override") {
  const Batch b = parse_batch_toml(kSmallField);
  const auto base = run_batch(b, {});
  const auto other = run_batch(b, {}, {1, 9});
  CHECK(other.resolved.experiments[0].integrator.seed == 9);
  CHECK(other.rows[0].seed == 9);
  CHECK(other.rows[0].b != base.rows[0].b);
}

TEST_CASE("run: failures are reported per row") {
  ExperimentSpec spec;
  spec.name = "dive";
  spec.theta0 = {0, 1, 0};
  spec.alpha0 = {0, -2, 0};
  spec.integrator.mode = Mode::gaussian_analytic;
  const auto row = run_experiment(spec, 0);
  CHECK(row.terminated_early);
  CHECK(row.reason.find("sigma2") != std::string::npos);
  BatchResult r;
  r.rows = {row};
  CHECK_FALSE(r.all_succeeded());
}

TEST_CASE("trace csv: round trip") {
  const auto& row = table1_reference()[2];
  IntegratorConfig cfg;
  cfg.mode = Mode::gaussian_analytic;
  cfg.n_steps = 50;
  const auto trace = integrate_geodesic(cfg, row.a, row.alpha0);
  const fs::path dir = scratch("trace");
  write_trace_csv(trace, dir / "t.csv");
  const auto back = read_trace_csv(dir / "t.csv");
  REQUIRE(back.steps.size() == trace.steps.size());
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    CHECK(back.steps[i].t == trace.steps[i].t);
    CHECK(back.steps[i].theta == trace.steps[i].theta);
    CHECK(back.steps[i].alpha == trace.steps[i].alpha);
    CHECK(back.steps[i].entropy == trace.steps[i].entropy);
    CHECK(back.steps[i].metric_length == trace.steps[i].metric_length);
  }
  CHECK(back.total_length == trace.total_length);

  std::ofstream(dir / "bad.csv") << "t,mu\n1,2\n";
  CHECK_THROWS_AS(read_trace_csv(dir / "bad.csv"), ParseError);
  std::ofstream(dir / "short.csv") << kTraceHeader << "\n1,2,3\n";
  CHECK_THROWS_AS(read_trace_csv(dir / "short.csv"), ParseError);
}

TEST_CASE("plot series") {
  IntegratorConfig cfg;
  cfg.mode = Mode::gaussian_analytic;
  cfg.n_steps = 40;
  CHECK_THROWS_AS(plot_kind_from_string("surface"), ParseError);

  SUBCASE("trajectory") {
    const auto trace = integrate_geodesic(cfg, {0, 1, 0}, {0.1, 0.05, 0});
    std::ostringstream out;
    emit_plot_series(trace, PlotKind::trajectory3d, out);
    const std::string s = out.str();
    CHECK(s.rfind("t,mu,sigma2,beta\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 42);
  }
  SUBCASE("curvature keeps its sign") {
    const auto trace = integrate_geodesic(cfg, {0, 1, 0}, {0.1, 0.05, 0});
    std::ostringstream out;
    emit_plot_series(trace, PlotKind::curvature, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,series,value");
    int rows = 0;
    while (std::getline(in, line)) {
      const auto last = line.rfind(',');
      CHECK(line.find(",curvature,") != std::string::npos);
      CHECK(parse_number(line.substr(last + 1)) > 0);
      ++rows;
    }
    CHECK(rows == 41);
  }
  SUBCASE("entropy is flat along a constant-variance path") {
    // mu-only geodesics bend in sigma2, so use a trace with frozen sigma2.
    GeodesicTrace trace;
    for (int i = 0; i < 5; ++i) {
      TraceRecord r;
      r.t = i;
      r.theta = {double(i), 2.0, 0.0};
      r.entropy = gaussian_entropy(2.0);
      trace.steps.push_back(r);
    }
    std::ostringstream out;
    emit_plot_series(trace, PlotKind::entropy, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      CHECK(parse_number(line.substr(line.rfind(',') + 1)) == gaussian_entropy(2.0));
    }
  }
  SUBCASE("file output") {
    const fs::path dir = scratch("plot");
    const auto trace = integrate_geodesic(cfg, {0, 1, 0}, {0.1, 0.05, 0});
    emit_plot_series(trace, PlotKind::entropy, dir / "e.csv");
    CHECK(slurp(dir / "e.csv").rfind("t,series,value\n", 0) == 0);
    CHECK_THROWS_AS(emit_plot_series(trace, PlotKind::entropy, dir / "missing" / "e.csv"), IoError);
  }
}

TEST_CASE("verify_table1 passes at 1%") {
  const auto checks = verify_table1(0.01);
  REQUIRE(checks.size() == 6);
  for (const auto& c : checks) {
    CAPTURE(c.row);
    CHECK(c.passed);
  }
  CHECK(std::abs(checks[0].result.geo_ab - 1.1246) < 1e-3);
}
