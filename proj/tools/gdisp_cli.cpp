// gdisp: geodesic experiments on the GMRF parametric manifold.
//
//   gdisp run <batch-file> --out <dir> [--jobs K] [--seed S]
//   gdisp plot-data <trace.csv> --kind trajectory3d|entropy|curvature --out <file>
//   gdisp verify-table1 [--tolerance 0.01]
//
// Exit codes: 0 success, 1 run failure, 2 usage or parse error.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gdisp/experiments.hpp"
#include "gdisp/format.hpp"
#include "gdisp/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitUsage = 2;

int cmd_run(const std::string& batch_file, const std::string& out_dir, int jobs,
            std::optional<std::uint64_t> seed) {
  gdisp::Batch batch;
  try {
    batch = gdisp::load_batch(batch_file);
  } catch (const gdisp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gdisp::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  gdisp::BatchResult result;
  try {
    result = gdisp::run_batch(batch, out_dir, {jobs, seed});
  } catch (const gdisp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRunFailure;
  }

  for (const auto& r : result.rows) {
    std::cout << r.name << " #" << r.repeat << "  geo_AB=" << gdisp::format_number(r.geo_ab)
              << "  geo_BA=" << gdisp::format_number(r.geo_ba)
              << "  euclid=" << gdisp::format_number(r.euclid)
              << "  endpoint_gap=" << gdisp::format_number(r.endpoint_gap);
    if (r.terminated_early) std::cout << "  [terminated: " << r.reason << "]";
    std::cout << '\n';
  }
  std::cout << result.rows.size() << " run(s) written to " << out_dir << '\n';
  return result.all_succeeded() ? kExitOk : kExitRunFailure;
}

int cmd_plot(const std::string& trace_file, const std::string& kind, const std::string& out) {
  gdisp::PlotKind plot_kind;
  gdisp::GeodesicTrace trace;
  try {
    plot_kind = gdisp::plot_kind_from_string(kind);
    trace = gdisp::read_trace_csv(trace_file);
  } catch (const gdisp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gdisp::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    gdisp::emit_plot_series(trace, plot_kind, out);
  } catch (const gdisp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRunFailure;
  }
  return kExitOk;
}

int cmd_verify_table1(double tolerance) {
  const auto checks = gdisp::verify_table1(tolerance);
  bool ok = true;
  std::printf("%-4s %10s %10s %10s %10s %10s %10s %8s\n", "row", "B_mu", "ref", "B_sigma2", "ref",
              "geo_AB", "ref", "status");
  for (const auto& c : checks) {
    std::printf("%-4d %10.4f %10.4f %10.4f %10.4f %10.4f %10.4f %8s\n", c.row, c.result.b.mu,
                c.reference.b.mu, c.result.b.sigma2, c.reference.b.sigma2, c.result.geo_ab,
                c.reference.geo_ab, c.passed ? "PASS" : "FAIL");
    ok = ok && c.passed;
  }
  return ok ? kExitOk : kExitRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic curves and time-reversal dispersion on the GMRF parametric manifold"};
  app.require_subcommand(1);

  std::string batch_file, out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run a batch of forward and time-reversed experiments");
  run->add_option("batch-file", batch_file, "TOML or JSON batch file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the base seed of every experiment");

  std::string trace_file, kind, plot_out;
  auto* plot = app.add_subcommand("plot-data", "Write plot-ready series from a trace CSV");
  plot->add_option("trace", trace_file, "Trace CSV")->required();
  plot->add_option("--kind", kind, "trajectory3d | entropy | curvature")
      ->required()
      ->check(CLI::IsMember({"trajectory3d", "entropy", "curvature"}));
  plot->add_option("--out", plot_out, "Output CSV")->required();

  double tolerance = 0.01;
  auto* verify = app.add_subcommand("verify-table1", "Check the Gaussian-submanifold reference runs");
  verify->add_option("--tolerance", tolerance, "Relative tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*run) return cmd_run(batch_file, out_dir, jobs, seed);
  if (*plot) return cmd_plot(trace_file, kind, plot_out);
  if (*verify) return cmd_verify_table1(tolerance);
  return kExitUsage;
}
