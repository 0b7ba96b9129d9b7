#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdisp/geodesic.hpp"

namespace gdisp {

struct ExperimentSpec {
  std::string name;
  ParamPointd theta0;
  TangentVectord alpha0;
  IntegratorConfig integrator;
  /// Independent seeds for stochastic runs.
  int repeats = 1;

  Mode mode() const { return integrator.mode; }
  bool operator==(const ExperimentSpec&) const = default;
};

inline constexpr int kBatchVersion = 1;

struct Batch {
  int version = kBatchVersion;
  std::vector<ExperimentSpec> experiments;
};

/// Loads a batch file. `.json` files go through nlohmann/json; anything else
/// is read as TOML. Both share one schema:
///
///   version = 1
///   [defaults]            # optional; any integrator key
///   [[experiment]]        # name, theta0, alpha0, plus per-run overrides
///
/// Throws ParseError on malformed input or unknown keys.
Batch load_batch(const std::filesystem::path& path);
Batch parse_batch(const nlohmann::json& doc);
Batch parse_batch_toml(std::string_view text, std::string_view source = "<toml>");

/// Fully resolved JSON echo of a batch; parse_batch() accepts it unchanged.
nlohmann::json batch_to_json(const Batch& batch);

/// Seed used by repeat k of an experiment whose base seed is `seed`.
std::uint64_t repeat_seed(std::uint64_t seed, int repeat);

struct SummaryRow {
  std::string name;
  int repeat = 0;
  std::uint64_t seed = 0;
  Mode mode = Mode::random_field;
  double h = 0.0;
  ParamPointd a;
  TangentVectord alpha0;
  ParamPointd b;
  TangentVectord alpha_final;
  double geo_ab = 0.0;
  double geo_ba = 0.0;
  double euclid = 0.0;
  double endpoint_gap = 0.0;
  bool terminated_early = false;
  std::string reason;
};

struct RunOptions {
  int jobs = 1;
  std::optional<std::uint64_t> seed_override;
};

struct BatchResult {
  Batch resolved;
  std::vector<SummaryRow> rows;

  bool all_succeeded() const;
};

/// Runs forward and reverse integrations for every (experiment, repeat).
/// With a non-empty out_dir, writes traces/<name>_r<k>_{forward,reverse}.csv,
/// summary.csv and summary.json there.
BatchResult run_batch(const Batch& batch, const std::filesystem::path& out_dir,
                      const RunOptions& options = {});

/// One forward + reverse run; never throws for per-run failures.
SummaryRow run_experiment(const ExperimentSpec& spec, int repeat, GeodesicTrace* forward_out = nullptr,
                          GeodesicTrace* reverse_out = nullptr);

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
nlohmann::json summary_to_json(const BatchResult& result);

enum class PlotKind { trajectory3d, entropy, curvature };

PlotKind plot_kind_from_string(const std::string& text);

/// Plot-ready CSV: `t,mu,sigma2,beta` for trajectories, tidy `t,series,value`
/// for the scalar series.
void emit_plot_series(const GeodesicTrace& trace, PlotKind kind, const std::filesystem::path& out);
void emit_plot_series(const GeodesicTrace& trace, PlotKind kind, std::ostream& out);

// Reference values of the Gaussian-submanifold experiments (beta = 0,
// a = 0, b = 10, n = 1000).
struct Table1Row {
  ParamPointd a;
  TangentVectord alpha0;
  ParamPointd b;
  TangentVectord alpha_final;
  double geo_ab;
  double geo_ba;
  double euclid;
};

const std::vector<Table1Row>& table1_reference();
Batch table1_batch();

struct Table1Check {
  int row = 0;
  SummaryRow result;
  Table1Row reference;
  double endpoint_error = 0.0;  // worst per-coordinate error, relative or absolute
  double length_error = 0.0;    // relative error of geo_AB
  bool passed = false;
};

/// Endpoint coordinates must match within `tolerance` relative (2 * tolerance
/// absolute when |reference| < 1); geo_AB within `tolerance` relative.
std::vector<Table1Check> verify_table1(double tolerance);

}  // namespace gdisp
