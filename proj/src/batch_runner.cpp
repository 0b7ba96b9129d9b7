#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "gdisp/experiments.hpp"
#include "gdisp/format.hpp"
#include "gdisp/trace_io.hpp"

namespace gdisp {

using nlohmann::json;

namespace {

std::string file_stem(const std::string& name, int repeat) {
  std::string out;
  for (char c : name) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out + "_r" + std::to_string(repeat);
}

struct Task {
  std::size_t spec_index;
  int repeat;
};

}  // namespace

bool BatchResult::all_succeeded() const {
  return std::none_of(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.terminated_early; });
}

SummaryRow run_experiment(const ExperimentSpec& spec, int repeat, GeodesicTrace* forward_out,
                          GeodesicTrace* reverse_out) {
  SummaryRow row;
  row.name = spec.name;
  row.repeat = repeat;
  row.mode = spec.mode();
  row.h = spec.integrator.step();
  row.a = spec.theta0;
  row.alpha0 = spec.alpha0;
  row.b = spec.theta0;

  IntegratorConfig cfg = spec.integrator;
  cfg.seed = repeat_seed(spec.integrator.seed, repeat);
  row.seed = cfg.seed;

  try {
    GeodesicTrace forward = integrate_geodesic(cfg, spec.theta0, spec.alpha0);
    row.b = forward.back().theta;
    row.alpha_final = forward.back().alpha;
    row.geo_ab = forward.total_length;
    row.euclid = (row.b.vector() - row.a.vector()).norm();
    row.terminated_early = forward.terminated_early;
    row.reason = forward.reason;

    if (forward.steps.size() >= 2) {
      GeodesicTrace reverse = reverse_replay(cfg, forward);
      const auto d = dispersion_metrics(forward, reverse);
      row.geo_ba = d.geo_ba;
      row.endpoint_gap = d.endpoint_gap;
      if (reverse.terminated_early) {
        row.terminated_early = true;
        row.reason += (row.reason.empty() ? "" : "; ") + std::string("reverse: ") + reverse.reason;
      }
      if (reverse_out) *reverse_out = std::move(reverse);
    } else {
      row.terminated_early = true;
      if (row.reason.empty()) row.reason = "forward run produced no steps";
    }
    if (forward_out) *forward_out = std::move(forward);
  } catch (const Error& e) {
    row.terminated_early = true;
    row.reason = e.what();
  }
  return row;
}

BatchResult run_batch(const Batch& batch, const std::filesystem::path& out_dir,
                      const RunOptions& options) {
  BatchResult result;
  result.resolved = batch;
  if (options.seed_override) {
    for (auto& s : result.resolved.experiments) s.integrator.seed = *options.seed_override;
  }

  std::vector<Task> tasks;
  for (std::size_t i = 0; i < result.resolved.experiments.size(); ++i) {
    for (int k = 0; k < result.resolved.experiments[i].repeats; ++k) tasks.push_back({i, k});
  }
  result.rows.resize(tasks.size());

  const bool write = !out_dir.empty();
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "traces", ec);
    if (ec) throw IoError("cannot create " + (out_dir / "traces").string() + ": " + ec.message());
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::string> io_errors(tasks.size());
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const auto& spec = result.resolved.experiments[tasks[t].spec_index];
      GeodesicTrace fwd, rev;
      result.rows[t] = run_experiment(spec, tasks[t].repeat, &fwd, &rev);
      if (!write) continue;
      const std::string stem = file_stem(spec.name, tasks[t].repeat);
      try {
        write_trace_csv(fwd, out_dir / "traces" / (stem + "_forward.csv"));
        write_trace_csv(rev, out_dir / "traces" / (stem + "_reverse.csv"));
      } catch (const Error& e) {
        io_errors[t] = e.what();
      }
    }
  };

  const int jobs = std::clamp(options.jobs, 1, std::max<int>(1, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (const auto& e : io_errors) {
    if (!e.empty()) throw IoError(e);
  }
  if (write) {
    write_summary_csv(result.rows, out_dir / "summary.csv");
    std::ofstream js(out_dir / "summary.json", std::ios::binary);
    if (!js) throw IoError("cannot write " + (out_dir / "summary.json").string());
    js << summary_to_json(result).dump(2) << '\n';
  }
  return result;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << "name,repeat,seed,mode,A_mu,A_sigma2,A_beta,alpha0_1,alpha0_2,alpha0_3,"
         "B_mu,B_sigma2,B_beta,alpha_final_1,alpha_final_2,alpha_final_3,"
         "geo_AB,geo_BA,euclid,endpoint_gap,terminated_early\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.repeat << ',' << r.seed << ',' << to_string(r.mode);
    const double cols[] = {r.a.mu,          r.a.sigma2,      r.a.beta,        r.alpha0.a1,
                           r.alpha0.a2,     r.alpha0.a3,     r.b.mu,          r.b.sigma2,
                           r.b.beta,        r.alpha_final.a1, r.alpha_final.a2, r.alpha_final.a3,
                           r.geo_ab,        r.geo_ba,        r.euclid,        r.endpoint_gap};
    for (double c : cols) out << ',' << format_number(c);
    out << ',' << (r.terminated_early ? "true" : "false") << '\n';
  }
}

json summary_to_json(const BatchResult& result) {
  json doc = batch_to_json(result.resolved);
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"name", r.name},
                    {"repeat", r.repeat},
                    {"seed", r.seed},
                    {"mode", to_string(r.mode)},
                    {"h", r.h},
                    {"A", {r.a.mu, r.a.sigma2, r.a.beta}},
                    {"alpha0", {r.alpha0.a1, r.alpha0.a2, r.alpha0.a3}},
                    {"B", {r.b.mu, r.b.sigma2, r.b.beta}},
                    {"alpha_final", {r.alpha_final.a1, r.alpha_final.a2, r.alpha_final.a3}},
                    {"geo_AB", r.geo_ab},
                    {"geo_BA", r.geo_ba},
                    {"euclid", r.euclid},
                    {"endpoint_gap", r.endpoint_gap},
                    {"terminated_early", r.terminated_early},
                    {"reason", r.reason}});
  }
  doc["results"] = rows;
  return doc;
}

}  // namespace gdisp
