#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "gdisp/experiments.hpp"
#include "gdisp/rng.hpp"

namespace gdisp {

using nlohmann::json;

namespace {

json toml_to_json(const toml::node& node) {
  if (auto* t = node.as_table()) {
    json out = json::object();
    for (auto&& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (auto* a = node.as_array()) {
    json out = json::array();
    for (auto&& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (auto* v = node.as_integer()) return v->get();
  if (auto* v = node.as_floating_point()) return v->get();
  if (auto* v = node.as_boolean()) return v->get();
  if (auto* v = node.as_string()) return v->get();
  throw ParseError("unsupported TOML value (dates and times are not accepted)");
}

const std::set<std::string> kIntegratorKeys = {
    "mode",        "t_start",   "t_end",     "n_steps",      "lattice",     "lattice_n",
    "lattice_m",   "mcmc_sweeps", "seed",    "lambda_reg",   "warm_start",  "sigma2_floor",
    "repeats",     "acceptance", "christoffel_update"};

std::string where(const std::string& ctx, const std::string& key) { return ctx + "." + key; }

double as_real(const json& v, const std::string& ctx) {
  if (!v.is_number()) throw ParseError(ctx + ": expected a number");
  return v.get<double>();
}

long long as_int(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) throw ParseError(ctx + ": expected an integer");
  return v.get<long long>();
}

std::uint64_t as_seed(const json& v, const std::string& ctx) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  throw ParseError(ctx + ": seed must be a non-negative integer");
}

/// Applies integrator keys found in `obj` on top of `cfg` / `repeats`.
void apply_integrator_keys(const json& obj, const std::string& ctx, IntegratorConfig& cfg,
                           int& repeats) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    const std::string at = where(ctx, key);
    if (!kIntegratorKeys.count(key)) continue;
    if (key == "mode") {
      if (!v.is_string()) throw ParseError(at + ": expected a string");
      cfg.mode = mode_from_string(v.get<std::string>());
    } else if (key == "t_start") {
      cfg.t_start = as_real(v, at);
    } else if (key == "t_end") {
      cfg.t_end = as_real(v, at);
    } else if (key == "n_steps") {
      cfg.n_steps = static_cast<int>(as_int(v, at));
    } else if (key == "lattice") {
      if (!v.is_array() || v.size() != 2) throw ParseError(at + ": expected [n, m]");
      cfg.lattice_n = static_cast<int>(as_int(v[0], at));
      cfg.lattice_m = static_cast<int>(as_int(v[1], at));
    } else if (key == "lattice_n") {
      cfg.lattice_n = static_cast<int>(as_int(v, at));
    } else if (key == "lattice_m") {
      cfg.lattice_m = static_cast<int>(as_int(v, at));
    } else if (key == "mcmc_sweeps") {
      cfg.mcmc_sweeps = static_cast<int>(as_int(v, at));
    } else if (key == "seed") {
      cfg.seed = as_seed(v, at);
    } else if (key == "lambda_reg") {
      cfg.lambda_reg = as_real(v, at);
    } else if (key == "warm_start") {
      if (!v.is_boolean()) throw ParseError(at + ": expected true/false");
      cfg.warm_start = v.get<bool>();
    } else if (key == "sigma2_floor") {
      cfg.sigma2_floor = as_real(v, at);
    } else if (key == "acceptance") {
      if (!v.is_string()) throw ParseError(at + ": expected a string");
      cfg.acceptance = acceptance_rule_from_string(v.get<std::string>());
    } else if (key == "christoffel_update") {
      if (!v.is_string()) throw ParseError(at + ": expected a string");
      cfg.christoffel_update = christoffel_update_from_string(v.get<std::string>());
    } else if (key == "repeats") {
      repeats = static_cast<int>(as_int(v, at));
    }
  }
}

Vec3<double> read_triple(const json& v, const std::string& ctx, const char* const names[3]) {
  Vec3<double> out = Vec3<double>::Zero();
  if (v.is_array()) {
    if (v.size() != 2 && v.size() != 3) throw ParseError(ctx + ": expected 2 or 3 numbers");
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = as_real(v[i], ctx);
    return out;
  }
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      int idx = -1;
      for (int i = 0; i < 3; ++i) {
        if (it.key() == names[i]) idx = i;
      }
      if (idx < 0) throw ParseError(where(ctx, it.key()) + ": unknown component");
      out(idx) = as_real(it.value(), where(ctx, it.key()));
    }
    return out;
  }
  throw ParseError(ctx + ": expected an array or a table");
}

constexpr const char* kThetaNames[3] = {"mu", "sigma2", "beta"};
constexpr const char* kAlphaNames[3] = {"a1", "a2", "a3"};

}  // namespace

Batch parse_batch(const json& doc) {
  if (!doc.is_object()) throw ParseError("batch: top level must be a table/object");
  static const std::set<std::string> top_keys = {"version", "defaults", "experiment", "rng",
                                                 "results"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!top_keys.count(it.key())) throw ParseError("batch: unknown key '" + it.key() + "'");
  }
  Batch batch;
  if (doc.contains("version")) {
    batch.version = static_cast<int>(as_int(doc["version"], "version"));
    if (batch.version != kBatchVersion) {
      throw ParseError("batch: unsupported version " + std::to_string(batch.version));
    }
  }

  IntegratorConfig defaults;
  int default_repeats = 1;
  if (doc.contains("defaults")) {
    const json& d = doc["defaults"];
    if (!d.is_object()) throw ParseError("defaults: expected a table");
    for (auto it = d.begin(); it != d.end(); ++it) {
      if (!kIntegratorKeys.count(it.key())) throw ParseError("defaults: unknown key '" + it.key() + "'");
    }
    apply_integrator_keys(d, "defaults", defaults, default_repeats);
  }

  if (!doc.contains("experiment")) return batch;
  const json& list = doc["experiment"];
  if (!list.is_array()) throw ParseError("experiment: expected an array of tables");

  std::set<std::string> names;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& e = list[i];
    const std::string ctx = "experiment[" + std::to_string(i) + "]";
    if (!e.is_object()) throw ParseError(ctx + ": expected a table");
    for (auto it = e.begin(); it != e.end(); ++it) {
      const auto& k = it.key();
      if (k != "name" && k != "theta0" && k != "alpha0" && !kIntegratorKeys.count(k)) {
        throw ParseError(ctx + ": unknown key '" + k + "'");
      }
    }
    ExperimentSpec spec;
    spec.integrator = defaults;
    spec.repeats = default_repeats;
    if (!e.contains("name") || !e["name"].is_string()) throw ParseError(ctx + ": missing name");
    spec.name = e["name"].get<std::string>();
    if (!names.insert(spec.name).second) throw ParseError(ctx + ": duplicate name '" + spec.name + "'");
    if (!e.contains("theta0")) throw ParseError(ctx + ": missing theta0");
    if (!e.contains("alpha0")) throw ParseError(ctx + ": missing alpha0");
    spec.theta0 = ParamPointd::from_vector(read_triple(e["theta0"], ctx + ".theta0", kThetaNames));
    if (e["theta0"].is_object() && !e["theta0"].contains("sigma2")) {
      throw ParseError(ctx + ".theta0: sigma2 is required");
    }
    spec.alpha0 = TangentVectord::from_vector(read_triple(e["alpha0"], ctx + ".alpha0", kAlphaNames));
    apply_integrator_keys(e, ctx, spec.integrator, spec.repeats);
    if (spec.repeats < 1) throw ParseError(ctx + ": repeats must be >= 1");
    if (!(spec.theta0.sigma2 > spec.integrator.sigma2_floor)) {
      throw ParseError(ctx + ".theta0: sigma2 must exceed sigma2_floor");
    }
    try {
      spec.integrator.validate();
    } catch (const Error& err) {
      throw ParseError(ctx + ": " + err.what());
    }
    batch.experiments.push_back(std::move(spec));
  }
  return batch;
}

Batch parse_batch_toml(std::string_view text, std::string_view source) {
  try {
    const toml::table table = toml::parse(text, source);
    return parse_batch(toml_to_json(table));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw ParseError(msg.str());
  }
}

Batch load_batch(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open batch file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.extension() == ".json") {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    return parse_batch(doc);
  }
  return parse_batch_toml(text, path.string());
}

json batch_to_json(const Batch& batch) {
  json list = json::array();
  for (const auto& s : batch.experiments) {
    const auto& c = s.integrator;
    list.push_back({{"name", s.name},
                    {"theta0", {{"mu", s.theta0.mu}, {"sigma2", s.theta0.sigma2}, {"beta", s.theta0.beta}}},
                    {"alpha0", {s.alpha0.a1, s.alpha0.a2, s.alpha0.a3}},
                    {"mode", to_string(c.mode)},
                    {"t_start", c.t_start},
                    {"t_end", c.t_end},
                    {"n_steps", c.n_steps},
                    {"lattice", {c.lattice_n, c.lattice_m}},
                    {"mcmc_sweeps", c.mcmc_sweeps},
                    {"seed", c.seed},
                    {"lambda_reg", c.lambda_reg},
                    {"warm_start", c.warm_start},
                    {"sigma2_floor", c.sigma2_floor},
                    {"acceptance", to_string(c.acceptance)},
                    {"christoffel_update", to_string(c.christoffel_update)},
                    {"repeats", s.repeats}});
  }
  return {{"version", batch.version}, {"rng", std::string(Rng::kAlgorithm)}, {"experiment", list}};
}

std::uint64_t repeat_seed(std::uint64_t seed, int repeat) {
  return repeat == 0 ? seed : derive_seed(seed, 100 + static_cast<std::uint64_t>(repeat));
}

}  // namespace gdisp
