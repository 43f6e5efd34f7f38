#include "isc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "isc/baselines.hpp"
#include "isc/errors.hpp"
#include "isc/evaluation.hpp"
#include "isc/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace isc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string sanitize_message(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return s;
}

// --- config plumbing -------------------------------------------------------

double resolve_number(const json& j, double sweep, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    double v;
    if (s == "$sweep")
      v = sweep;
    else if (s == "1-$sweep")
      v = 1.0 - sweep;
    else
      throw ParameterError(where + ": unrecognized placeholder '" + s +
                           "' (only \"$sweep\" and \"1-$sweep\" are understood)");
    if (std::isnan(v))
      throw ParameterError(where + ": placeholder '" + s +
                           "' used without a sweep context");
    return v;
  }
  throw ParameterError(where + ": expected a number or placeholder string");
}

int resolve_integer(const json& j, double sweep, const std::string& where) {
  const double v = resolve_number(j, sweep, where);
  const double r = std::llround(v);
  if (std::abs(v - r) > 1e-9)
    throw ParameterError(where + ": expected an integer, got " + fmt_g(v));
  return static_cast<int>(r);
}

const json& member(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParameterError(where + ": missing \"" + key + "\"");
  return *it;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      throw ParameterError(where + ": unknown key \"" + key + "\"");
}

std::uint64_t read_seed(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v < 0) throw ParameterError(where + ": seed must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }
  throw ParameterError(where + ": seed must be an integer");
}

const std::vector<std::string> kSweepVariables = {"n", "a0", "b0", "c0", "delta"};

}  // namespace

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names = {
      "isc", "isc_dmax", "isc_dmin", "isc_dbar",
      "rsc", "rsc_k1",   "score",    "score_k1"};
  return names;
}

bool is_known_method(const std::string& name) {
  const auto& names = known_methods();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ExperimentConfig parse_experiment_config(const json& j) {
  const std::string where = "experiment config";
  if (!j.is_object()) throw ParameterError(where + ": expected a JSON object");
  reject_unknown_keys(j,
                      {"name", "model", "sweep_variable", "sweep_values",
                       "replicates", "methods", "delta", "seed"},
                      where);

  ExperimentConfig cfg;
  const json& name = member(j, "name", where);
  if (!name.is_string() || name.get<std::string>().empty())
    throw ParameterError(where + ": \"name\" must be a nonempty string");
  cfg.name = name.get<std::string>();
  for (char c : cfg.name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      throw ParameterError(where + ": name may use letters, digits, '_', '-'");

  cfg.model = member(j, "model", where);
  if (!cfg.model.is_object())
    throw ParameterError(where + ": \"model\" must be an object");

  const json& sv = member(j, "sweep_variable", where);
  if (!sv.is_string()) throw ParameterError(where + ": \"sweep_variable\" must be a string");
  cfg.sweep_variable = sv.get<std::string>();
  if (std::find(kSweepVariables.begin(), kSweepVariables.end(), cfg.sweep_variable) ==
      kSweepVariables.end()) {
    std::string all;
    for (const auto& v : kSweepVariables) all += (all.empty() ? "" : ", ") + v;
    throw ParameterError(where + ": sweep_variable must be one of " + all);
  }

  const json& values = member(j, "sweep_values", where);
  if (!values.is_array() || values.empty())
    throw ParameterError(where + ": \"sweep_values\" must be a nonempty array");
  for (const json& v : values) {
    if (!v.is_number())
      throw ParameterError(where + ": sweep_values entries must be numbers");
    cfg.sweep_values.push_back(v.get<double>());
    if (cfg.sweep_variable == "delta" && cfg.sweep_values.back() < 0.0)
      throw ParameterError(where + ": swept delta values must be >= 0");
  }

  if (j.contains("replicates")) {
    cfg.replicates = member(j, "replicates", where).get<int>();
    if (cfg.replicates < 1) throw ParameterError(where + ": replicates must be >= 1");
  }

  if (j.contains("methods")) {
    const json& methods = j.at("methods");
    if (!methods.is_array() || methods.empty())
      throw ParameterError(where + ": \"methods\" must be a nonempty array");
    cfg.methods.clear();
    for (const json& m : methods) {
      if (!m.is_string() || !is_known_method(m.get<std::string>())) {
        std::string all;
        for (const auto& k : known_methods()) all += (all.empty() ? "" : ", ") + k;
        throw ParameterError(where + ": unknown method " + m.dump() +
                             " (known: " + all + ")");
      }
      cfg.methods.push_back(m.get<std::string>());
    }
    std::set<std::string> uniq(cfg.methods.begin(), cfg.methods.end());
    if (uniq.size() != cfg.methods.size())
      throw ParameterError(where + ": duplicate method");
  } else {
    cfg.methods = {"isc", "score", "score_k1", "rsc", "rsc_k1"};
  }

  if (j.contains("delta")) {
    cfg.delta = j.at("delta").get<double>();
    if (cfg.delta < 0.0) throw ParameterError(where + ": delta must be >= 0");
  }
  if (j.contains("seed")) cfg.seed = read_seed(j.at("seed"), where);
  return cfg;
}

json experiment_config_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["model"] = cfg.model;
  j["sweep_variable"] = cfg.sweep_variable;
  j["sweep_values"] = cfg.sweep_values;
  j["replicates"] = cfg.replicates;
  j["methods"] = cfg.methods;
  j["delta"] = cfg.delta;
  j["seed"] = cfg.seed;
  return j;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

// --- built-in experiment grids ---------------------------------------------

namespace {

json mixing_uniform(int k, double diag, double off) {
  json rows = json::array();
  for (int a = 0; a < k; ++a) {
    json row = json::array();
    for (int b = 0; b < k; ++b) row.push_back(a == b ? diag : off);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> grid(double start, double step, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = start + step * i;
  return v;
}

// (i+1)/denom for i in 0..count-1.  Computed by division, not accumulation,
// so the values match what a decimal literal in a config file parses to.
std::vector<double> fraction_grid(int denom, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = static_cast<double>(i + 1) / denom;
  return v;
}

ExperimentConfig builtin_base(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.replicates = 50;
  cfg.methods = {"isc", "score", "score_k1", "rsc", "rsc_k1"};
  cfg.delta = 0.1;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

const std::vector<std::string>& builtin_experiment_names() {
  static const std::vector<std::string> names = {
      "exp1a", "exp1b", "exp2a", "exp2b", "exp2c", "exp2d", "exp2e", "exp2f"};
  return names;
}

ExperimentConfig builtin_experiment(const std::string& name) {
  ExperimentConfig cfg = builtin_base(name);
  if (name == "exp1a" || name == "exp1b") {
    const int k = (name == "exp1a") ? 2 : 3;
    cfg.sweep_variable = "n";
    cfg.sweep_values = grid(40.0, 40.0, 10);
    cfg.model = {
        {"n", "$sweep"},
        {"k", k},
        {"mixing", mixing_uniform(k, 0.9, 0.5)},
        {"theta",
         {{"kind", "per_community"},
          {"values", (k == 2) ? json::array({0.2, 0.6}) : json::array({0.2, 0.6, 0.8})}}},
        {"membership", {{"kind", "iid_uniform"}}},
    };
  } else if (name == "exp2a") {
    cfg.sweep_variable = "a0";
    cfg.sweep_values = fraction_grid(20, 10);
    cfg.model = {
        {"n", 400},
        {"k", 2},
        {"mixing", mixing_uniform(2, 0.9, 0.5)},
        {"theta", {{"kind", "per_community"}, {"values", {"1-$sweep", "$sweep"}}}},
        {"membership", {{"kind", "iid_uniform"}}},
    };
  } else if (name == "exp2b" || name == "exp2c") {
    cfg.sweep_variable = "b0";
    cfg.sweep_values = fraction_grid(20, 10);
    cfg.model = {
        {"n", 400},
        {"k", 2},
        {"mixing", {{0.5, "$sweep"}, {"$sweep", 0.5}}},
        {"theta",
         (name == "exp2b")
             ? json{{"kind", "per_community"}, {"values", {0.2, 0.6}}}
             : json{{"kind", "quadratic"}, {"base", 0.5}, {"scale", 0.5}}},
        {"membership",
         (name == "exp2b") ? json{{"kind", "iid_uniform"}}
                           : json{{"kind", "blocks"}, {"sizes", {100, "rest"}}}},
    };
  } else if (name == "exp2d" || name == "exp2e" || name == "exp2f") {
    cfg.sweep_variable = "c0";
    cfg.sweep_values = grid(1.0, 1.0, 9);
    json theta;
    if (name == "exp2d")
      theta = {{"kind", "per_community"}, {"values", {0.4, 0.6}}};
    else if (name == "exp2e")
      theta = {{"kind", "quadratic"}, {"base", 0.5}, {"scale", 0.5}};
    else
      theta = {{"kind", "linear"}, {"base", 0.5}, {"scale", 0.5}};
    cfg.model = {
        {"n", 400},
        {"k", 2},
        {"mixing", mixing_uniform(2, 0.9, 0.5)},
        {"theta", theta},
        {"membership", {{"kind", "ratio_first"}, {"c0", "$sweep"}}},
    };
  } else {
    std::string all;
    for (const auto& k : builtin_experiment_names()) all += (all.empty() ? "" : ", ") + k;
    throw ParameterError("unknown experiment '" + name + "' (available: " + all + ")");
  }
  return cfg;
}

// --- model instantiation ----------------------------------------------------

DcsbmParams instantiate_model_json(const json& model_in, double sweep_value,
                                   std::uint64_t membership_seed) {
  // Accept a whole experiment config too; its "model" member is what counts.
  const json& model =
      (model_in.is_object() && model_in.contains("model")) ? model_in.at("model") : model_in;
  const std::string where = "model config";
  if (!model.is_object()) throw ParameterError(where + ": expected a JSON object");
  reject_unknown_keys(model, {"n", "k", "mixing", "theta", "membership"}, where);

  DcsbmParams params;
  params.n = resolve_integer(member(model, "n", where), sweep_value, where + " n");
  params.k = resolve_integer(member(model, "k", where), sweep_value, where + " k");
  if (params.n < 1) throw ParameterError(where + ": n must be >= 1");
  if (params.k < 1) throw ParameterError(where + ": k must be >= 1");

  // Membership first: the per-community theta rule needs it.
  const json& membership = member(model, "membership", where);
  const std::string mkind =
      member(membership, "kind", where + " membership").get<std::string>();
  if (mkind == "iid_uniform") {
    reject_unknown_keys(membership, {"kind"}, where + " membership");
    params.community = membership_iid_uniform(params.n, params.k, membership_seed);
  } else if (mkind == "blocks") {
    reject_unknown_keys(membership, {"kind", "sizes"}, where + " membership");
    const json& sizes_j = member(membership, "sizes", where + " membership");
    if (!sizes_j.is_array() || static_cast<int>(sizes_j.size()) != params.k)
      throw ParameterError(where + ": membership sizes must list K block sizes");
    std::vector<int> sizes;
    int rest_at = -1, total = 0;
    for (const json& s : sizes_j) {
      if (s.is_string() && s.get<std::string>() == "rest") {
        if (rest_at >= 0)
          throw ParameterError(where + ": at most one \"rest\" block");
        rest_at = static_cast<int>(sizes.size());
        sizes.push_back(0);
      } else {
        sizes.push_back(resolve_integer(s, sweep_value, where + " membership size"));
        total += sizes.back();
      }
    }
    if (rest_at >= 0) sizes[rest_at] = params.n - total;
    params.community = membership_blocks(sizes);
  } else if (mkind == "ratio_first") {
    reject_unknown_keys(membership, {"kind", "c0"}, where + " membership");
    if (params.k != 2)
      throw ParameterError(where + ": ratio_first membership requires k = 2");
    const double c0 =
        resolve_number(member(membership, "c0", where + " membership"), sweep_value,
                       where + " membership c0");
    params.community = membership_ratio_first(params.n, c0);
  } else {
    throw ParameterError(where + ": membership kind must be iid_uniform, blocks, or ratio_first");
  }

  const json& theta = member(model, "theta", where);
  const std::string tkind = member(theta, "kind", where + " theta").get<std::string>();
  if (tkind == "per_community") {
    reject_unknown_keys(theta, {"kind", "values"}, where + " theta");
    const json& values_j = member(theta, "values", where + " theta");
    if (!values_j.is_array() || static_cast<int>(values_j.size()) != params.k)
      throw ParameterError(where + ": theta values must list K numbers");
    std::vector<double> values;
    for (const json& v : values_j)
      values.push_back(resolve_number(v, sweep_value, where + " theta value"));
    params.theta = theta_per_community(values, params.community);
  } else if (tkind == "quadratic" || tkind == "linear") {
    reject_unknown_keys(theta, {"kind", "base", "scale"}, where + " theta");
    double base = 0.5, scale = 0.5;
    if (theta.contains("base"))
      base = resolve_number(theta.at("base"), sweep_value, where + " theta base");
    if (theta.contains("scale"))
      scale = resolve_number(theta.at("scale"), sweep_value, where + " theta scale");
    params.theta = (tkind == "quadratic") ? theta_quadratic(params.n, base, scale)
                                          : theta_linear(params.n, base, scale);
  } else {
    throw ParameterError(where + ": theta kind must be per_community, quadratic, or linear");
  }

  const json& mixing = member(model, "mixing", where);
  if (!mixing.is_array() || static_cast<int>(mixing.size()) != params.k)
    throw ParameterError(where + ": mixing must be a KxK array");
  params.mixing.resize(params.k, params.k);
  for (int a = 0; a < params.k; ++a) {
    const json& row = mixing.at(a);
    if (!row.is_array() || static_cast<int>(row.size()) != params.k)
      throw ParameterError(where + ": mixing must be a KxK array");
    for (int b = 0; b < params.k; ++b)
      params.mixing(a, b) = resolve_number(row.at(b), sweep_value, where + " mixing entry");
  }

  validate_for_sampling(params);
  return params;
}

DcsbmParams instantiate_model(const ExperimentConfig& cfg, double sweep_value,
                              std::uint64_t membership_seed) {
  return instantiate_model_json(cfg.model, sweep_value, membership_seed);
}

// --- hashing ----------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a64(experiment_config_json(cfg).dump());
}

std::string hash_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

// --- experiment runner ------------------------------------------------------

namespace {

std::vector<int> run_method_labels(const std::string& method, const Graph& g, int k,
                                   double delta, SolverMode solver, std::uint64_t seed) {
  if (method == "isc" || method == "isc_dmax" || method == "isc_dmin" ||
      method == "isc_dbar") {
    IscOptions opt;
    opt.delta = delta;
    opt.solver = solver;
    if (method == "isc_dmax")
      opt.variant = DVariant::DMax;
    else if (method == "isc_dmin")
      opt.variant = DVariant::DMin;
    else if (method == "isc_dbar")
      opt.variant = DVariant::DBar;
    return isc_cluster(g, k, opt, seed).labels;
  }
  if (method == "rsc" || method == "rsc_k1") {
    RscOptions opt;
    opt.n_eigs = (method == "rsc_k1") ? k + 1 : k;
    opt.solver = solver;
    return rsc_cluster(g, k, opt, seed).labels;
  }
  if (method == "score" || method == "score_k1") {
    ScoreOptions opt;
    opt.n_eigs = (method == "score_k1") ? k + 1 : k;
    opt.solver = solver;
    return score_cluster(g, k, opt, seed).labels;
  }
  throw ParameterError("unknown method '" + method + "'");
}

json row_to_json(const ResultRow& row, const std::string& hash, std::uint64_t seed,
                 const std::string& name) {
  json j;
  j["config_hash"] = hash;
  j["seed"] = seed;
  j["name"] = name;
  j["point"] = row.point;
  j["sweep_value"] = row.sweep_value;
  j["replicate"] = row.replicate;
  j["method"] = row.method;
  j["failed"] = row.failed;
  j["message"] = row.message;
  j["rate"] = row.rate;
  j["mismatches"] = row.mismatches;
  j["ws_a"] = row.ws_a;  // NaN serializes as null
  j["ws_l"] = row.ws_l;
  return j;
}

double json_or_nan(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return kNan;
  return it->get<double>();
}

std::vector<SeriesPoint> aggregate(const ResultTable& table,
                                   const std::function<bool(const ResultRow&)>& take,
                                   const std::function<double(const ResultRow&)>& value) {
  const int points = static_cast<int>(table.sweep_values.size());
  std::vector<SeriesPoint> series(points);
  for (int pi = 0; pi < points; ++pi) {
    series[pi].sweep_value = table.sweep_values[pi];
    double sum = 0.0;
    int count = 0;
    for (const ResultRow& row : table.rows) {
      if (row.point != pi || !take(row)) continue;
      sum += value(row);
      ++count;
    }
    series[pi].count = count;
    series[pi].mean = (count > 0) ? sum / count : kNan;
    if (count >= 2) {
      double ss = 0.0;
      for (const ResultRow& row : table.rows) {
        if (row.point != pi || !take(row)) continue;
        const double d = value(row) - series[pi].mean;
        ss += d * d;
      }
      series[pi].std_error = std::sqrt(ss / (count - 1)) / std::sqrt(double(count));
    }
  }
  return series;
}

void emit_tables(const ResultTable& table, const ExperimentConfig& cfg,
                 const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  for (const auto& [method, series] : table.series)
    write_text_atomic((dir / (table.name + "_" + method + ".series.tsv")).string(),
                      format_series_tsv(series));
  write_text_atomic((dir / (table.name + "_ws_A.series.tsv")).string(),
                    format_series_tsv(table.ws_a_series));
  write_text_atomic((dir / (table.name + "_ws_L.series.tsv")).string(),
                    format_series_tsv(table.ws_l_series));
  write_text_atomic((dir / (table.name + "_rows.tsv")).string(),
                    format_rows_tsv(table.rows));

  json summary;
  summary["name"] = table.name;
  summary["config_hash"] = hash_hex(table.config_hash);
  summary["config"] = experiment_config_json(cfg);
  auto series_json = [](const std::vector<SeriesPoint>& series) {
    json arr = json::array();
    for (const SeriesPoint& p : series)
      arr.push_back({{"sweep_value", p.sweep_value},
                     {"mean", p.mean},
                     {"std_error", p.std_error},
                     {"count", p.count}});
    return arr;
  };
  summary["series"] = json::object();
  for (const auto& [method, series] : table.series)
    summary["series"][method] = series_json(series);
  summary["ws_a"] = series_json(table.ws_a_series);
  summary["ws_l"] = series_json(table.ws_l_series);
  write_text_atomic((dir / (table.name + "_summary.json")).string(),
                    summary.dump(2) + "\n");
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  // Round-trip through the parser so hand-built configs get the same checks.
  const ExperimentConfig checked = parse_experiment_config(experiment_config_json(cfg));

  const int points = static_cast<int>(checked.sweep_values.size());
  const int reps = checked.replicates;
  const int n_methods = static_cast<int>(checked.methods.size());
  const bool sweeping_delta = (checked.sweep_variable == "delta");

  ResultTable table;
  table.name = checked.name;
  table.config_hash = config_hash(checked);
  table.replicates = reps;
  table.sweep_values = checked.sweep_values;
  table.methods = checked.methods;
  table.rows.resize(static_cast<std::size_t>(points) * reps * n_methods);

  // Fail on an invalid sweep point before any clustering work starts.
  for (int pi = 0; pi < points; ++pi)
    instantiate_model(checked, checked.sweep_values[pi],
                      rng::derive_seed(rng::derive_seed(checked.seed, pi * reps), 0));

  // Fixed slot metadata; compute and resume both fill outcomes only.
  for (int pi = 0; pi < points; ++pi)
    for (int ri = 0; ri < reps; ++ri)
      for (int mi = 0; mi < n_methods; ++mi) {
        ResultRow& row = table.rows[(static_cast<std::size_t>(pi) * reps + ri) * n_methods + mi];
        row.point = pi;
        row.sweep_value = checked.sweep_values[pi];
        row.replicate = ri;
        row.method = checked.methods[mi];
      }

  // Restore finished tasks from the ledger when resuming.
  const std::string hash = hash_hex(table.config_hash);
  const fs::path ledger_path = fs::path(options.out_dir) / "ledger.ndjson";
  const bool read_ledger = !options.out_dir.empty() && options.resume;
  std::vector<char> have(table.rows.size(), 0);
  if (read_ledger && fs::exists(ledger_path)) {
    std::ifstream in(ledger_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw DataError(ledger_path.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
      }
      if (j.value("config_hash", "") != hash) continue;
      if (read_seed(j.at("seed"), "ledger") != checked.seed) continue;
      const int pi = j.at("point").get<int>();
      const int ri = j.at("replicate").get<int>();
      const std::string method = j.at("method").get<std::string>();
      const auto mit = std::find(checked.methods.begin(), checked.methods.end(), method);
      if (pi < 0 || pi >= points || ri < 0 || ri >= reps || mit == checked.methods.end())
        throw DataError(ledger_path.string() + ":" + std::to_string(line_no) +
                        ": row does not fit the config it is keyed to");
      const std::size_t slot =
          (static_cast<std::size_t>(pi) * reps + ri) * n_methods +
          (mit - checked.methods.begin());
      ResultRow& row = table.rows[slot];
      row.failed = j.at("failed").get<bool>();
      row.message = j.at("message").get<std::string>();
      row.rate = json_or_nan(j, "rate");
      row.mismatches = j.at("mismatches").get<int>();
      row.ws_a = json_or_nan(j, "ws_a");
      row.ws_l = json_or_nan(j, "ws_l");
      have[slot] = 1;
    }
  }

  const int tasks = points * reps;
  std::vector<char> computed(tasks, 0);
#pragma omp parallel for schedule(dynamic)
  for (int task = 0; task < tasks; ++task) {
    const int pi = task / reps;
    const int ri = task % reps;
    const std::size_t base = static_cast<std::size_t>(task) * n_methods;
    bool complete = true;
    for (int mi = 0; mi < n_methods; ++mi) complete = complete && have[base + mi];
    if (complete) continue;
    computed[task] = 1;

    const double v = checked.sweep_values[pi];
    const double delta = sweeping_delta ? v : checked.delta;
    const std::uint64_t task_seed = rng::derive_seed(checked.seed, task);

    double ws_a = kNan, ws_l = kNan;
    bool model_ok = true;
    std::string model_message;
    Graph g;
    DcsbmParams params;
    try {
      params = instantiate_model(checked, v, rng::derive_seed(task_seed, 0));
      g = sample_adjacency(params, rng::derive_seed(task_seed, 1));
      try {
        ws_a = weak_signal_quantity(
            leading_eigenpairs(g.dense_adjacency(), params.k + 1, options.solver),
            params.k);
      } catch (const std::exception&) {
      }
      try {
        const RegularizedLaplacian l = build_regularized_laplacian(g, delta);
        ws_l = weak_signal_quantity(leading_eigenpairs(l, params.k + 1, options.solver),
                                    params.k);
      } catch (const std::exception&) {
      }
    } catch (const std::exception& e) {
      model_ok = false;
      model_message = std::string("model: ") + e.what();
    }

    for (int mi = 0; mi < n_methods; ++mi) {
      ResultRow& row = table.rows[base + mi];
      row.ws_a = ws_a;
      row.ws_l = ws_l;
      if (!model_ok) {
        row.failed = true;
        row.message = model_message;
        row.rate = kNan;
        row.mismatches = -1;
        continue;
      }
      try {
        const std::vector<int> labels = run_method_labels(
            row.method, g, params.k, delta, options.solver, rng::derive_seed(task_seed, 2 + mi));
        const ErrorReport report = clustering_error(labels, params.community);
        row.rate = report.rate;
        row.mismatches = report.mismatches;
      } catch (const std::exception& e) {
        row.failed = true;
        row.message = e.what();
        row.rate = kNan;
        row.mismatches = -1;
      }
    }
  }

  // Aggregates. Error-rate series skip failed rows; the weak-signal series
  // reads the first method's rows (the quantities repeat across methods) and
  // skips rows whose ws computation failed.
  const std::string first_method = checked.methods.front();
  for (const std::string& method : checked.methods)
    table.series[method] = aggregate(
        table, [&](const ResultRow& r) { return r.method == method && !r.failed; },
        [](const ResultRow& r) { return r.rate; });
  table.ws_a_series = aggregate(
      table,
      [&](const ResultRow& r) { return r.method == first_method && std::isfinite(r.ws_a); },
      [](const ResultRow& r) { return r.ws_a; });
  table.ws_l_series = aggregate(
      table,
      [&](const ResultRow& r) { return r.method == first_method && std::isfinite(r.ws_l); },
      [](const ResultRow& r) { return r.ws_l; });

  if (!options.out_dir.empty()) {
    emit_tables(table, checked, options.out_dir);
    // The ledger is an append-only journal of computed rows: a no-resume run
    // recomputes everything and appends its own copy, it never rewrites.
    fs::create_directories(ledger_path.parent_path());
    std::ofstream out(ledger_path, std::ios::app);
    if (!out) throw DataError("cannot open " + ledger_path.string() + " for append");
    for (int task = 0; task < tasks; ++task) {
      if (!computed[task]) continue;
      for (int mi = 0; mi < n_methods; ++mi) {
        const ResultRow& row = table.rows[static_cast<std::size_t>(task) * n_methods + mi];
        out << row_to_json(row, hash, checked.seed, checked.name).dump() << "\n";
      }
    }
  }
  return table;
}

// --- fixed-graph sweeps ------------------------------------------------------

std::vector<DeltaSweepRow> run_delta_sweep(const Graph& g, const LabelVector& truth,
                                           int k, const std::vector<double>& deltas,
                                           std::uint64_t seed) {
  if (static_cast<int>(truth.labels.size()) != g.node_count())
    throw ParameterError("label count does not match the graph");
  for (double d : deltas)
    if (d < 0.0) throw ParameterError("delta values must be >= 0");

  std::vector<DeltaSweepRow> rows;
  for (double d : deltas) {
    DeltaSweepRow row;
    row.delta = d;
    try {
      IscOptions opt;
      opt.delta = d;
      const Partition p = isc_cluster(g, k, opt, seed);
      const ErrorReport report = clustering_error(p.labels, truth.labels);
      row.mismatches = report.mismatches;
      row.rate = report.rate;
    } catch (const std::exception& e) {
      row.failed = true;
      row.message = e.what();
      row.mismatches = -1;
      row.rate = kNan;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<DVariantRow> run_d_variant_table(const Graph& g, const LabelVector& truth,
                                             int k, std::uint64_t seed, double delta) {
  if (static_cast<int>(truth.labels.size()) != g.node_count())
    throw ParameterError("label count does not match the graph");

  std::vector<DVariantRow> rows;
  for (DVariant variant :
       {DVariant::Midpoint, DVariant::DMax, DVariant::DMin, DVariant::DBar}) {
    IscOptions opt;
    opt.delta = delta;
    opt.variant = variant;
    const IscDetail detail = isc_cluster_detail(g, k, opt, seed);
    const ErrorReport report = clustering_error(detail.partition.labels, truth.labels);
    DVariantRow row;
    row.variant = variant;
    row.d_used = detail.d_used;
    row.mismatches = report.mismatches;
    row.rate = report.rate;
    rows.push_back(row);
  }
  return rows;
}

// --- emitters ----------------------------------------------------------------

std::string format_series_tsv(const std::vector<SeriesPoint>& series) {
  std::string out = "sweep_value\tmean\tstd_error\tcount\n";
  for (const SeriesPoint& p : series)
    out += fmt_g(p.sweep_value) + "\t" + fmt_g(p.mean) + "\t" + fmt_g(p.std_error) +
           "\t" + std::to_string(p.count) + "\n";
  return out;
}

std::string format_rows_tsv(const std::vector<ResultRow>& rows) {
  std::string out =
      "point\tsweep_value\treplicate\tmethod\tstatus\trate\tmismatches\tws_a\tws_l\tmessage\n";
  for (const ResultRow& r : rows)
    out += std::to_string(r.point) + "\t" + fmt_g(r.sweep_value) + "\t" +
           std::to_string(r.replicate) + "\t" + r.method + "\t" +
           (r.failed ? "failed" : "ok") + "\t" + fmt_g(r.rate) + "\t" +
           std::to_string(r.mismatches) + "\t" + fmt_g(r.ws_a) + "\t" + fmt_g(r.ws_l) +
           "\t" + sanitize_message(r.message) + "\n";
  return out;
}

std::string format_delta_sweep_tsv(const std::vector<DeltaSweepRow>& rows) {
  std::string out = "delta\tstatus\tmismatches\trate\tmessage\n";
  for (const DeltaSweepRow& r : rows)
    out += fmt_g(r.delta) + "\t" + (r.failed ? "failed" : "ok") + "\t" +
           std::to_string(r.mismatches) + "\t" + fmt_g(r.rate) + "\t" +
           sanitize_message(r.message) + "\n";
  return out;
}

std::string format_d_variant_tsv(const std::vector<DVariantRow>& rows) {
  std::string out = "variant\td_used\tmismatches\trate\n";
  for (const DVariantRow& r : rows)
    out += std::string(to_string(r.variant)) + "\t" + fmt_g(r.d_used) + "\t" +
           std::to_string(r.mismatches) + "\t" + fmt_g(r.rate) + "\n";
  return out;
}

}  // namespace isc
