#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "isc/clustering.hpp"
#include "isc/dcsbm.hpp"
#include "isc/graph.hpp"
#include "isc/spectral.hpp"

namespace isc {

// Method descriptors the experiment runner understands.
const std::vector<std::string>& known_methods();
bool is_known_method(const std::string& name);

// A sweep over one model parameter.  `model` is a template for DcsbmParams
// where any number may instead be the string "$sweep" (the swept value) or
// "1-$sweep" (its complement); see instantiate_model for the schema.
struct ExperimentConfig {
  std::string name;
  nlohmann::json model;
  std::string sweep_variable;  // one of: n, a0, b0, c0, delta
  std::vector<double> sweep_values;
  int replicates = 50;
  std::vector<std::string> methods;
  double delta = 0.1;  // regularization for isc/ws rows (unless sweeping delta)
  std::uint64_t seed = 0;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
nlohmann::json experiment_config_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

// Ready-made configs for the standard sweep suite (exp1a..exp2f).
const std::vector<std::string>& builtin_experiment_names();
ExperimentConfig builtin_experiment(const std::string& name);

// Materialize model parameters for one swept value.  Membership rules that
// involve randomness consume `membership_seed`; the result is validated for
// sampling before being returned.
DcsbmParams instantiate_model(const ExperimentConfig& cfg, double sweep_value,
                              std::uint64_t membership_seed);

// Same, straight from a model document (or an experiment config document,
// whose "model" member is then used).  Pass NaN as sweep_value when there is
// no sweep context; placeholders then raise a parameter error.
DcsbmParams instantiate_model_json(const nlohmann::json& model, double sweep_value,
                                   std::uint64_t membership_seed);

// One (sweep point, replicate, method) outcome.  The weak-signal quantities
// describe the sampled graph, so they repeat across the methods of one
// replicate; they are NaN when their own computation failed.
struct ResultRow {
  int point = 0;  // index into sweep_values
  double sweep_value = 0.0;
  int replicate = 0;
  std::string method;
  bool failed = false;
  std::string message;
  double rate = 0.0;
  int mismatches = 0;
  double ws_a = 0.0;  // 1 - |lambda_{K+1}/lambda_K| from the adjacency
  double ws_l = 0.0;  // same quantity from the regularized Laplacian
};

struct SeriesPoint {
  double sweep_value = 0.0;
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(count)
  int count = 0;           // rows that entered the mean
};

struct ResultTable {
  std::string name;
  std::uint64_t config_hash = 0;
  int replicates = 0;
  std::vector<double> sweep_values;
  std::vector<std::string> methods;
  std::vector<ResultRow> rows;  // fixed order: point-major, then replicate, then method
  std::map<std::string, std::vector<SeriesPoint>> series;  // error rate per method
  std::vector<SeriesPoint> ws_a_series;
  std::vector<SeriesPoint> ws_l_series;
};

struct RunOptions {
  std::string out_dir;  // empty: compute only, write nothing
  bool resume = true;   // reuse ledger rows matching (config hash, seed)
  SolverMode solver = SolverMode::Auto;
};

// Runs the full sweep grid.  Replicates execute in a parallel pool with
// per-task derived seeds; rows land in preassigned slots so the output is
// identical however the pool schedules them.  A method failure becomes a
// failed row and the run continues.  With an out_dir, emits per-method
// series files, weak-signal series, the raw row table, a summary document,
// and appends newly computed rows to the ledger.
ResultTable run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

struct DeltaSweepRow {
  double delta = 0.0;
  bool failed = false;
  std::string message;
  int mismatches = 0;
  double rate = 0.0;
};

// isc_cluster on a fixed graph across a delta grid (mismatches vs truth).
// A singular scaling (delta = 0 with an isolated node) is recorded as a
// failed row rather than aborting the sweep.
std::vector<DeltaSweepRow> run_delta_sweep(const Graph& g, const LabelVector& truth,
                                           int k, const std::vector<double>& deltas,
                                           std::uint64_t seed);

struct DVariantRow {
  DVariant variant = DVariant::Midpoint;
  double d_used = 0.0;
  int mismatches = 0;
  double rate = 0.0;
};

// The four regularization-scale variants side by side at a fixed delta.
std::vector<DVariantRow> run_d_variant_table(const Graph& g, const LabelVector& truth,
                                             int k, std::uint64_t seed,
                                             double delta = 0.1);

// Stable 64-bit content hash used to key ledger records.
std::uint64_t fnv1a64(const std::string& text);
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hash_hex(std::uint64_t value);

// Text emitters, exposed so tests can pin the formats.
std::string format_series_tsv(const std::vector<SeriesPoint>& series);
std::string format_rows_tsv(const std::vector<ResultRow>& rows);
std::string format_delta_sweep_tsv(const std::vector<DeltaSweepRow>& rows);
std::string format_d_variant_tsv(const std::vector<DVariantRow>& rows);

}  // namespace isc
