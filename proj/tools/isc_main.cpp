// Command-line front end: clustering, model sampling, evaluation, and the
// experiment suite behind one binary with subcommands.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

#include "isc/baselines.hpp"
#include "isc/clustering.hpp"
#include "isc/errors.hpp"
#include "isc/evaluation.hpp"
#include "isc/graph.hpp"
#include "isc/harness.hpp"
#include "isc/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;      // bad flags / invalid parameters
constexpr int kExitData = 3;       // unreadable or malformed input files
constexpr int kExitNumerical = 4;  // solver / conditioning failures

std::string fmt_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string default_data_dir() {
  const char* env = std::getenv("ISC_DATA_DIR");
  return (env && *env) ? std::string(env) : std::string("data");
}

json values_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json int_vector_json(const std::vector<int>& v) {
  json arr = json::array();
  for (int x : v) arr.push_back(x);
  return arr;
}

// --- cluster ---------------------------------------------------------------

struct ClusterArgs {
  std::string edges;
  int k = 0;
  std::string method = "isc";
  double delta = 0.1;
  std::string d_variant = "midpoint";
  std::string n_eigs = "K";
  std::uint64_t seed = 0;
  int restarts = 50;
  std::string out;
};

void run_cluster(const ClusterArgs& args) {
  const isc::Graph g = isc::load_edge_list(args.edges);
  const std::string out = args.out.empty() ? args.edges + ".labels" : args.out;
  const int extra = (args.n_eigs == "K+1") ? 1 : 0;

  json meta;
  meta["command"] = "cluster";
  meta["edges"] = args.edges;
  meta["n"] = g.node_count();
  meta["edge_count"] = g.edge_count();
  meta["k"] = args.k;
  meta["method"] = args.method;
  meta["seed"] = args.seed;
  meta["restarts"] = args.restarts;
  meta["rng"] = isc::rng::kGeneratorName;

  std::vector<int> labels;
  if (args.method == "isc") {
    isc::IscOptions opt;
    opt.delta = args.delta;
    opt.variant = isc::parse_d_variant(args.d_variant);
    opt.restarts = args.restarts;
    const isc::IscDetail detail = isc::isc_cluster_detail(g, args.k, opt, args.seed);
    labels = detail.partition.labels;
    meta["delta"] = args.delta;
    meta["d_variant"] = args.d_variant;
    meta["d_used"] = detail.d_used;
    meta["eigenvalues"] = values_json(detail.eigs.values);
    meta["flagged_rows"] = detail.flagged_rows;
    meta["sizes"] = int_vector_json(detail.partition.sizes);
    meta["inertia"] = detail.partition.inertia;
  } else if (args.method == "score") {
    isc::ScoreOptions opt;
    opt.n_eigs = args.k + extra;
    opt.restarts = args.restarts;
    const isc::ScoreDetail detail = isc::score_cluster_detail(g, args.k, opt, args.seed);
    labels = detail.partition.labels;
    meta["n_eigs"] = opt.n_eigs;
    meta["threshold"] = detail.threshold_used;
    meta["ratio_degenerate"] = detail.ratio_degenerate;
    meta["sizes"] = int_vector_json(detail.partition.sizes);
  } else {  // rsc
    isc::RscOptions opt;
    opt.n_eigs = args.k + extra;
    opt.restarts = args.restarts;
    const isc::RscDetail detail = isc::rsc_cluster_detail(g, args.k, opt, args.seed);
    labels = detail.partition.labels;
    meta["n_eigs"] = opt.n_eigs;
    meta["tau"] = detail.tau_used;
    meta["sizes"] = int_vector_json(detail.partition.sizes);
  }

  isc::save_labels(out, labels);
  if (!g.original_ids().empty()) {
    std::string idmap;
    for (long long id : g.original_ids()) idmap += std::to_string(id) + "\n";
    isc::write_text_atomic(out + ".idmap", idmap);
    meta["idmap"] = out + ".idmap";
  }
  isc::write_text_atomic(out + ".meta.json", meta.dump(2) + "\n");
  std::cout << "wrote " << out << " (" << g.node_count() << " labels)\n";
}

// --- generate ----------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::string out_prefix;
};

void run_generate(const GenerateArgs& args) {
  const std::string text = isc::read_text_file(args.config);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw isc::DataError(args.config + ": " + e.what());
  }
  const isc::DcsbmParams params = isc::instantiate_model_json(
      doc, std::numeric_limits<double>::quiet_NaN(), isc::rng::derive_seed(args.seed, 0));
  const isc::Graph g = isc::sample_adjacency(params, isc::rng::derive_seed(args.seed, 1));

  isc::save_edge_list(args.out_prefix + ".edges", g);
  isc::save_labels(args.out_prefix + ".labels", params.community);
  json meta;
  meta["command"] = "generate";
  meta["config"] = args.config;
  meta["n"] = params.n;
  meta["k"] = params.k;
  meta["edge_count"] = g.edge_count();
  meta["seed"] = args.seed;
  meta["rng"] = isc::rng::kGeneratorName;
  isc::write_text_atomic(args.out_prefix + ".meta.json", meta.dump(2) + "\n");
  std::cout << "wrote " << args.out_prefix << ".edges (" << g.edge_count()
            << " edges), " << args.out_prefix << ".labels\n";
}

// --- eval ----------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string report;
};

void run_eval(const EvalArgs& args) {
  const isc::LabelVector pred = isc::load_labels(args.pred);
  const isc::LabelVector truth = isc::load_labels(args.truth);
  if (pred.labels.size() != truth.labels.size())
    throw isc::DataError("label files differ in length: " + args.pred + " has " +
                         std::to_string(pred.labels.size()) + ", " + args.truth +
                         " has " + std::to_string(truth.labels.size()));

  const isc::ErrorReport report = isc::clustering_error(pred.labels, truth.labels);
  std::cout << report.mismatches << "/" << pred.labels.size() << ", rate "
            << fmt_g(report.rate) << "\n";
  std::cout << "best_perm:";
  for (std::size_t p = 0; p < report.best_perm.size(); ++p)
    std::cout << " " << (p + 1) << "->" << report.best_perm[p];
  std::cout << "\n";

  if (!args.report.empty()) {
    json doc;
    doc["pred"] = args.pred;
    doc["truth"] = args.truth;
    doc["n"] = pred.labels.size();
    doc["mismatches"] = report.mismatches;
    doc["rate"] = report.rate;
    doc["best_perm"] = int_vector_json(report.best_perm);
    isc::write_text_atomic(args.report, doc.dump(2) + "\n");
  }
}

// --- experiment -----------------------------------------------------------------

struct ExperimentArgs {
  std::string name;
  std::string config;
  int replicates = -1;
  long long seed = -1;
  std::string out = "results";
  bool no_resume = false;
};

void run_experiment_cmd(const ExperimentArgs& args) {
  if (args.name.empty() == args.config.empty())
    throw isc::ParameterError("pass exactly one of --name or --config");
  isc::ExperimentConfig cfg = args.name.empty()
                                  ? isc::load_experiment_config(args.config)
                                  : isc::builtin_experiment(args.name);
  if (args.replicates > 0) cfg.replicates = args.replicates;
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);

  isc::RunOptions options;
  options.out_dir = args.out;
  options.resume = !args.no_resume;
  const isc::ResultTable table = isc::run_experiment(cfg, options);

  std::cout << "experiment " << table.name << " (config " << isc::hash_hex(table.config_hash)
            << "), tables under " << args.out << "\n";
  std::cout << "method\tsweep_value\tmean\tstd_error\tcount\n";
  for (const std::string& method : table.methods)
    for (const isc::SeriesPoint& p : table.series.at(method))
      std::cout << method << "\t" << fmt_g(p.sweep_value) << "\t" << fmt_g(p.mean)
                << "\t" << fmt_g(p.std_error) << "\t" << p.count << "\n";
  for (const isc::SeriesPoint& p : table.ws_a_series)
    std::cout << "ws_A\t" << fmt_g(p.sweep_value) << "\t" << fmt_g(p.mean) << "\t"
              << fmt_g(p.std_error) << "\t" << p.count << "\n";
  for (const isc::SeriesPoint& p : table.ws_l_series)
    std::cout << "ws_L\t" << fmt_g(p.sweep_value) << "\t" << fmt_g(p.mean) << "\t"
              << fmt_g(p.std_error) << "\t" << p.count << "\n";
}

// --- sweep-delta -------------------------------------------------------------------

struct SweepDeltaArgs {
  std::string edges;
  std::string labels;
  int k = 0;
  std::vector<double> deltas;
  std::uint64_t seed = 0;
  std::string out;
};

void run_sweep_delta(const SweepDeltaArgs& args) {
  const isc::Graph g = isc::load_edge_list(args.edges);
  const isc::LabelVector truth = isc::load_labels(args.labels, g.node_count());
  const auto rows = isc::run_delta_sweep(g, truth, args.k, args.deltas, args.seed);
  const std::string table = isc::format_delta_sweep_tsv(rows);
  std::cout << table;
  if (!args.out.empty()) isc::write_text_atomic(args.out, table);
}

// --- d-variants ----------------------------------------------------------------------

struct DVariantsArgs {
  std::string edges;
  std::string labels;
  int k = 0;
  double delta = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

void run_d_variants(const DVariantsArgs& args) {
  const isc::Graph g = isc::load_edge_list(args.edges);
  const isc::LabelVector truth = isc::load_labels(args.labels, g.node_count());
  const auto rows = isc::run_d_variant_table(g, truth, args.k, args.seed, args.delta);
  const std::string table = isc::format_d_variant_tsv(rows);
  std::cout << table;
  if (!args.out.empty()) isc::write_text_atomic(args.out, table);
}

// --- fetch -------------------------------------------------------------------------

struct FetchArgs {
  std::string url;
  std::string path;
  std::string out;
};

void run_fetch(const FetchArgs& args);

}  // namespace

// httplib pulls in a lot; keep its inclusion at file end so the main
// translation unit stays readable.
#include <httplib.h>

namespace {

void run_fetch(const FetchArgs& args) {
  if (args.url.empty() == args.path.empty())
    throw isc::ParameterError("pass exactly one of --url or --path");

  std::string out = args.out;
  if (out.empty()) {
    const std::string source = args.url.empty() ? args.path : args.url;
    const auto slash = source.find_last_of('/');
    const std::string base =
        (slash == std::string::npos) ? source : source.substr(slash + 1);
    if (base.empty()) throw isc::ParameterError("cannot infer a file name; pass --out");
    out = (fs::path(default_data_dir()) / base).string();
  }

  if (!args.path.empty()) {
    isc::write_text_atomic(out, isc::read_text_file(args.path));
    std::cout << "copied " << args.path << " -> " << out << "\n";
    return;
  }

  // Split http://host[:port]/target
  const std::string& url = args.url;
  if (url.rfind("https://", 0) == 0)
    throw isc::ParameterError(
        "https is not supported by the built-in fetcher; download the file "
        "manually and pass it with --path");
  if (url.rfind("http://", 0) != 0)
    throw isc::ParameterError("--url must start with http://");
  const std::string rest = url.substr(7);
  const auto slash = rest.find('/');
  const std::string host = (slash == std::string::npos) ? rest : rest.substr(0, slash);
  const std::string target = (slash == std::string::npos) ? "/" : rest.substr(slash);
  if (host.empty()) throw isc::ParameterError("--url has no host");

  httplib::Client client(host);
  client.set_follow_location(true);
  const httplib::Result res = client.Get(target);
  if (!res)
    throw isc::DataError("fetch failed for " + url + ": " +
                         httplib::to_string(res.error()));
  if (res->status != 200)
    throw isc::DataError("fetch failed for " + url + ": HTTP " +
                         std::to_string(res->status));
  isc::write_text_atomic(out, res->body);
  std::cout << "fetched " << url << " -> " << out << " (" << res->body.size()
            << " bytes)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community detection toolkit: regularized spectral clustering, "
               "block-model sampling, and experiment reproduction"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  ClusterArgs cluster_args;
  CLI::App* cluster = app.add_subcommand("cluster", "Cluster an edge-list graph");
  cluster->add_option("--edges", cluster_args.edges, "edge list file")->required();
  cluster->add_option("--k", cluster_args.k, "number of communities")->required();
  cluster->add_option("--method", cluster_args.method, "isc|score|rsc")
      ->check(CLI::IsMember({"isc", "score", "rsc"}));
  cluster->add_option("--delta", cluster_args.delta, "regularization (isc)");
  cluster->add_option("--d-variant", cluster_args.d_variant,
                      "regularization scale: midpoint|dmax|dmin|dbar (isc)")
      ->check(CLI::IsMember({"midpoint", "dmax", "dmin", "dbar"}));
  cluster->add_option("--n-eigs", cluster_args.n_eigs, "K or K+1 (score/rsc)")
      ->check(CLI::IsMember({"K", "K+1"}));
  cluster->add_option("--seed", cluster_args.seed, "rng seed");
  cluster->add_option("--restarts", cluster_args.restarts, "k-means restarts");
  cluster->add_option("--out", cluster_args.out, "label file (default <edges>.labels)");

  GenerateArgs generate_args;
  CLI::App* generate = app.add_subcommand("generate", "Sample a block-model graph");
  generate->add_option("--config", generate_args.config, "model config (JSON)")->required();
  generate->add_option("--seed", generate_args.seed, "rng seed");
  generate->add_option("--out-prefix", generate_args.out_prefix, "output path prefix")
      ->required();

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Score labels against ground truth");
  eval->add_option("--pred", eval_args.pred, "predicted labels")->required();
  eval->add_option("--truth", eval_args.truth, "ground-truth labels")->required();
  eval->add_option("--report", eval_args.report, "write a JSON report here");

  ExperimentArgs experiment_args;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a sweep experiment");
  experiment->add_option("--name", experiment_args.name,
                         "built-in config: exp1a|exp1b|exp2a..exp2f");
  experiment->add_option("--config", experiment_args.config, "experiment config (JSON)");
  experiment->add_option("--replicates", experiment_args.replicates,
                         "override replicate count");
  experiment->add_option("--seed", experiment_args.seed, "override master seed");
  experiment->add_option("--out", experiment_args.out, "output directory");
  experiment->add_flag("--no-resume", experiment_args.no_resume,
                       "recompute everything; ignore the ledger");

  SweepDeltaArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep-delta",
                                       "Clustering errors across a delta grid");
  sweep->add_option("--edges", sweep_args.edges, "edge list file")->required();
  sweep->add_option("--labels", sweep_args.labels, "ground-truth labels")->required();
  sweep->add_option("--k", sweep_args.k, "number of communities")->required();
  sweep->add_option("--deltas", sweep_args.deltas, "delta values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--seed", sweep_args.seed, "rng seed");
  sweep->add_option("--out", sweep_args.out, "also write the table here");

  DVariantsArgs dvar_args;
  CLI::App* dvar = app.add_subcommand("d-variants",
                                      "Compare the four regularization scales");
  dvar->add_option("--edges", dvar_args.edges, "edge list file")->required();
  dvar->add_option("--labels", dvar_args.labels, "ground-truth labels")->required();
  dvar->add_option("--k", dvar_args.k, "number of communities")->required();
  dvar->add_option("--delta", dvar_args.delta, "regularization");
  dvar->add_option("--seed", dvar_args.seed, "rng seed");
  dvar->add_option("--out", dvar_args.out, "also write the table here");

  FetchArgs fetch_args;
  CLI::App* fetch = app.add_subcommand("fetch", "Download or copy a dataset file");
  fetch->add_option("--url", fetch_args.url, "http:// source");
  fetch->add_option("--path", fetch_args.path, "local source file");
  fetch->add_option("--out", fetch_args.out,
                    "destination (default: data dir + source file name)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (cluster->parsed()) run_cluster(cluster_args);
    if (generate->parsed()) run_generate(generate_args);
    if (eval->parsed()) run_eval(eval_args);
    if (experiment->parsed()) run_experiment_cmd(experiment_args);
    if (sweep->parsed()) run_sweep_delta(sweep_args);
    if (dvar->parsed()) run_d_variants(dvar_args);
    if (fetch->parsed()) run_fetch(fetch_args);
  } catch (const isc::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const isc::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const isc::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
