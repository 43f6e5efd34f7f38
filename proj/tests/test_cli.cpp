#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "isc/graph.hpp"
#include "test_util.hpp"

// End-to-end checks of the command-line binary as a subprocess: flag
// validation, exit-code contract, and artifact layout.

#ifndef ISC_CLI_PATH
#error "ISC_CLI_PATH must point at the CLI binary"
#endif

using nlohmann::json;

namespace {

struct CmdResult {
  int status = -1;
  std::string output;  // stdout and stderr combined
};

CmdResult run_cli(const std::string& args, const isc::test::TempDir& tmp,
                  const std::string& tag) {
  const std::string out_file = tmp.file("cmd_" + tag + ".out");
  const std::string cmd =
      std::string(ISC_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
  const int rc = std::system(cmd.c_str());
  CmdResult result;
  if (rc != -1 && WIFEXITED(rc)) result.status = WEXITSTATUS(rc);
  result.output = isc::read_text_file(out_file);
  return result;
}

// A small valid model document shared by the generate/cluster/eval flows.
void write_model(const std::string& path) {
  const json model = {
      {"n", 44},
      {"k", 2},
      {"mixing", {{0.9, 0.15}, {0.15, 0.9}}},
      {"theta", {{"kind", "per_community"}, {"values", {0.6, 0.8}}}},
      {"membership", {{"kind", "blocks"}, {"sizes", {22, 22}}}},
  };
  isc::write_text_atomic(path, model.dump(2) + "\n");
}

}  // namespace

TEST_CASE("cli: bad invocations exit with the usage code") {
  isc::test::TempDir tmp("cli_usage");
  CHECK(run_cli("", tmp, "bare").status == 2);

  const CmdResult unknown = run_cli("frobnicate", tmp, "unknown");
  CHECK(unknown.status == 2);

  const CmdResult missing = run_cli("cluster --edges nowhere.edges", tmp, "missing_k");
  CHECK(missing.status == 2);
  CHECK(missing.output.find("--k") != std::string::npos);

  CHECK(run_cli("--help", tmp, "help").status == 0);
  const CmdResult sub_help = run_cli("cluster --help", tmp, "sub_help");
  CHECK(sub_help.status == 0);
  CHECK(sub_help.output.find("--edges") != std::string::npos);
}

TEST_CASE("cli: generate is deterministic and writes the documented artifacts") {
  isc::test::TempDir tmp("cli_generate");
  write_model(tmp.file("model.json"));

  const CmdResult a = run_cli("generate --config " + tmp.file("model.json") +
                                  " --seed 9 --out-prefix " + tmp.file("a"),
                              tmp, "gen_a");
  REQUIRE(a.status == 0);
  CHECK(std::filesystem::exists(tmp.file("a.edges")));
  CHECK(std::filesystem::exists(tmp.file("a.labels")));
  CHECK(std::filesystem::exists(tmp.file("a.meta.json")));

  const CmdResult b = run_cli("generate --config " + tmp.file("model.json") +
                                  " --seed 9 --out-prefix " + tmp.file("b"),
                              tmp, "gen_b");
  REQUIRE(b.status == 0);
  CHECK(isc::read_text_file(tmp.file("a.edges")) ==
        isc::read_text_file(tmp.file("b.edges")));
  CHECK(isc::read_text_file(tmp.file("a.labels")) ==
        isc::read_text_file(tmp.file("b.labels")));

  // A different seed must change the sample.
  const CmdResult c = run_cli("generate --config " + tmp.file("model.json") +
                                  " --seed 10 --out-prefix " + tmp.file("c"),
                              tmp, "gen_c");
  REQUIRE(c.status == 0);
  CHECK(isc::read_text_file(tmp.file("a.edges")) !=
        isc::read_text_file(tmp.file("c.edges")));

  const isc::Graph g = isc::load_edge_list(tmp.file("a.edges"));
  CHECK(g.node_count() == 44);
}

TEST_CASE("cli: invalid model parameters exit with the parameter code") {
  isc::test::TempDir tmp("cli_badmodel");
  const json bad = {
      {"n", 10},
      {"k", 2},
      {"mixing", {{0.9, 0.5}, {0.5, 0.9}}},
      {"theta", {{"kind", "per_community"}, {"values", {1.5, 1.5}}}},
      {"membership", {{"kind", "blocks"}, {"sizes", {5, 5}}}},
  };
  isc::write_text_atomic(tmp.file("bad.json"), bad.dump() + "\n");
  const CmdResult r = run_cli("generate --config " + tmp.file("bad.json") +
                                  " --out-prefix " + tmp.file("x"),
                              tmp, "bad");
  CHECK(r.status == 2);
  CHECK(r.output.find("edge probability") != std::string::npos);

  isc::write_text_atomic(tmp.file("broken.json"), "{ not json\n");
  CHECK(run_cli("generate --config " + tmp.file("broken.json") + " --out-prefix " +
                    tmp.file("y"),
                tmp, "broken")
            .status == 3);
}

TEST_CASE("cli: cluster and eval round trip") {
  isc::test::TempDir tmp("cli_cluster");
  write_model(tmp.file("model.json"));
  REQUIRE(run_cli("generate --config " + tmp.file("model.json") +
                      " --seed 4 --out-prefix " + tmp.file("g"),
                  tmp, "gen")
              .status == 0);

  const CmdResult cl = run_cli("cluster --edges " + tmp.file("g.edges") +
                                   " --k 2 --seed 11 --out " + tmp.file("pred.labels"),
                               tmp, "cluster");
  REQUIRE(cl.status == 0);
  REQUIRE(std::filesystem::exists(tmp.file("pred.labels")));
  const isc::LabelVector pred = isc::load_labels(tmp.file("pred.labels"), 44);
  CHECK(pred.k == 2);

  // Metadata sidecar names the method and carries the spectral diagnostics.
  const json meta = json::parse(isc::read_text_file(tmp.file("pred.labels.meta.json")));
  CHECK(meta.at("method") == "isc");
  CHECK(meta.at("n") == 44);
  CHECK(meta.at("eigenvalues").size() == 3);
  CHECK(meta.at("rng") == "splitmix64-v1");

  // Clean two-block sample: the pipeline should recover the planted labels,
  // and eval must report that in the fixed "M/N, rate R" line.
  const CmdResult ev = run_cli("eval --pred " + tmp.file("pred.labels") + " --truth " +
                                   tmp.file("g.labels") + " --report " +
                                   tmp.file("report.json"),
                               tmp, "eval");
  REQUIRE(ev.status == 0);
  CHECK(ev.output.find("/44") != std::string::npos);
  CHECK(ev.output.find("rate") != std::string::npos);
  const json report = json::parse(isc::read_text_file(tmp.file("report.json")));
  CHECK(report.at("n") == 44);
  CHECK(report.at("mismatches").is_number_integer());

  // Identical files agree perfectly even under a label swap.
  std::vector<int> swapped = isc::load_labels(tmp.file("g.labels")).labels;
  for (int& l : swapped) l = (l == 1) ? 2 : 1;
  isc::save_labels(tmp.file("swapped.labels"), swapped);
  const CmdResult self = run_cli("eval --pred " + tmp.file("swapped.labels") +
                                     " --truth " + tmp.file("g.labels"),
                                 tmp, "self");
  REQUIRE(self.status == 0);
  CHECK(self.output.find("0/44") != std::string::npos);

  // Score and rsc variants run on the same input.
  CHECK(run_cli("cluster --edges " + tmp.file("g.edges") +
                    " --k 2 --method score --seed 11 --out " + tmp.file("s.labels"),
                tmp, "score")
            .status == 0);
  CHECK(run_cli("cluster --edges " + tmp.file("g.edges") +
                    " --k 2 --method rsc --n-eigs K+1 --seed 11 --out " +
                    tmp.file("r.labels"),
                tmp, "rsc")
            .status == 0);
}

TEST_CASE("cli: dimension mismatches exit with the data code") {
  isc::test::TempDir tmp("cli_mismatch");
  isc::save_labels(tmp.file("a.labels"), {1, 2, 1});
  isc::save_labels(tmp.file("b.labels"), {1, 2});
  const CmdResult r = run_cli(
      "eval --pred " + tmp.file("a.labels") + " --truth " + tmp.file("b.labels"), tmp,
      "mismatch");
  CHECK(r.status == 3);
}

TEST_CASE("cli: singular scaling exits with the numerical code") {
  isc::test::TempDir tmp("cli_singular");
  isc::test::write_file(tmp.file("iso.edges"), "n=3\n0 1\n");
  const CmdResult r = run_cli(
      "cluster --edges " + tmp.file("iso.edges") + " --k 2 --delta 0", tmp, "singular");
  CHECK(r.status == 4);
}

TEST_CASE("cli: unknown experiment name lists the available suite") {
  isc::test::TempDir tmp("cli_expname");
  const CmdResult r = run_cli("experiment --name exp7q", tmp, "name");
  CHECK(r.status == 2);
  CHECK(r.output.find("exp1a") != std::string::npos);

  // --name and --config are mutually exclusive and one is required.
  CHECK(run_cli("experiment", tmp, "none").status == 2);
}

TEST_CASE("cli: experiment runs from a config file and reruns identically") {
  isc::test::TempDir tmp("cli_exp");
  const json cfg = {
      {"name", "cliexp"},
      {"model",
       {
           {"n", "$sweep"},
           {"k", 2},
           {"mixing", {{0.9, 0.2}, {0.2, 0.9}}},
           {"theta", {{"kind", "per_community"}, {"values", {0.5, 0.7}}}},
           {"membership", {{"kind", "iid_uniform"}}},
       }},
      {"sweep_variable", "n"},
      {"sweep_values", {40}},
      {"replicates", 2},
      {"methods", {"isc", "rsc"}},
      {"delta", 0.1},
      {"seed", 3},
  };
  isc::write_text_atomic(tmp.file("cfg.json"), cfg.dump(2) + "\n");

  const CmdResult one = run_cli("experiment --config " + tmp.file("cfg.json") +
                                    " --out " + tmp.file("out1"),
                                tmp, "exp1");
  REQUIRE(one.status == 0);
  CHECK(one.output.find("sweep_value") != std::string::npos);
  for (const char* name : {"cliexp_isc.series.tsv", "cliexp_rsc.series.tsv",
                           "cliexp_ws_A.series.tsv", "cliexp_ws_L.series.tsv",
                           "cliexp_rows.tsv", "cliexp_summary.json", "ledger.ndjson"})
    CHECK(std::filesystem::exists(tmp.file(std::string("out1/") + name)));

  const CmdResult two = run_cli("experiment --config " + tmp.file("cfg.json") +
                                    " --out " + tmp.file("out2"),
                                tmp, "exp2");
  REQUIRE(two.status == 0);
  for (const char* name : {"cliexp_rows.tsv", "cliexp_summary.json"})
    CHECK(isc::read_text_file(tmp.file(std::string("out1/") + name)) ==
          isc::read_text_file(tmp.file(std::string("out2/") + name)));

  // Replicate override changes the row count.
  const CmdResult three = run_cli("experiment --config " + tmp.file("cfg.json") +
                                      " --replicates 1 --out " + tmp.file("out3"),
                                  tmp, "exp3");
  REQUIRE(three.status == 0);
  const std::string rows = isc::read_text_file(tmp.file("out3/cliexp_rows.tsv"));
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);  // header + 1 rep x 2 methods
}

TEST_CASE("cli: fixed-graph tables run end to end") {
  isc::test::TempDir tmp("cli_tables");
  write_model(tmp.file("model.json"));
  REQUIRE(run_cli("generate --config " + tmp.file("model.json") +
                      " --seed 6 --out-prefix " + tmp.file("g"),
                  tmp, "gen")
              .status == 0);

  const CmdResult sweep = run_cli(
      "sweep-delta --edges " + tmp.file("g.edges") + " --labels " + tmp.file("g.labels") +
          " --k 2 --deltas 0.05,0.1,0.2 --seed 2 --out " + tmp.file("sweep.tsv"),
      tmp, "sweep");
  REQUIRE(sweep.status == 0);
  CHECK(sweep.output.find("delta\tstatus\tmismatches") != std::string::npos);
  CHECK(std::filesystem::exists(tmp.file("sweep.tsv")));

  const CmdResult dvar = run_cli("d-variants --edges " + tmp.file("g.edges") +
                                     " --labels " + tmp.file("g.labels") + " --k 2",
                                 tmp, "dvar");
  REQUIRE(dvar.status == 0);
  CHECK(dvar.output.find("midpoint") != std::string::npos);
  CHECK(dvar.output.find("dbar") != std::string::npos);
}

TEST_CASE("cli: fetch copies a local file into the data directory") {
  isc::test::TempDir tmp("cli_fetch");
  isc::test::write_file(tmp.file("src.edges"), "0 1\n");
  const CmdResult r = run_cli(
      "fetch --path " + tmp.file("src.edges") + " --out " + tmp.file("dst.edges"), tmp,
      "fetch");
  REQUIRE(r.status == 0);
  CHECK(isc::read_text_file(tmp.file("dst.edges")) == "0 1\n");

  CHECK(run_cli("fetch --out " + tmp.file("z.edges"), tmp, "neither").status == 2);
}
