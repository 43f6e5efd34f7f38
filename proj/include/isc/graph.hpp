#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace isc {

// Undirected simple graph: symmetric 0/1 adjacency, zero diagonal.
// Immutable after construction, so concurrent readers need no locking.
class Graph {
public:
  Graph() = default;

  // Builds a graph from (possibly messy) pairs: edges are symmetrized,
  // duplicates and self-loops dropped (counts retained for warnings).
  // Every endpoint must lie in [0, n).
  Graph(int n, const std::vector<std::pair<int, int>>& pairs);

  int node_count() const { return n_; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(edges_.size()); }
  int degree(int i) const { return static_cast<int>(adj_[i].size()); }
  const std::vector<int>& neighbors(int i) const { return adj_[i]; }
  bool has_edge(int i, int j) const;

  // Unique edges as (i, j) with i < j, sorted lexicographically.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  Eigen::MatrixXd dense_adjacency() const;

  // Sanitization counters from construction.
  int dropped_self_loops() const { return dropped_self_loops_; }
  int dropped_duplicates() const { return dropped_duplicates_; }

  // When the source file used sparse ids, original_ids()[i] is the id that
  // became node i. Empty when the mapping is the identity.
  const std::vector<long long>& original_ids() const { return original_ids_; }
  void set_original_ids(std::vector<long long> ids) { original_ids_ = std::move(ids); }

private:
  int n_ = 0;
  std::vector<std::vector<int>> adj_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<long long> original_ids_;
  int dropped_self_loops_ = 0;
  int dropped_duplicates_ = 0;
};

struct DegreeStats {
  int d_min = 0;
  int d_max = 0;
  double d_bar = 0.0;  // mean degree
  double d_mid = 0.0;  // (d_max + d_min)/2, the default regularization scale
};

DegreeStats degree_stats(const Graph& g);

// Ground-truth or predicted community labels, always held 1-based in {1..K}.
struct LabelVector {
  std::vector<int> labels;
  int k = 0;
};

enum class Indexing { ZeroBased, OneBased };

// Reads a whitespace-separated edge list. Lines starting with '#' are
// comments; an optional "n=<int>" line fixes the node count. Without a
// header, ids that are dense from 0 are kept as-is (n = max id + 1);
// sparse ids are remapped to 0..n-1 in ascending order and the original
// ids are retained on the Graph for persistence alongside results.
Graph load_edge_list(const std::string& path, Indexing indexing = Indexing::ZeroBased);

// Reads labels: either one label per line (node order = line order) or
// "node label" pairs (sorted by node id). Labels are remapped to 1..K by
// ascending original value. expected_n >= 0 enforces a length check.
LabelVector load_labels(const std::string& path, int expected_n = -1);

void save_edge_list(const std::string& path, const Graph& g);
void save_labels(const std::string& path, const std::vector<int>& labels);

// Nodes of the largest connected component (ties: component containing the
// smallest node id), as (induced subgraph, original node indices).
std::pair<Graph, std::vector<int>> largest_connected_component(const Graph& g);

// Whole-file text helpers used by every writer in the toolkit. Writes go to
// a sibling temp file first and are renamed into place, so readers never
// observe a partially written artifact.
std::string read_text_file(const std::string& path);
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace isc
