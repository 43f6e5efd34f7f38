#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "isc/dcsbm.hpp"
#include "isc/graph.hpp"
#include "isc/spectral.hpp"

namespace isc {

// The clustering embedding: column k of `weighted` is lambda_k * eta_k for
// the leading K+1 eigenpairs (signed eigenvalues, so the weighting also
// carries sign information); `normalized` holds unit rows. Rows whose norm
// falls below 1e-12 (isolated nodes) are flagged and mapped to the first
// standard basis direction so every node still gets a label.
struct Embedding {
  Eigen::MatrixXd weighted;    // X, n x (K+1)
  Eigen::MatrixXd normalized;  // X*, unit rows
  std::vector<char> zero_row_flags;
  int flagged_count() const;
};

Embedding build_embedding(const EigenSystem& es, int k);

// K-way partition with 1-based labels; no cluster is empty.
struct Partition {
  std::vector<int> labels;
  std::vector<int> sizes;
  double inertia = 0.0;
};

struct KMeansOptions {
  int restarts = 50;
  int max_iter = 300;
  // When non-null, receives the winning restart's per-iteration objective
  // (used by the monotonicity tests).
  std::vector<double>* objective_trace = nullptr;
};

// Lloyd iterations from k-means++ seeding; restart r uses the seed derived
// from (seed, r) and the best (lowest inertia, ties to the lowest restart
// index) wins, so results do not depend on how restarts are scheduled.
// Empty clusters are repaired by moving the point farthest from its
// centroid into the empty cluster.
Partition kmeans(const Eigen::MatrixXd& points, int k, const KMeansOptions& options,
                 std::uint64_t seed);

struct IscOptions {
  double delta = 0.1;
  DVariant variant = DVariant::Midpoint;
  int restarts = 50;
  int max_iter = 300;
  SolverMode solver = SolverMode::Auto;
};

// Full pipeline plus the intermediate quantities callers record in
// metadata and reports.
struct IscDetail {
  Partition partition;
  EigenSystem eigs;  // leading K+1 pairs of the regularized Laplacian
  double d_used = 0.0;
  int flagged_rows = 0;
};

// Regularized Laplacian -> leading K+1 eigenpairs -> eigenvalue-weighted
// embedding -> row normalization -> k-means with K clusters.
IscDetail isc_cluster_detail(const Graph& g, int k, const IscOptions& options,
                             std::uint64_t seed);
Partition isc_cluster(const Graph& g, int k, const IscOptions& options,
                      std::uint64_t seed);

// The same pipeline on the population matrices (expectation in place of the
// adjacency matrix, expected degrees in place of observed ones). Under a
// simple population spectrum this recovers the true communities exactly;
// a degenerate spectrum is reported through the optional flag, not an error.
Partition ideal_isc(const DcsbmParams& params, double delta, std::uint64_t seed = 0,
                    bool* degenerate_spectrum = nullptr);

}  // namespace isc
