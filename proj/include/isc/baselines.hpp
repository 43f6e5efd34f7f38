#pragma once

#include <cstdint>

#include "isc/clustering.hpp"
#include "isc/graph.hpp"
#include "isc/spectral.hpp"

namespace isc {

// Comparison methods sharing the spectral core and the same seeded k-means
// as the main pipeline, so error differences isolate the embedding choice.

struct ScoreOptions {
  int n_eigs = 0;           // K or K+1; 0 means K
  double threshold = -1.0;  // clip bound for ratios; <= 0 means log(n)
  int restarts = 50;
  int max_iter = 300;
  SolverMode solver = SolverMode::Auto;
};

struct ScoreDetail {
  Partition partition;
  double threshold_used = 0.0;
  // Set when some |eta_1(i)| < 1e-12 forced a clipped ratio; such entries
  // become threshold * sign(numerator), never an error.
  bool ratio_degenerate = false;
};

// Entrywise eigenvector ratios of the adjacency matrix: R(i,k) =
// eta_{k+1}(i)/eta_1(i) for k = 1..n_eigs-1, clipped to [-threshold,
// threshold], then k-means with K clusters.
ScoreDetail score_cluster_detail(const Graph& g, int k, const ScoreOptions& options,
                                 std::uint64_t seed);
Partition score_cluster(const Graph& g, int k, const ScoreOptions& options,
                        std::uint64_t seed);

struct RscOptions {
  int n_eigs = 0;     // K or K+1; 0 means K
  double tau = -1.0;  // ridge added to every degree; < 0 means mean degree
  int restarts = 50;
  int max_iter = 300;
  SolverMode solver = SolverMode::Auto;
};

struct RscDetail {
  Partition partition;
  double tau_used = 0.0;
};

// Regularized spectral clustering: leading n_eigs unit eigenvectors of
// (D + tau I)^{-1/2} A (D + tau I)^{-1/2} without eigenvalue weighting,
// row-normalized, then k-means with K clusters.
RscDetail rsc_cluster_detail(const Graph& g, int k, const RscOptions& options,
                             std::uint64_t seed);
Partition rsc_cluster(const Graph& g, int k, const RscOptions& options,
                      std::uint64_t seed);

}  // namespace isc
