#include "isc/baselines.hpp"

#include <cmath>
#include <string>

#include "isc/errors.hpp"
#include "isc/kernels.hpp"

namespace isc {

namespace {

int resolve_n_eigs(int requested, int k, int n) {
  const int n_eigs = (requested == 0) ? k : requested;
  if (n_eigs != k && n_eigs != k + 1)
    throw ParameterError("n_eigs must be K or K+1 (got " + std::to_string(n_eigs) +
                         " with K = " + std::to_string(k) + ")");
  if (n_eigs > n)
    throw ParameterError("requested " + std::to_string(n_eigs) +
                         " eigenvectors from an n = " + std::to_string(n) + " graph");
  return n_eigs;
}

}  // namespace

ScoreDetail score_cluster_detail(const Graph& g, int k, const ScoreOptions& options,
                                 std::uint64_t seed) {
  if (k < 2) throw ParameterError("ratio clustering requires K >= 2");
  const int n = g.node_count();
  const int n_eigs = resolve_n_eigs(options.n_eigs, k, n);

  ScoreDetail detail;
  detail.threshold_used =
      (options.threshold > 0.0) ? options.threshold : std::log(static_cast<double>(n));
  const double t = detail.threshold_used;

  const EigenSystem es = leading_eigenpairs(g.dense_adjacency(), n_eigs, options.solver);
  Eigen::MatrixXd ratios(n, n_eigs - 1);
  for (int i = 0; i < n; ++i) {
    const double lead = es.vectors(i, 0);
    for (int c = 1; c < n_eigs; ++c) {
      double r;
      if (std::abs(lead) < 1e-12) {
        // Degenerate leading entry: saturate at the clip bound with the
        // numerator's sign instead of dividing by ~0.
        const double num = es.vectors(i, c);
        r = (num > 0.0) ? t : (num < 0.0 ? -t : 0.0);
        detail.ratio_degenerate = true;
      } else {
        r = std::clamp(es.vectors(i, c) / lead, -t, t);
      }
      ratios(i, c - 1) = r;
    }
  }

  KMeansOptions km;
  km.restarts = options.restarts;
  km.max_iter = options.max_iter;
  detail.partition = kmeans(ratios, k, km, seed);
  return detail;
}

Partition score_cluster(const Graph& g, int k, const ScoreOptions& options,
                        std::uint64_t seed) {
  return score_cluster_detail(g, k, options, seed).partition;
}

RscDetail rsc_cluster_detail(const Graph& g, int k, const RscOptions& options,
                             std::uint64_t seed) {
  if (k < 1) throw ParameterError("K must be >= 1");
  const int n = g.node_count();
  const int n_eigs = resolve_n_eigs(options.n_eigs, k, n);

  RscDetail detail;
  detail.tau_used = (options.tau >= 0.0) ? options.tau : degree_stats(g).d_bar;

  const Eigen::MatrixXd l_tau = ridge_scaled_adjacency(g, detail.tau_used);
  const EigenSystem es = leading_eigenpairs(l_tau, n_eigs, options.solver);
  const auto [rows, flags] = kernels::normalize_rows(es.vectors, 1e-12);

  KMeansOptions km;
  km.restarts = options.restarts;
  km.max_iter = options.max_iter;
  detail.partition = kmeans(rows, k, km, seed);
  return detail;
}

Partition rsc_cluster(const Graph& g, int k, const RscOptions& options,
                      std::uint64_t seed) {
  return rsc_cluster_detail(g, k, options, seed).partition;
}

}  // namespace isc
