#include "isc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isc/errors.hpp"
#include "isc/kernels.hpp"
#include "isc/rng.hpp"

namespace isc {

int Embedding::flagged_count() const {
  return static_cast<int>(std::count(zero_row_flags.begin(), zero_row_flags.end(), 1));
}

Embedding build_embedding(const EigenSystem& es, int k) {
  if (k < 1) throw ParameterError("embedding requires K >= 1");
  if (es.count() < k + 1)
    throw ParameterError("embedding needs K+1 = " + std::to_string(k + 1) +
                         " eigenpairs, have " + std::to_string(es.count()));
  Embedding e;
  e.weighted = es.vectors.leftCols(k + 1) * es.values.head(k + 1).asDiagonal();
  auto [normalized, flags] = kernels::normalize_rows(e.weighted, 1e-12);
  e.normalized = std::move(normalized);
  e.zero_row_flags = std::move(flags);
  return e;
}

namespace {

// k-means++ seeding: the first center is uniform, each later center is
// drawn with probability proportional to the squared distance from the
// chosen set (prefix-sum inversion keeps the draw identical everywhere).
// If all remaining distances are zero the lowest-index unchosen point
// fills in.
Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k,
                              rng::SplitMix64& gen) {
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd centers(k, points.cols());
  std::vector<int> chosen;
  chosen.reserve(k);

  const int first = static_cast<int>(gen.next_below(n));
  centers.row(0) = points.row(first);
  chosen.push_back(first);
  Eigen::VectorXd mind2 =
      (points.rowwise() - points.row(first)).rowwise().squaredNorm();

  for (int c = 1; c < k; ++c) {
    const double total = mind2.sum();
    int pick = -1;
    if (total > 0.0) {
      const double x = gen.next_double() * total;
      double cum = 0.0;
      for (int i = 0; i < n; ++i) {
        cum += mind2[i];
        if (cum > x) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;  // guards rounding at the top end
    } else {
      for (int i = 0; i < n && pick < 0; ++i)
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) pick = i;
      if (pick < 0) pick = 0;  // every point already a center (all duplicates)
    }
    centers.row(c) = points.row(pick);
    chosen.push_back(pick);
    mind2 = mind2.cwiseMin(
        (points.rowwise() - points.row(pick)).rowwise().squaredNorm());
  }
  return centers;
}

// Moves the farthest point of any multi-point cluster (ties: lowest index)
// into each empty cluster.
void repair_empty_clusters(const Eigen::MatrixXd& points, int k,
                           std::vector<int>& labels, Eigen::VectorXd& dist2,
                           std::vector<int>& sizes) {
  for (int e = 0; e < k; ++e) {
    if (sizes[e] > 0) continue;
    int donor = -1;
    double worst = -1.0;
    for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
      if (sizes[labels[i]] < 2) continue;
      if (dist2[i] > worst) {
        worst = dist2[i];
        donor = i;
      }
    }
    // n >= k guarantees a multi-point cluster exists while any is empty.
    --sizes[labels[donor]];
    labels[donor] = e;
    ++sizes[e];
    dist2[donor] = 0.0;
  }
}

struct LloydRun {
  std::vector<int> labels;  // 0-based
  std::vector<int> sizes;
  double inertia = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
};

LloydRun lloyd(const Eigen::MatrixXd& points, int k, int max_iter, std::uint64_t seed,
               bool want_trace) {
  const int n = static_cast<int>(points.rows());
  rng::SplitMix64 gen(seed);
  Eigen::MatrixXd centers = kmeanspp_init(points, k, gen);

  LloydRun run;
  Eigen::VectorXd dist2;
  std::vector<int> labels;
  for (int iter = 0; iter < max_iter; ++iter) {
    kernels::serial::assign_nearest(points, centers, labels, dist2);
    std::vector<int> sizes(k, 0);
    for (const int l : labels) ++sizes[l];
    repair_empty_clusters(points, k, labels, dist2, sizes);

    centers.setZero();
    for (int i = 0; i < n; ++i) centers.row(labels[i]) += points.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) /= sizes[c];

    double objective = 0.0;
    for (int i = 0; i < n; ++i)
      objective += (points.row(i) - centers.row(labels[i])).squaredNorm();
    if (want_trace) run.trace.push_back(objective);

    const bool stable = (labels == run.labels);
    run.labels = labels;
    run.sizes = std::move(sizes);
    run.inertia = objective;
    if (stable) break;
  }
  return run;
}

}  // namespace

Partition kmeans(const Eigen::MatrixXd& points, int k, const KMeansOptions& options,
                 std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  if (k < 1) throw ParameterError("k-means requires K >= 1");
  if (n < k)
    throw ParameterError("k-means needs n >= K (n = " + std::to_string(n) +
                         ", K = " + std::to_string(k) + ")");
  if (options.restarts < 1) throw ParameterError("k-means requires restarts >= 1");
  if (options.max_iter < 1) throw ParameterError("k-means requires max_iter >= 1");

  const bool want_trace = options.objective_trace != nullptr;
  std::vector<LloydRun> runs(options.restarts);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < options.restarts; ++r)
    runs[r] = lloyd(points, k, options.max_iter, rng::derive_seed(seed, r), want_trace);

  int best = 0;
  for (int r = 1; r < options.restarts; ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;

  if (want_trace) *options.objective_trace = runs[best].trace;
  Partition part;
  part.labels.resize(n);
  for (int i = 0; i < n; ++i) part.labels[i] = runs[best].labels[i] + 1;
  part.sizes = runs[best].sizes;
  part.inertia = runs[best].inertia;
  return part;
}

IscDetail isc_cluster_detail(const Graph& g, int k, const IscOptions& options,
                             std::uint64_t seed) {
  if (k < 1) throw ParameterError("K must be >= 1");
  if (k + 1 > g.node_count())
    throw ParameterError("pipeline needs K+1 <= n (K = " + std::to_string(k) +
                         ", n = " + std::to_string(g.node_count()) + ")");
  const RegularizedLaplacian l =
      build_regularized_laplacian(g, options.delta, options.variant);
  IscDetail detail;
  detail.d_used = l.d_used;
  detail.eigs = leading_eigenpairs(l, k + 1, options.solver);
  const Embedding emb = build_embedding(detail.eigs, k);
  detail.flagged_rows = emb.flagged_count();
  KMeansOptions km;
  km.restarts = options.restarts;
  km.max_iter = options.max_iter;
  detail.partition = kmeans(emb.normalized, k, km, seed);
  return detail;
}

Partition isc_cluster(const Graph& g, int k, const IscOptions& options,
                      std::uint64_t seed) {
  return isc_cluster_detail(g, k, options, seed).partition;
}

Partition ideal_isc(const DcsbmParams& params, double delta, std::uint64_t seed,
                    bool* degenerate_spectrum) {
  if (params.k + 1 > params.n)
    throw ParameterError("ideal pipeline needs K+1 <= n");
  // population_eigen cross-validates the closed form and reports spectrum
  // degeneracy; the pipeline itself runs on the full K+1 leading pairs
  // (the (K+1)-th is numerically zero by the rank-K structure).
  const PopulationEigen pe = population_eigen(params, delta);
  if (degenerate_spectrum) *degenerate_spectrum = pe.degenerate_spectrum;
  const PopulationMatrices pm = population_matrices(params, delta);
  const EigenSystem es = leading_eigenpairs(pm.laplacian, params.k + 1);
  const Embedding emb = build_embedding(es, params.k);
  KMeansOptions km;
  return kmeans(emb.normalized, params.k, km, seed);
}

}  // namespace isc
