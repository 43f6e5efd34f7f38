#include "isc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "isc/errors.hpp"
#include "isc/graph.hpp"
#include "isc/kernels.hpp"
#include "isc/rng.hpp"

namespace isc {

namespace {

int label_span(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw ParameterError("label vectors differ in length (" +
                         std::to_string(predicted.size()) + " vs " +
                         std::to_string(truth.size()) + ")");
  if (predicted.empty()) throw ParameterError("empty label vectors");
  int k = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 1 || truth[i] < 1)
      throw ParameterError("labels must be 1-based positive integers");
    k = std::max({k, predicted[i], truth[i]});
  }
  return k;
}

}  // namespace

Eigen::MatrixXi confusion_matrix(const std::vector<int>& predicted,
                                 const std::vector<int>& truth) {
  const int k = label_span(predicted, truth);
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(k, k);
  for (std::size_t i = 0; i < predicted.size(); ++i)
    counts(truth[i] - 1, predicted[i] - 1) += 1;
  return counts;
}

std::vector<int> optimal_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols() || cost.rows() < 1)
    throw ParameterError("assignment requires a square nonempty cost matrix");
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();

  // Kuhn-Munkres with row/column potentials; O(n^3) overall.  Indices are
  // shifted by one so column 0 can serve as the virtual start of each
  // augmenting path.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> result(n, -1);
  for (int j = 1; j <= n; ++j) result[match[j] - 1] = j - 1;
  return result;
}

ErrorReport clustering_error(const std::vector<int>& predicted,
                             const std::vector<int>& truth) {
  const Eigen::MatrixXi counts = confusion_matrix(predicted, truth);
  const int k = static_cast<int>(counts.rows());
  const int n = static_cast<int>(predicted.size());

  // Maximize matched counts = minimize (max_entry - count).  Row index is the
  // predicted label, column the candidate true label.
  const double top = static_cast<double>(counts.maxCoeff());
  Eigen::MatrixXd cost(k, k);
  for (int p = 0; p < k; ++p)
    for (int t = 0; t < k; ++t) cost(p, t) = top - static_cast<double>(counts(t, p));
  const std::vector<int> assigned = optimal_assignment(cost);

  ErrorReport report;
  report.best_perm.resize(k);
  long matched = 0;
  for (int p = 0; p < k; ++p) {
    report.best_perm[p] = assigned[p] + 1;
    matched += counts(assigned[p], p);
  }
  report.mismatches = n - static_cast<int>(matched);
  report.rate = static_cast<double>(report.mismatches) / static_cast<double>(n);
  return report;
}

ErrorReport clustering_error_bruteforce(const std::vector<int>& predicted,
                                        const std::vector<int>& truth) {
  const Eigen::MatrixXi counts = confusion_matrix(predicted, truth);
  const int k = static_cast<int>(counts.rows());
  if (k > 6) throw ParameterError("brute-force alignment is limited to K <= 6");
  const int n = static_cast<int>(predicted.size());

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  long best_matched = -1;
  do {
    long matched = 0;
    for (int p = 0; p < k; ++p) matched += counts(perm[p], p);
    if (matched > best_matched) {
      best_matched = matched;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  ErrorReport report;
  report.best_perm.resize(k);
  for (int p = 0; p < k; ++p) report.best_perm[p] = best[p] + 1;
  report.mismatches = n - static_cast<int>(best_matched);
  report.rate = static_cast<double>(report.mismatches) / static_cast<double>(n);
  return report;
}

HammingBound hamming_bound(const EigenSystem& es, int k, int n, double m) {
  if (k < 1) throw ParameterError("K must be >= 1");
  if (n < 1) throw ParameterError("n must be >= 1");
  if (!(m > 0.0)) throw ParameterError("shortest row length m must be positive");
  if (es.count() < k + 1)
    throw ParameterError("Hamming bounds need K+1 eigenvalues (have " +
                         std::to_string(es.count()) + ", K = " + std::to_string(k) + ")");

  const double lam_k = es.values(k - 1);
  const double lam_k1 = es.values(k);
  const double kk = static_cast<double>(k);
  const double denom = static_cast<double>(n) * m * m;

  HammingBound b;
  const double strong_core = std::sqrt(kk * lam_k * lam_k + 4.0 * lam_k1 * lam_k1);
  b.strong = (strong_core + 8.0 * kk) * (strong_core + 8.0 * kk) / denom;
  const double weak_core = std::abs(lam_k1) * std::sqrt(kk + 4.0);
  b.weak = (weak_core + 8.0 * kk) * (weak_core + 8.0 * kk) / denom;
  return b;
}

double shortest_row_length(const Eigen::MatrixXd& weighted) {
  if (weighted.rows() < 1) throw ParameterError("embedding has no rows");
  double shortest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < weighted.rows(); ++i)
    shortest = std::min(shortest, weighted.row(i).norm());
  return shortest;
}

PerturbationCheck eigen_perturbation_check(const DcsbmParams& params, double delta,
                                           double epsilon, int trials,
                                           std::uint64_t seed) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw ParameterError("epsilon must lie in (0, 1]");
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (delta < 0.0) throw ParameterError("delta must be >= 0");
  validate_for_sampling(params);

  PerturbationCheck check;
  check.trials = trials;

  // Expected-degree quantities straight from the model; the full-rank /
  // connectivity validation is deliberately skipped so degenerate models are
  // reported as not-applicable instead of rejected.
  std::vector<int> community0(params.community.size());
  for (std::size_t i = 0; i < params.community.size(); ++i)
    community0[i] = params.community[i] - 1;
  const Eigen::MatrixXd omega =
      kernels::population_expectation(params.theta, params.mixing, community0);
  const Eigen::VectorXd script_d = omega.rowwise().sum();
  const double d_mid = (script_d.maxCoeff() + script_d.minCoeff()) / 2.0;
  const double min_d = script_d.minCoeff();
  const double denom = d_mid * delta + min_d;
  const double log_term =
      3.0 * std::log(4.0 * static_cast<double>(params.n) / epsilon);

  check.applicable = denom > log_term;
  check.computed = denom > 0.0;
  if (!check.computed) return check;

  check.bound_max = 4.0 * std::sqrt(log_term / denom);
  check.bound_sq = 16.0 * static_cast<double>(params.k) * log_term / denom;

  // Population eigenvalues of the regularized operator, by magnitude rank.
  Eigen::VectorXd inv_sqrt(params.n);
  for (int i = 0; i < params.n; ++i) inv_sqrt(i) = 1.0 / std::sqrt(script_d(i) + delta * d_mid);
  const Eigen::MatrixXd l_pop =
      inv_sqrt.asDiagonal() * omega * inv_sqrt.asDiagonal();
  const EigenSystem pop = leading_eigenpairs(l_pop, params.k);

  std::vector<char> covered(trials, 0);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    try {
      const Graph g = sample_adjacency(params, rng::derive_seed(seed, t));
      const RegularizedLaplacian sample =
          build_regularized_laplacian(g, delta, DVariant::Midpoint);
      const EigenSystem hat = leading_eigenpairs(sample.matrix, params.k);
      double dev_max = 0.0, dev_sq = 0.0;
      for (int r = 0; r < params.k; ++r) {
        const double dev = std::abs(hat.values(r) - pop.values(r));
        dev_max = std::max(dev_max, dev);
        dev_sq += dev * dev;
      }
      covered[t] = (dev_max <= check.bound_max && dev_sq <= check.bound_sq) ? 1 : 0;
    } catch (const std::exception&) {
      covered[t] = 0;  // a trial that cannot be evaluated does not count as held
    }
  }

  for (int t = 0; t < trials; ++t) check.covered += covered[t];
  check.coverage = static_cast<double>(check.covered) / static_cast<double>(trials);
  check.holds = (check.covered == trials);
  return check;
}

}  // namespace isc
