#include "isc/dcsbm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isc/errors.hpp"
#include "isc/kernels.hpp"
#include "isc/rng.hpp"

namespace isc {

namespace {

std::vector<int> to_zero_based(const std::vector<int>& community) {
  std::vector<int> c(community.size());
  for (std::size_t i = 0; i < community.size(); ++i) c[i] = community[i] - 1;
  return c;
}

}  // namespace

void validate_for_sampling(const DcsbmParams& p) {
  if (p.n < 1) throw ParameterError("n must be >= 1");
  if (p.k < 1) throw ParameterError("K must be >= 1");
  if (p.k > p.n) throw ParameterError("K must not exceed n");
  if (p.mixing.rows() != p.k || p.mixing.cols() != p.k)
    throw ParameterError("mixing matrix must be K x K");
  for (int a = 0; a < p.k; ++a)
    for (int b = a + 1; b < p.k; ++b)
      if (std::abs(p.mixing(a, b) - p.mixing(b, a)) > 1e-12)
        throw ParameterError("mixing matrix not symmetric at (" + std::to_string(a + 1) +
                             "," + std::to_string(b + 1) + ")");
  for (int a = 0; a < p.k; ++a)
    for (int b = 0; b < p.k; ++b)
      if (p.mixing(a, b) < 0.0 || p.mixing(a, b) > 1.0)
        throw ParameterError("mixing entry (" + std::to_string(a + 1) + "," +
                             std::to_string(b + 1) + ") = " +
                             std::to_string(p.mixing(a, b)) + " outside [0,1]");
  if (p.theta.size() != p.n) throw ParameterError("theta must have length n");
  for (int i = 0; i < p.n; ++i)
    if (!(p.theta[i] > 0.0))
      throw ParameterError("theta[" + std::to_string(i) + "] = " +
                           std::to_string(p.theta[i]) + " must be positive");
  if (static_cast<int>(p.community.size()) != p.n)
    throw ParameterError("community vector must have length n");
  for (int i = 0; i < p.n; ++i)
    if (p.community[i] < 1 || p.community[i] > p.k)
      throw ParameterError("community[" + std::to_string(i) + "] = " +
                           std::to_string(p.community[i]) + " outside {1.." +
                           std::to_string(p.k) + "}");

  // Track the two largest theta values per community (with node indices) so
  // the max pair probability is exact, not a conservative bound.
  std::vector<int> top1(p.k, -1), top2(p.k, -1);
  for (int i = 0; i < p.n; ++i) {
    const int c = p.community[i] - 1;
    if (top1[c] < 0 || p.theta[i] > p.theta[top1[c]]) {
      top2[c] = top1[c];
      top1[c] = i;
    } else if (top2[c] < 0 || p.theta[i] > p.theta[top2[c]]) {
      top2[c] = i;
    }
  }
  for (int c = 0; c < p.k; ++c)
    if (top1[c] < 0)
      throw ParameterError("community " + std::to_string(c + 1) + " is empty");
  for (int a = 0; a < p.k; ++a) {
    for (int b = a; b < p.k; ++b) {
      int i = -1, j = -1;
      if (a == b) {
        if (top2[a] < 0) continue;  // single-node community: no within pair
        i = top1[a];
        j = top2[a];
      } else {
        i = top1[a];
        j = top1[b];
      }
      const double prob = p.theta[i] * p.theta[j] * p.mixing(a, b);
      if (prob > 1.0)
        throw ParameterError("edge probability theta[" + std::to_string(i) +
                             "]*theta[" + std::to_string(j) + "]*P(" +
                             std::to_string(a + 1) + "," + std::to_string(b + 1) +
                             ") = " + std::to_string(prob) + " exceeds 1");
    }
  }
}

void validate_full(const DcsbmParams& p) {
  validate_for_sampling(p);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(p.mixing);
  const double smax = svd.singularValues()[0];
  const double smin = svd.singularValues()[p.k - 1];
  if (smax <= 0.0 || smin <= 1e-12 * smax)
    throw ParameterError("mixing matrix is singular (smallest singular value " +
                         std::to_string(smin) + ")");
  // Irreducibility: the support graph of P must be connected.
  std::vector<char> seen(p.k, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int a = stack.back();
    stack.pop_back();
    for (int b = 0; b < p.k; ++b) {
      if (!seen[b] && p.mixing(a, b) > 0.0) {
        seen[b] = 1;
        stack.push_back(b);
      }
    }
  }
  for (int a = 0; a < p.k; ++a)
    if (!seen[a])
      throw ParameterError("mixing matrix is reducible: community " +
                           std::to_string(a + 1) +
                           " is disconnected in the support graph");
}

Graph sample_adjacency(const DcsbmParams& params, std::uint64_t seed) {
  validate_for_sampling(params);
  const auto edges = kernels::sample_pair_edges(params.theta, params.mixing,
                                                to_zero_based(params.community), seed);
  return Graph(params.n, edges);
}

PopulationMatrices population_matrices(const DcsbmParams& params, double delta) {
  validate_full(params);
  if (delta < 0.0) throw ParameterError("delta must be nonnegative");
  const std::vector<int> comm = to_zero_based(params.community);

  PopulationMatrices pm;
  pm.delta = delta;
  pm.omega = kernels::population_expectation(params.theta, params.mixing, comm);
  pm.script_d = pm.omega.rowwise().sum();
  pm.d_mid = 0.5 * (pm.script_d.maxCoeff() + pm.script_d.minCoeff());
  const double ridge = delta * pm.d_mid;
  for (int i = 0; i < params.n; ++i)
    if (pm.script_d[i] + ridge <= 0.0)
      throw NumericalError("singular population scaling: expected degree of node " +
                           std::to_string(i) + " is 0 with delta*d = " +
                           std::to_string(ridge));

  Eigen::VectorXd inv_sqrt(params.n);
  for (int i = 0; i < params.n; ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(pm.script_d[i] + ridge);
  pm.laplacian = inv_sqrt.asDiagonal() * pm.omega * inv_sqrt.asDiagonal();

  // Factored form: sqrt(theta_delta_i * theta_delta_j) * Ptilde(g_i, g_j),
  // with D_P(a,a) = sum_b P(a,b) * (total theta of community b).
  Eigen::VectorXd theta_sum = Eigen::VectorXd::Zero(params.k);
  for (int i = 0; i < params.n; ++i) theta_sum[comm[i]] += params.theta[i];
  const Eigen::VectorXd d_p = params.mixing * theta_sum;
  Eigen::VectorXd inv_sqrt_dp(params.k);
  for (int a = 0; a < params.k; ++a) {
    if (d_p[a] <= 0.0)
      throw NumericalError("population scaling D_P is singular for community " +
                           std::to_string(a + 1));
    inv_sqrt_dp[a] = 1.0 / std::sqrt(d_p[a]);
  }
  const Eigen::MatrixXd p_tilde =
      inv_sqrt_dp.asDiagonal() * params.mixing * inv_sqrt_dp.asDiagonal();
  Eigen::VectorXd sqrt_theta_delta(params.n);
  for (int i = 0; i < params.n; ++i) {
    const double td = params.theta[i] * pm.script_d[i] / (pm.script_d[i] + ridge);
    sqrt_theta_delta[i] = std::sqrt(td);
  }
  const Eigen::MatrixXd factored =
      kernels::population_expectation(sqrt_theta_delta, p_tilde, comm);
  pm.factored_gap = (pm.laplacian - factored).cwiseAbs().maxCoeff();
  if (!(pm.factored_gap < 1e-10))
    throw NumericalError("population Laplacian factored form deviates by " +
                         std::to_string(pm.factored_gap) + " (> 1e-10)");
  return pm;
}

PopulationEigen population_eigen(const DcsbmParams& params, double delta) {
  const PopulationMatrices pm = population_matrices(params, delta);
  const std::vector<int> comm = to_zero_based(params.community);

  PopulationEigen pe;
  pe.eigs = leading_eigenpairs(pm.laplacian, params.k);

  // Closed form via the K x K problem: the population Laplacian equals
  // ||ttheta||^2 * Gamma (Dt Pt Dt) Gamma' with ttheta_i = sqrt(theta_delta_i),
  // Gamma the per-community unit masks of ttheta, and Dt(a,a) =
  // ||ttheta^(a)|| / ||ttheta||.
  const double ridge = delta * pm.d_mid;
  Eigen::VectorXd ttheta(params.n);
  for (int i = 0; i < params.n; ++i)
    ttheta[i] =
        std::sqrt(params.theta[i] * pm.script_d[i] / (pm.script_d[i] + ridge));
  const double total = ttheta.norm();
  Eigen::VectorXd block_norm = Eigen::VectorXd::Zero(params.k);
  for (int i = 0; i < params.n; ++i)
    block_norm[comm[i]] += ttheta[i] * ttheta[i];
  block_norm = block_norm.cwiseSqrt();

  Eigen::VectorXd theta_sum = Eigen::VectorXd::Zero(params.k);
  for (int i = 0; i < params.n; ++i) theta_sum[comm[i]] += params.theta[i];
  const Eigen::VectorXd d_p = params.mixing * theta_sum;
  Eigen::VectorXd inv_sqrt_dp(params.k);
  for (int a = 0; a < params.k; ++a) inv_sqrt_dp[a] = 1.0 / std::sqrt(d_p[a]);
  const Eigen::MatrixXd p_tilde =
      inv_sqrt_dp.asDiagonal() * params.mixing * inv_sqrt_dp.asDiagonal();
  const Eigen::VectorXd d_tilde = block_norm / total;
  const Eigen::MatrixXd small =
      d_tilde.asDiagonal() * p_tilde * d_tilde.asDiagonal();

  const EigenSystem small_eigs = leading_eigenpairs(small, params.k, SolverMode::Dense);
  // Magnitude collisions (which include exactly repeated values) make the
  // by-magnitude pairing between the two routes ambiguous, so the
  // cross-check is skipped for them.
  for (int a = 0; a < params.k && !pe.degenerate_spectrum; ++a)
    for (int b = a + 1; b < params.k; ++b)
      if (std::abs(std::abs(small_eigs.values[a]) - std::abs(small_eigs.values[b])) <
          1e-8)
        pe.degenerate_spectrum = true;

  if (!pe.degenerate_spectrum) {
    for (int kk = 0; kk < params.k; ++kk) {
      const double lambda = total * total * small_eigs.values[kk];
      pe.value_gap = std::max(pe.value_gap, std::abs(lambda - pe.eigs.values[kk]));
      // eta_k = sum_a [a_k(a)/||ttheta^(a)||] * ttheta^(a), unit norm by
      // orthonormality of the masks.
      Eigen::VectorXd eta(params.n);
      for (int i = 0; i < params.n; ++i)
        eta[i] = small_eigs.vectors(comm[i], kk) / block_norm[comm[i]] * ttheta[i];
      const double gap = std::min((eta - pe.eigs.vectors.col(kk)).norm(),
                                  (eta + pe.eigs.vectors.col(kk)).norm());
      pe.vector_gap = std::max(pe.vector_gap, gap);
    }
    if (!(pe.value_gap < 1e-8) || !(pe.vector_gap < 1e-8))
      throw NumericalError(
          "population eigenpairs disagree with the closed form: value gap " +
          std::to_string(pe.value_gap) + ", vector gap " +
          std::to_string(pe.vector_gap));
  }
  return pe;
}

Eigen::VectorXd theta_per_community(const std::vector<double>& values,
                                    const std::vector<int>& community) {
  Eigen::VectorXd theta(community.size());
  for (std::size_t i = 0; i < community.size(); ++i) {
    const int c = community[i] - 1;
    if (c < 0 || c >= static_cast<int>(values.size()))
      throw ParameterError("community label " + std::to_string(community[i]) +
                           " has no theta value");
    theta[i] = values[c];
  }
  return theta;
}

Eigen::VectorXd theta_quadratic(int n, double base, double scale) {
  Eigen::VectorXd theta(n);
  for (int i = 1; i <= n; ++i) {
    const double r = static_cast<double>(i) / n;
    theta[i - 1] = base + scale * r * r;
  }
  return theta;
}

Eigen::VectorXd theta_linear(int n, double base, double scale) {
  Eigen::VectorXd theta(n);
  for (int i = 1; i <= n; ++i)
    theta[i - 1] = base + scale * (static_cast<double>(i) / n);
  return theta;
}

std::vector<int> membership_iid_uniform(int n, int k, std::uint64_t seed) {
  if (k < 1 || k > n) throw ParameterError("need 1 <= K <= n for iid memberships");
  std::vector<int> g(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    rng::SplitMix64 gen(rng::derive_seed(seed, attempt));
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) {
      g[i] = static_cast<int>(gen.next_below(k)) + 1;
      ++count[g[i] - 1];
    }
    if (std::all_of(count.begin(), count.end(), [](int c) { return c > 0; })) return g;
  }
  throw ParameterError("could not draw nonempty communities in 1000 attempts (n = " +
                       std::to_string(n) + ", K = " + std::to_string(k) + ")");
}

std::vector<int> membership_blocks(const std::vector<int>& sizes) {
  std::vector<int> g;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] < 1)
      throw ParameterError("block size for community " + std::to_string(c + 1) +
                           " must be >= 1");
    g.insert(g.end(), sizes[c], static_cast<int>(c) + 1);
  }
  return g;
}

std::vector<int> membership_ratio_first(int n, double c0) {
  if (c0 <= 0.0) throw ParameterError("size ratio c0 must be positive");
  const int n1 = static_cast<int>(std::llround(n / (c0 + 1.0)));
  if (n1 < 1 || n1 >= n)
    throw ParameterError("size ratio c0 = " + std::to_string(c0) +
                         " leaves an empty community at n = " + std::to_string(n));
  return membership_blocks({n1, n - n1});
}

}  // namespace isc
