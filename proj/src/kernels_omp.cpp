#include <cmath>

#include "isc/kernels.hpp"
#include "isc/rng.hpp"

// OpenMP builds of the kernels in kernels_serial.cpp. Parallelism is always
// over rows/elements with disjoint writes; per-row arithmetic is the same
// expression as the serial build, so outputs are bitwise identical at any
// thread count.

namespace isc::kernels {

std::vector<std::pair<int, int>> sample_pair_edges(const Eigen::VectorXd& theta,
                                                   const Eigen::MatrixXd& P,
                                                   const std::vector<int>& community,
                                                   std::uint64_t seed) {
  const int n = static_cast<int>(theta.size());
  // Row i owns pairs (i, i+1..n-1). pair_uniform is stateless, so draws do
  // not depend on which thread handles a row; concatenation in row order
  // reproduces the serial (i<j, row-major) sequence.
  std::vector<std::vector<std::pair<int, int>>> rows(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = theta[i] * theta[j] * P(community[i], community[j]);
      if (p > 0.0 && rng::pair_uniform(seed, static_cast<std::uint32_t>(i),
                                       static_cast<std::uint32_t>(j)) < p)
        rows[i].emplace_back(i, j);
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (auto& r : rows) edges.insert(edges.end(), r.begin(), r.end());
  return edges;
}

Eigen::MatrixXd ridge_normalized_adjacency(const Graph& g, double ridge) {
  const int n = g.node_count();
  Eigen::VectorXd inv_sqrt(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(g.degree(i) + ridge);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i)
    for (const int j : g.neighbors(i)) m(i, j) = inv_sqrt[i] * inv_sqrt[j];
  return m;
}

Eigen::MatrixXd population_expectation(const Eigen::VectorXd& theta,
                                       const Eigen::MatrixXd& P,
                                       const std::vector<int>& community) {
  const int n = static_cast<int>(theta.size());
  Eigen::MatrixXd omega(n, n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      omega(i, j) = theta[i] * theta[j] * P(community[i], community[j]);
  return omega;
}

void assign_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                    std::vector<int>& labels, Eigen::VectorXd& dist2) {
  const int n = static_cast<int>(points.rows());
  const int k = static_cast<int>(centers.rows());
  labels.assign(n, 0);
  dist2.resize(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bd = (points.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    labels[i] = best;
    dist2[i] = bd;
  }
}

std::pair<Eigen::MatrixXd, std::vector<char>> normalize_rows(const Eigen::MatrixXd& x,
                                                             double eps) {
  Eigen::MatrixXd out = x;
  std::vector<char> flags(x.rows(), 0);
  const Eigen::Index n = x.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = x.row(i).norm();
    if (norm < eps) {
      flags[i] = 1;
      out.row(i).setZero();
      out(i, 0) = 1.0;
    } else {
      out.row(i) /= norm;
    }
  }
  return {std::move(out), std::move(flags)};
}

Eigen::VectorXd sym_matvec(const Eigen::MatrixXd& m, const Eigen::VectorXd& x) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd y(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) y[i] = m.col(i).dot(x);
  return y;
}

}  // namespace isc::kernels
