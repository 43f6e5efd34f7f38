#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "isc/graph.hpp"

// Data-parallel inner loops, each in two builds: the OpenMP versions in
// isc::kernels are the production path, and isc::kernels::serial keeps a
// plain-loop reference used by the agreement tests and the benchmark tool.
// Every kernel is written so the two builds produce bitwise-identical
// output: work is partitioned per element/row with no cross-element
// floating-point reductions, and random draws are stateless per pair.

namespace isc::kernels {

// Bernoulli edge sampling for a DCSBM: pair {i,j} (i<j) is an edge with
// probability theta_i*theta_j*P(c_i,c_j). `community` is 0-based here.
// Result is sorted lexicographically regardless of thread count.
std::vector<std::pair<int, int>> sample_pair_edges(const Eigen::VectorXd& theta,
                                                   const Eigen::MatrixXd& P,
                                                   const std::vector<int>& community,
                                                   std::uint64_t seed);

// M(i,j) = A(i,j) / sqrt((d_i + ridge)(d_j + ridge)); zero diagonal.
Eigen::MatrixXd ridge_normalized_adjacency(const Graph& g, double ridge);

// Omega(i,j) = theta_i*theta_j*P(c_i,c_j), diagonal included.
Eigen::MatrixXd population_expectation(const Eigen::VectorXd& theta,
                                       const Eigen::MatrixXd& P,
                                       const std::vector<int>& community);

// Nearest center per point (squared Euclidean); ties -> lowest center index.
void assign_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                    std::vector<int>& labels, Eigen::VectorXd& dist2);

// Row normalization to unit length; rows with norm < eps are flagged and
// replaced by the first standard basis direction.
std::pair<Eigen::MatrixXd, std::vector<char>> normalize_rows(const Eigen::MatrixXd& x,
                                                             double eps);

// y = M x for symmetric M (columns are used as rows).
Eigen::VectorXd sym_matvec(const Eigen::MatrixXd& m, const Eigen::VectorXd& x);

namespace serial {

std::vector<std::pair<int, int>> sample_pair_edges(const Eigen::VectorXd& theta,
                                                   const Eigen::MatrixXd& P,
                                                   const std::vector<int>& community,
                                                   std::uint64_t seed);

Eigen::MatrixXd ridge_normalized_adjacency(const Graph& g, double ridge);

Eigen::MatrixXd population_expectation(const Eigen::VectorXd& theta,
                                       const Eigen::MatrixXd& P,
                                       const std::vector<int>& community);

void assign_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                    std::vector<int>& labels, Eigen::VectorXd& dist2);

std::pair<Eigen::MatrixXd, std::vector<char>> normalize_rows(const Eigen::MatrixXd& x,
                                                             double eps);

Eigen::VectorXd sym_matvec(const Eigen::MatrixXd& m, const Eigen::VectorXd& x);

}  // namespace serial

}  // namespace isc::kernels
