#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "isc/graph.hpp"
#include "isc/spectral.hpp"

namespace isc {

// Degree-corrected stochastic block model: an edge between i < j appears
// independently with probability theta_i * theta_j * mixing(g_i, g_j).
struct DcsbmParams {
  int n = 0;
  int k = 0;
  Eigen::MatrixXd mixing;      // K x K, symmetric, entries in [0,1]
  Eigen::VectorXd theta;       // length n, strictly positive
  std::vector<int> community;  // length n, entries in {1..K}
};

// Checks everything sampling needs, in a fixed order, naming the first
// violation: dimensions, symmetry, entry ranges, positive theta, nonempty
// communities, and every pairwise edge probability <= 1 (the per-community
// top-two theta values make the pair check exact in O(n + K^2)).
void validate_for_sampling(const DcsbmParams& params);

// validate_for_sampling plus the population-analysis requirements on the
// mixing matrix: nonsingular and irreducible (support graph connected).
// Only the population operations need these; sampling a singular P (as a
// flat-mixing sweep endpoint does) is legitimate.
void validate_full(const DcsbmParams& params);

Graph sample_adjacency(const DcsbmParams& params, std::uint64_t seed);

// Analytic expectation quantities. Construction cross-checks the factored
// form of the population Laplacian against the direct product and records
// the observed max-norm gap (required < 1e-10).
struct PopulationMatrices {
  Eigen::MatrixXd omega;          // E[A] with the diagonal kept
  Eigen::VectorXd script_d;       // expected degrees, row sums of omega
  Eigen::MatrixXd laplacian;      // population regularized Laplacian
  double d_mid = 0.0;             // (max + min expected degree)/2
  double delta = 0.0;
  double factored_gap = 0.0;
};

PopulationMatrices population_matrices(const DcsbmParams& params, double delta);

// The K nonzero eigenpairs of the population Laplacian, from the direct
// n x n decomposition, cross-validated against the K x K closed form
// (eigenvectors assembled from per-community masks) when the small
// problem's spectrum is simple. A repeated eigenvalue within 1e-8 sets
// degenerate_spectrum and skips the cross-check.
struct PopulationEigen {
  EigenSystem eigs;
  bool degenerate_spectrum = false;
  double value_gap = 0.0;   // max |closed-form lambda - direct lambda|
  double vector_gap = 0.0;  // max over k of min(||eta - v||, ||eta + v||)
};

PopulationEigen population_eigen(const DcsbmParams& params, double delta);

// Named theta generators and membership rules used by the experiment grids.
Eigen::VectorXd theta_per_community(const std::vector<double>& values,
                                    const std::vector<int>& community);
// theta_i = base + scale*(i/n)^2 with i running 1..n.
Eigen::VectorXd theta_quadratic(int n, double base = 0.5, double scale = 0.5);
// theta_i = base + scale*(i/n) with i running 1..n.
Eigen::VectorXd theta_linear(int n, double base = 0.5, double scale = 0.5);

// Each node picks a community uniformly at random; resamples (bounded
// retries) until every community is nonempty.
std::vector<int> membership_iid_uniform(int n, int k, std::uint64_t seed);
// Contiguous blocks of the given sizes (must sum to n).
std::vector<int> membership_blocks(const std::vector<int>& sizes);
// Two blocks sized round(n/(c0+1)) and the rest.
std::vector<int> membership_ratio_first(int n, double c0);

}  // namespace isc
