#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "isc/dcsbm.hpp"
#include "isc/spectral.hpp"

namespace isc {

// Square confusion matrix, rows indexed by true label, columns by predicted.
// Padded with zero rows/columns so both labelings range over the same K.
Eigen::MatrixXi confusion_matrix(const std::vector<int>& predicted,
                                 const std::vector<int>& truth);

struct ErrorReport {
  double rate = 0.0;       // mismatches / n under the best label permutation
  int mismatches = 0;      // count of disagreeing nodes after relabeling
  std::vector<int> best_perm;  // best_perm[p-1] = true label matched to predicted p
};

// Minimum fraction of misclassified nodes over all permutations of the
// predicted labels.  Solved as an assignment problem in O(K^3).
ErrorReport clustering_error(const std::vector<int>& predicted,
                             const std::vector<int>& truth);

// Exhaustive version for small K; used to validate the assignment solver.
// Rejects K > 6 (factorial blowup).
ErrorReport clustering_error_bruteforce(const std::vector<int>& predicted,
                                        const std::vector<int>& truth);

// Minimum-cost assignment on a square cost matrix; returns col index chosen
// for each row.
std::vector<int> optimal_assignment(const Eigen::MatrixXd& cost);

struct HammingBound {
  double strong = 0.0;  // uses lambda_K and lambda_{K+1}
  double weak = 0.0;    // uses lambda_{K+1} only
};

// A-priori bounds on the fraction of mislabeled nodes, computed from the
// leading K+1 eigenvalues and the shortest row length m of the spectral
// embedding.  Requires m > 0 and at least K+1 eigenvalues.
HammingBound hamming_bound(const EigenSystem& es, int k, int n, double m);

// Length of the shortest row of the weighted spectral embedding (before row
// normalization); the m that enters the Hamming bounds.
double shortest_row_length(const Eigen::MatrixXd& weighted);

struct PerturbationCheck {
  bool applicable = false;  // precondition d*delta + min(D) > 3 ln(4n/eps) held
  bool computed = false;    // bound evaluated (needs d*delta + min(D) > 0)
  int trials = 0;
  int covered = 0;          // trials where max_k |lambda_hat_k - lambda_k| <= bound
  double coverage = 0.0;    // covered / trials
  bool holds = false;       // every trial covered
  double bound_max = 0.0;   // bound on max_k |lambda_hat_k - lambda_k|
  double bound_sq = 0.0;    // bound on sum_{k<=K} |lambda_hat_k - lambda_k|^2
};

// Monte-Carlo check of the eigenvalue concentration bound: samples graphs
// from the model, compares the leading K eigenvalues of the regularized
// graph operator against the population values, and reports how often the
// deviation stays within the predicted envelope.
PerturbationCheck eigen_perturbation_check(const DcsbmParams& params, double delta,
                                           double epsilon, int trials,
                                           std::uint64_t seed);

}  // namespace isc
