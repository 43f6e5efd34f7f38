#pragma once

#include <Eigen/Dense>
#include <string>

#include "isc/graph.hpp"

namespace isc {

// Which degree statistic scales the ridge term delta*d.
enum class DVariant { Midpoint, DMax, DMin, DBar };

const char* to_string(DVariant v);
DVariant parse_d_variant(const std::string& name);

// L_delta = (D + delta*d*I)^{-1/2} A (D + delta*d*I)^{-1/2}. Symmetric with
// zero diagonal; every eigenvalue lies in [-1, 1].
struct RegularizedLaplacian {
  Eigen::MatrixXd matrix;
  double delta = 0.0;
  double d_used = 0.0;  // the regularization scale actually applied
  DVariant variant = DVariant::Midpoint;
};

RegularizedLaplacian build_regularized_laplacian(const Graph& g, double delta,
                                                 DVariant variant = DVariant::Midpoint);

// (D + ridge*I)^{-1/2} A (D + ridge*I)^{-1/2} for an explicit ridge value.
// Shared by the main pipeline (ridge = delta*d) and the tau-regularized
// baseline (ridge = tau), so equal ridges give the identical matrix.
// Throws a numerical error naming the first node with d_i + ridge <= 0.
Eigen::MatrixXd ridge_scaled_adjacency(const Graph& g, double ridge);

// Leading eigenpairs of a symmetric matrix, ordered by descending |lambda|;
// magnitude ties (within 1e-12) put the positive value first, then lower
// original index. Vectors are unit norm with canonical sign (the entry of
// largest magnitude is positive), so serialized systems are stable across
// platforms.
struct EigenSystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // column k pairs with values[k]
  int count() const { return static_cast<int>(values.size()); }
};

enum class SolverMode {
  Auto,     // dense for n <= 4096, Lanczos above
  Dense,    // full symmetric eigendecomposition
  Lanczos,  // iterative Krylov path with full reorthogonalization
};

// Top-k eigenpairs by magnitude. Residual ||Mv - lambda v|| <= 1e-8 is
// verified for every returned pair; non-convergence of the iterative path
// raises a numerical error carrying iteration diagnostics.
EigenSystem leading_eigenpairs(const Eigen::MatrixXd& sym, int k,
                               SolverMode mode = SolverMode::Auto);
EigenSystem leading_eigenpairs(const RegularizedLaplacian& l, int k,
                               SolverMode mode = SolverMode::Auto);

// 1 - |lambda_{K+1}/lambda_K| (values below 0.1 mark a weak-signal graph).
// Requires at least K+1 values; |lambda_K| < 1e-12 is an undefined ratio.
double weak_signal_quantity(const EigenSystem& es, int k);

// Text serialization (values then vectors, canonical signs). Doubles are
// written with 17 significant digits so round-trips are exact.
void save_eigensystem(const std::string& path, const EigenSystem& es);
EigenSystem load_eigensystem(const std::string& path);

}  // namespace isc
