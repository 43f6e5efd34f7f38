#include "isc/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <vector>

#include "isc/errors.hpp"
#include "isc/kernels.hpp"
#include "isc/rng.hpp"

namespace isc {

const char* to_string(DVariant v) {
  switch (v) {
    case DVariant::Midpoint: return "midpoint";
    case DVariant::DMax: return "dmax";
    case DVariant::DMin: return "dmin";
    case DVariant::DBar: return "dbar";
  }
  return "midpoint";
}

DVariant parse_d_variant(const std::string& name) {
  if (name == "midpoint") return DVariant::Midpoint;
  if (name == "dmax") return DVariant::DMax;
  if (name == "dmin") return DVariant::DMin;
  if (name == "dbar") return DVariant::DBar;
  throw ParameterError("unknown d variant '" + name +
                       "' (expected midpoint|dmax|dmin|dbar)");
}

Eigen::MatrixXd ridge_scaled_adjacency(const Graph& g, double ridge) {
  for (int i = 0; i < g.node_count(); ++i) {
    if (g.degree(i) + ridge <= 0.0)
      throw NumericalError("singular degree scaling: node " + std::to_string(i) +
                           " has degree " + std::to_string(g.degree(i)) +
                           " and ridge " + std::to_string(ridge));
  }
  return kernels::ridge_normalized_adjacency(g, ridge);
}

RegularizedLaplacian build_regularized_laplacian(const Graph& g, double delta,
                                                 DVariant variant) {
  if (delta < 0.0) throw ParameterError("delta must be nonnegative");
  const DegreeStats stats = degree_stats(g);
  double d_used = 0.0;
  switch (variant) {
    case DVariant::Midpoint: d_used = stats.d_mid; break;
    case DVariant::DMax: d_used = stats.d_max; break;
    case DVariant::DMin: d_used = stats.d_min; break;
    case DVariant::DBar: d_used = stats.d_bar; break;
  }
  RegularizedLaplacian l;
  l.matrix = ridge_scaled_adjacency(g, delta * d_used);
  l.delta = delta;
  l.d_used = d_used;
  l.variant = variant;
  return l;
}

namespace {

// Orders eigenvalue indices by descending |lambda|. Exact magnitudes sort
// first; runs of magnitudes within 1e-12 of their neighbor are then
// reordered positive-first / lower-index-first. Two passes keep the
// comparator a strict weak ordering (a tolerance inside a single sort
// comparator would not be transitive).
std::vector<int> magnitude_order(const Eigen::VectorXd& w) {
  std::vector<int> idx(w.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&w](int a, int b) {
    const double ma = std::abs(w[a]), mb = std::abs(w[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  std::size_t lo = 0;
  while (lo < idx.size()) {
    std::size_t hi = lo + 1;
    while (hi < idx.size() &&
           std::abs(std::abs(w[idx[hi - 1]]) - std::abs(w[idx[hi]])) <= 1e-12)
      ++hi;
    std::stable_sort(idx.begin() + lo, idx.begin() + hi, [&w](int a, int b) {
      const bool pa = w[a] > 0.0, pb = w[b] > 0.0;
      if (pa != pb) return pa;
      return a < b;
    });
    lo = hi;
  }
  return idx;
}

// Makes the entry of largest magnitude (lowest index on exact ties)
// positive.
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  double best = std::abs(v[0]);
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (v[arg] < 0.0) v = -v;
}

void check_residuals(const Eigen::MatrixXd& m, const EigenSystem& es) {
  for (int k = 0; k < es.count(); ++k) {
    const double res = (m * es.vectors.col(k) - es.values[k] * es.vectors.col(k)).norm();
    if (!(res <= 1e-8))
      throw NumericalError("eigenpair " + std::to_string(k) + " residual " +
                           std::to_string(res) + " exceeds 1e-8");
  }
}

EigenSystem dense_leading(const Eigen::MatrixXd& m, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericalError("dense symmetric eigendecomposition failed to converge");
  const Eigen::VectorXd& w = solver.eigenvalues();
  const Eigen::MatrixXd& v = solver.eigenvectors();
  const std::vector<int> order = magnitude_order(w);
  EigenSystem es;
  es.values.resize(k);
  es.vectors.resize(m.rows(), k);
  for (int i = 0; i < k; ++i) {
    es.values[i] = w[order[i]];
    es.vectors.col(i) = v.col(order[i]);
    canonicalize_sign(es.vectors.col(i));
  }
  return es;
}

// Lanczos with full reorthogonalization. The start vector is fixed (derived
// from a constant seed) so results are reproducible. When the Krylov space
// closes early the recursion restarts in a fresh orthogonal direction
// (a zero beta makes T block tridiagonal; Ritz pairs of completed blocks
// are exact eigenpairs), and no result is returned before exploring
// min(n, 2k+10) dimensions, so early closures cannot hide leading pairs.
EigenSystem lanczos_leading(const Eigen::MatrixXd& m, int k) {
  const int n = static_cast<int>(m.rows());
  const double conv_tol = 1e-10;
  const long max_total = 10L * n;
  const int floor_steps = std::min(n, std::max(2 * k + 10, 16));

  rng::SplitMix64 gen(rng::derive_seed(0x15CEA57ULL, 0));
  const auto fresh_direction = [&gen, n]() {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gen.next_double() - 0.5;
    return v;
  };

  Eigen::MatrixXd basis(n, std::min(n, std::max(4 * k + 40, 80)));
  std::vector<double> alpha, beta;  // beta[j] links v_j to v_{j+1}
  Eigen::VectorXd v = fresh_direction();
  v.normalize();
  basis.col(0) = v;

  int steps = 0;
  long total = 0;
  while (true) {
    Eigen::VectorXd w = kernels::sym_matvec(m, basis.col(steps));
    const double a = basis.col(steps).dot(w);
    alpha.push_back(a);
    w -= a * basis.col(steps);
    if (steps > 0) w -= beta[steps - 1] * basis.col(steps - 1);
    // Full reorthogonalization, two passes.
    const auto span = basis.leftCols(steps + 1);
    w -= span * (span.transpose() * w);
    w -= span * (span.transpose() * w);
    double b = w.norm();
    ++steps;
    ++total;

    if (b < 1e-13 && steps < n) {
      // Invariant subspace closed; restart in a fresh orthogonal direction.
      b = 0.0;
      bool found = false;
      for (int attempt = 0; attempt < 32 && !found; ++attempt) {
        Eigen::VectorXd r = fresh_direction();
        const auto all = basis.leftCols(steps);
        r -= all * (all.transpose() * r);
        r -= all * (all.transpose() * r);
        if (r.norm() > 1e-12) {
          v = r.normalized();
          found = true;
        }
      }
      if (!found)
        throw NumericalError("Lanczos restart failed: no orthogonal direction after " +
                             std::to_string(steps) + " steps (n = " +
                             std::to_string(n) + ")");
    } else if (b >= 1e-13) {
      v = w / b;
    }

    const bool room = steps < n && total < max_total;
    if ((steps >= floor_steps || !room) && steps >= k) {
      // Convergence test on the tridiagonal Ritz problem (O(steps^2)).
      Eigen::Map<const Eigen::VectorXd> diag(alpha.data(), steps);
      Eigen::VectorXd subdiag(std::max(steps - 1, 0));
      for (int i = 0; i + 1 < steps; ++i) subdiag[i] = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tsolver;
      tsolver.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
      if (tsolver.info() != Eigen::Success)
        throw NumericalError("tridiagonal eigendecomposition failed in Lanczos");
      const Eigen::VectorXd& ritz = tsolver.eigenvalues();
      const Eigen::MatrixXd& s = tsolver.eigenvectors();
      const std::vector<int> order = magnitude_order(ritz);
      const double edge = (steps < n) ? b : 0.0;
      bool converged = true;
      for (int i = 0; i < k; ++i)
        if (edge * std::abs(s(steps - 1, order[i])) > conv_tol) converged = false;
      if (converged || steps >= n) {
        EigenSystem es;
        es.values.resize(k);
        es.vectors.resize(n, k);
        for (int i = 0; i < k; ++i) {
          es.values[i] = ritz[order[i]];
          es.vectors.col(i) = basis.leftCols(steps) * s.col(order[i]);
          es.vectors.col(i).normalize();
          canonicalize_sign(es.vectors.col(i));
        }
        return es;
      }
    }

    if (!room)
      throw NumericalError("Lanczos failed to converge: " + std::to_string(steps) +
                           " steps, " + std::to_string(total) + " matvecs (cap " +
                           std::to_string(max_total) + "), final beta " +
                           std::to_string(b));
    beta.push_back(b);
    if (steps + 1 > basis.cols())
      basis.conservativeResize(Eigen::NoChange,
                               std::min<Eigen::Index>(n, basis.cols() + 80));
    basis.col(steps) = v;
  }
}

}  // namespace

EigenSystem leading_eigenpairs(const Eigen::MatrixXd& sym, int k, SolverMode mode) {
  const int n = static_cast<int>(sym.rows());
  if (sym.cols() != n) throw ParameterError("eigensolver input must be square");
  if (k < 1 || k > n)
    throw ParameterError("requested " + std::to_string(k) + " eigenpairs from an n=" +
                         std::to_string(n) + " matrix");
  const bool dense = (mode == SolverMode::Dense) || (mode == SolverMode::Auto && n <= 4096);
  EigenSystem es = dense ? dense_leading(sym, k) : lanczos_leading(sym, k);
  check_residuals(sym, es);
  return es;
}

EigenSystem leading_eigenpairs(const RegularizedLaplacian& l, int k, SolverMode mode) {
  return leading_eigenpairs(l.matrix, k, mode);
}

double weak_signal_quantity(const EigenSystem& es, int k) {
  if (k < 1) throw ParameterError("weak_signal_quantity requires K >= 1");
  if (es.count() < k + 1)
    throw ParameterError("weak_signal_quantity needs K+1 = " + std::to_string(k + 1) +
                         " eigenvalues, have " + std::to_string(es.count()));
  const double lk = es.values[k - 1];
  if (std::abs(lk) < 1e-12)
    throw NumericalError("undefined eigenvalue ratio: |lambda_K| < 1e-12");
  return 1.0 - std::abs(es.values[k] / lk);
}

namespace {

void append_g17(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  out += buf;
}

}  // namespace

void save_eigensystem(const std::string& path, const EigenSystem& es) {
  const int n = static_cast<int>(es.vectors.rows());
  std::string out = "eigensystem v1\n";
  out += std::to_string(n) + " " + std::to_string(es.count()) + "\n";
  for (int k = 0; k < es.count(); ++k) {
    append_g17(out, es.values[k]);
    out += "\n";
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < es.count(); ++k) {
      if (k) out += " ";
      append_g17(out, es.vectors(i, k));
    }
    out += "\n";
  }
  write_text_atomic(path, out);
}

EigenSystem load_eigensystem(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "eigensystem v1")
    throw DataError(path + ": not an eigensystem file");
  int n = 0, k = 0;
  if (!(in >> n >> k) || n < 0 || k < 0 || k > n)
    throw DataError(path + ": bad eigensystem dimensions");
  EigenSystem es;
  es.values.resize(k);
  es.vectors.resize(n, k);
  for (int j = 0; j < k; ++j)
    if (!(in >> es.values[j])) throw DataError(path + ": truncated eigenvalues");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      if (!(in >> es.vectors(i, j))) throw DataError(path + ": truncated eigenvectors");
  return es;
}

}  // namespace isc
