#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "isc/errors.hpp"
#include "isc/spectral.hpp"
#include "test_util.hpp"

using namespace isc;

TEST_CASE("single-edge Laplacian is hand computable") {
  const Graph g(2, {{0, 1}});
  const RegularizedLaplacian l = build_regularized_laplacian(g, 0.1);
  CHECK(l.d_used == doctest::Approx(1.0));
  CHECK(l.matrix(0, 0) == 0.0);
  CHECK(l.matrix(1, 1) == 0.0);
  CHECK(l.matrix(0, 1) == doctest::Approx(1.0 / 1.1).epsilon(1e-12));
  CHECK(l.matrix(1, 0) == l.matrix(0, 1));
}

TEST_CASE("unregularized complete graph has the known spectrum") {
  const int n = 6;
  const Graph g = test::complete_graph(n);
  const RegularizedLaplacian l = build_regularized_laplacian(g, 0.0);
  const EigenSystem es = leading_eigenpairs(l, n);
  CHECK(es.values[0] == doctest::Approx(1.0).epsilon(1e-10));
  for (int k = 1; k < n; ++k)
    CHECK(es.values[k] == doctest::Approx(-1.0 / (n - 1)).epsilon(1e-9));
}

TEST_CASE("zero ridge with an isolated node is a singularity error") {
  const Graph g(3, {{0, 1}});
  CHECK_THROWS_WITH_AS(build_regularized_laplacian(g, 0.0),
                       doctest::Contains("node 2"), NumericalError);
  CHECK_NOTHROW(build_regularized_laplacian(g, 0.1));
  CHECK_THROWS_AS(build_regularized_laplacian(g, -0.5), ParameterError);
}

TEST_CASE("regularization variants pick the documented degree scale") {
  const Graph path = test::path_graph(3);  // degrees 1, 2, 1
  CHECK(build_regularized_laplacian(path, 0.1, DVariant::Midpoint).d_used ==
        doctest::Approx(1.5));
  CHECK(build_regularized_laplacian(path, 0.1, DVariant::DMax).d_used ==
        doctest::Approx(2.0));
  CHECK(build_regularized_laplacian(path, 0.1, DVariant::DMin).d_used ==
        doctest::Approx(1.0));
  CHECK(build_regularized_laplacian(path, 0.1, DVariant::DBar).d_used ==
        doctest::Approx(4.0 / 3.0));

  CHECK(parse_d_variant("dmax") == DVariant::DMax);
  CHECK(to_string(DVariant::DBar) == std::string("dbar"));
  CHECK_THROWS_AS(parse_d_variant("bogus"), ParameterError);
}

TEST_CASE("Laplacian is symmetric, hollow, and spectrally bounded") {
  const Graph g = sample_adjacency(test::random_params(80, 2, 12), 12);
  const RegularizedLaplacian l = build_regularized_laplacian(g, 0.1);
  CHECK((l.matrix - l.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(l.matrix.diagonal().cwiseAbs().maxCoeff() == 0.0);
  const EigenSystem es = leading_eigenpairs(l, g.node_count());
  CHECK(es.values.cwiseAbs().maxCoeff() <= 1.0 + 1e-10);
}

TEST_CASE("shared ridge helper equals the pipeline Laplacian bitwise") {
  const Graph g = sample_adjacency(test::random_params(50, 2, 6), 6);
  const RegularizedLaplacian l = build_regularized_laplacian(g, 0.1);
  const Eigen::MatrixXd direct = ridge_scaled_adjacency(g, 0.1 * l.d_used);
  CHECK((l.matrix.array() == direct.array()).all());
}

TEST_CASE("trace of L^2 shrinks as the ridge grows") {
  const Graph g = sample_adjacency(test::random_params(60, 2, 14), 14);
  std::vector<double> grid = {0.1, 0.5, 1.0, 5.0};
  if (degree_stats(g).d_min > 0) grid.insert(grid.begin(), 0.0);
  double prev = 1e300;
  for (double delta : grid) {
    const RegularizedLaplacian l = build_regularized_laplacian(g, delta);
    const double tr = (l.matrix * l.matrix).trace();
    CHECK(tr <= prev + 1e-12);
    prev = tr;
  }
}

TEST_CASE("eigenpair ordering: magnitude first, positive wins ties") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m.diagonal() << 0.5, -0.5, 0.3, -0.1;
  const EigenSystem es = leading_eigenpairs(m, 4);
  CHECK(es.values[0] == doctest::Approx(0.5));
  CHECK(es.values[1] == doctest::Approx(-0.5));
  CHECK(es.values[2] == doctest::Approx(0.3));
  CHECK(es.values[3] == doctest::Approx(-0.1));
}

TEST_CASE("eigenvectors are unit norm with canonical sign and small residual") {
  const Graph g = sample_adjacency(test::random_params(70, 3, 20), 20);
  const RegularizedLaplacian l = build_regularized_laplacian(g, 0.1);
  const EigenSystem es = leading_eigenpairs(l, 5);
  for (int k = 0; k < es.count(); ++k) {
    const Eigen::VectorXd v = es.vectors.col(k);
    CHECK(std::abs(v.norm() - 1.0) <= 1e-10);
    int arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    CHECK(v[arg] > 0.0);
    CHECK((l.matrix * v - es.values[k] * v).norm() <= 1e-8);
  }
  // Magnitudes are non-increasing.
  for (int k = 1; k < es.count(); ++k)
    CHECK(std::abs(es.values[k]) <= std::abs(es.values[k - 1]) + 1e-12);
}

TEST_CASE("full decomposition reconstructs the matrix") {
  const Graph g = sample_adjacency(test::random_params(40, 2, 30), 30);
  const RegularizedLaplacian l = build_regularized_laplacian(g, 0.2);
  const int n = g.node_count();
  const EigenSystem es = leading_eigenpairs(l, n);
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k)
    rebuilt += es.values[k] * es.vectors.col(k) * es.vectors.col(k).transpose();
  CHECK((rebuilt - l.matrix).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("iterative solver agrees with the dense oracle") {
  // One structured instance (distinct cosine spectrum) and one sampled one.
  std::vector<Graph> graphs;
  graphs.push_back(test::path_graph(150));
  graphs.push_back(sample_adjacency(test::random_params(150, 2, 44), 44));
  for (const Graph& g : graphs) {
    const RegularizedLaplacian l = build_regularized_laplacian(g, 0.1);
    const int k = 4;
    const EigenSystem dense = leading_eigenpairs(l, k, SolverMode::Dense);
    const EigenSystem lanczos = leading_eigenpairs(l, k, SolverMode::Lanczos);
    REQUIRE(dense.count() == k);
    REQUIRE(lanczos.count() == k);
    for (int j = 0; j < k; ++j) {
      CHECK(std::abs(dense.values[j] - lanczos.values[j]) <= 1e-8);
      // Compare vectors only at simple, well-separated eigenvalues.
      const double gap_lo =
          j + 1 < k ? std::abs(std::abs(dense.values[j]) - std::abs(dense.values[j + 1]))
                    : 1.0;
      const double gap_hi =
          j > 0 ? std::abs(std::abs(dense.values[j]) - std::abs(dense.values[j - 1]))
                : 1.0;
      if (std::min(gap_lo, gap_hi) > 1e-4) {
        const double diff =
            std::min((dense.vectors.col(j) - lanczos.vectors.col(j)).norm(),
                     (dense.vectors.col(j) + lanczos.vectors.col(j)).norm());
        CHECK(diff <= 1e-6);
      }
    }
  }
}

TEST_CASE("eigensolver input validation") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(leading_eigenpairs(m, 4), ParameterError);
  CHECK_THROWS_AS(leading_eigenpairs(m, 0), ParameterError);
  CHECK_THROWS_AS(leading_eigenpairs(Eigen::MatrixXd::Zero(2, 3), 1), ParameterError);
}

TEST_CASE("weak-signal quantity from explicit spectra") {
  EigenSystem es;
  es.values = Eigen::VectorXd(3);
  es.values << 1.0, 0.5, 0.2;
  es.vectors = Eigen::MatrixXd::Identity(3, 3);
  CHECK(weak_signal_quantity(es, 2) == doctest::Approx(1.0 - 0.2 / 0.5));
  CHECK(weak_signal_quantity(es, 1) == doctest::Approx(0.5));

  es.values << 1.0, -0.4, 0.4;  // equal magnitudes at K=2
  CHECK(weak_signal_quantity(es, 2) == doctest::Approx(0.0));

  es.values << 1.0, 1e-13, 1e-14;
  CHECK_THROWS_AS(weak_signal_quantity(es, 2), NumericalError);
  CHECK_THROWS_AS(weak_signal_quantity(es, 3), ParameterError);  // needs K+1 values
  CHECK_THROWS_AS(weak_signal_quantity(es, 0), ParameterError);
}

TEST_CASE("eigensystem serialization round trips exactly") {
  test::TempDir tmp("eigensystem");
  const Graph g = sample_adjacency(test::random_params(35, 2, 50), 50);
  const RegularizedLaplacian l = build_regularized_laplacian(g, 0.1);
  const EigenSystem es = leading_eigenpairs(l, 3);
  save_eigensystem(tmp.file("sys.txt"), es);
  const EigenSystem back = load_eigensystem(tmp.file("sys.txt"));
  REQUIRE(back.count() == es.count());
  CHECK((back.values.array() == es.values.array()).all());
  CHECK((back.vectors.array() == es.vectors.array()).all());

  test::write_file(tmp.file("junk.txt"), "not an eigensystem\n");
  CHECK_THROWS_AS(load_eigensystem(tmp.file("junk.txt")), DataError);
}
