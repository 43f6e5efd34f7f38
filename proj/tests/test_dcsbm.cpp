#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "isc/dcsbm.hpp"
#include "isc/errors.hpp"
#include "isc/harness.hpp"
#include "isc/rng.hpp"
#include "isc/spectral.hpp"
#include "test_util.hpp"

using namespace isc;

namespace {

// The two-community setup behind the n-sweep benchmarks: strong diagonal
// mixing, constant theta 0.2 in the first block and 0.6 in the second.
DcsbmParams two_block_params(int n) {
  DcsbmParams p;
  p.n = n;
  p.k = 2;
  p.mixing = Eigen::MatrixXd(2, 2);
  p.mixing << 0.9, 0.5, 0.5, 0.9;
  p.community = membership_blocks({n / 2, n - n / 2});
  p.theta = theta_per_community({0.2, 0.6}, p.community);
  return p;
}

}  // namespace

TEST_CASE("parameter validation names the first violation") {
  DcsbmParams p = two_block_params(10);
  CHECK_NOTHROW(validate_for_sampling(p));

  DcsbmParams bad = p;
  bad.mixing(0, 1) = 0.4;  // asymmetric
  CHECK_THROWS_WITH_AS(validate_for_sampling(bad), doctest::Contains("not symmetric"),
                       ParameterError);

  bad = p;
  bad.mixing(0, 0) = 1.5;
  CHECK_THROWS_WITH_AS(validate_for_sampling(bad), doctest::Contains("outside [0,1]"),
                       ParameterError);

  bad = p;
  bad.theta[3] = 0.0;
  CHECK_THROWS_WITH_AS(validate_for_sampling(bad), doctest::Contains("theta[3]"),
                       ParameterError);

  bad = p;
  bad.community[2] = 7;
  CHECK_THROWS_WITH_AS(validate_for_sampling(bad), doctest::Contains("community[2]"),
                       ParameterError);

  bad = p;
  for (int& c : bad.community) c = 1;  // community 2 empty
  bad.theta = theta_per_community({0.2, 0.6}, bad.community);
  CHECK_THROWS_WITH_AS(validate_for_sampling(bad), doctest::Contains("community 2"),
                       ParameterError);

  // An edge probability above 1 is caught before any sampling and names
  // the offending pair of nodes.
  bad = p;
  bad.theta[0] = 1.2;
  bad.theta[1] = 1.1;
  CHECK_THROWS_WITH_AS(validate_for_sampling(bad), doctest::Contains("edge probability"),
                       ParameterError);

  bad = p;
  bad.k = 0;
  CHECK_THROWS_AS(validate_for_sampling(bad), ParameterError);
}

TEST_CASE("population validation additionally requires invertible mixing") {
  // Flat mixing (the end point of a cross-probability sweep) is fine for
  // sampling but singular, so the population route must reject it.
  DcsbmParams flat = two_block_params(10);
  flat.mixing << 0.5, 0.5, 0.5, 0.5;
  CHECK_NOTHROW(validate_for_sampling(flat));
  CHECK_THROWS_WITH_AS(validate_full(flat), doctest::Contains("singular"),
                       ParameterError);
  CHECK_THROWS_AS(population_matrices(flat, 0.1), ParameterError);

  DcsbmParams split = two_block_params(10);
  split.mixing << 0.9, 0.0, 0.0, 0.8;  // nonsingular but disconnected support
  CHECK_THROWS_WITH_AS(validate_full(split), doctest::Contains("reducible"),
                       ParameterError);
}

TEST_CASE("degenerate mixing matrices sample the expected graphs") {
  DcsbmParams p = two_block_params(8);
  p.mixing << 0.0, 0.0, 0.0, 0.0;
  CHECK(sample_adjacency(p, 3).edge_count() == 0);

  DcsbmParams full = two_block_params(8);
  full.mixing << 1.0, 1.0, 1.0, 1.0;
  full.theta = Eigen::VectorXd::Ones(8);
  const Graph g = sample_adjacency(full, 3);
  CHECK(g.edge_count() == 8 * 7 / 2);
}

TEST_CASE("empirical edge frequencies match the expectation matrix") {
  // Monte Carlo check of the sampler against the analytic expectation:
  // every pair frequency should sit within 4 standard errors nearly always.
  const DcsbmParams p = two_block_params(40);
  const PopulationMatrices pm = population_matrices(p, 0.1);
  const int m = 1000;
  Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(p.n, p.n);
  for (int s = 0; s < m; ++s) {
    const Graph g = sample_adjacency(p, rng::derive_seed(909, s));
    for (const auto& [i, j] : g.edges()) {
      freq(i, j) += 1.0;
      freq(j, i) += 1.0;
    }
  }
  freq /= m;
  int pairs = 0, inside = 0;
  for (int i = 0; i < p.n; ++i) {
    for (int j = i + 1; j < p.n; ++j) {
      const double prob = pm.omega(i, j);
      const double se = std::sqrt(prob * (1.0 - prob) / m);
      ++pairs;
      if (std::abs(freq(i, j) - prob) <= 4.0 * se) ++inside;
    }
  }
  CHECK(static_cast<double>(inside) / pairs >= 0.99);
}

TEST_CASE("sample mean of the adjacency converges to the expectation") {
  // Heavier version at the benchmark scale: mean over 500 draws, 3 SE.
  const DcsbmParams p = two_block_params(400);
  const PopulationMatrices pm = population_matrices(p, 0.1);
  const int m = 500;
  Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(p.n, p.n);
  for (int s = 0; s < m; ++s) {
    const Graph g = sample_adjacency(p, rng::derive_seed(808, s));
    for (const auto& [i, j] : g.edges()) {
      freq(i, j) += 1.0;
      freq(j, i) += 1.0;
    }
  }
  freq /= m;
  int pairs = 0, inside = 0;
  for (int i = 0; i < p.n; ++i) {
    for (int j = i + 1; j < p.n; ++j) {
      const double prob = pm.omega(i, j);
      const double se = std::sqrt(prob * (1.0 - prob) / m);
      ++pairs;
      if (std::abs(freq(i, j) - prob) <= 3.0 * se) ++inside;
    }
  }
  // 3 SE covers ~99.7% per pair; allow a small slack for the tail.
  CHECK(static_cast<double>(inside) / pairs >= 0.99);
}

TEST_CASE("population Laplacian satisfies the factored-form identity") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DcsbmParams p = test::random_params(60, 2 + static_cast<int>(seed % 3), seed);
    const PopulationMatrices pm = population_matrices(p, 0.1);
    CHECK(pm.factored_gap < 1e-10);
    CHECK(pm.script_d.minCoeff() > 0.0);
    CHECK((pm.omega - pm.omega.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // d_mid is the midpoint of the expected-degree range.
    CHECK(pm.d_mid ==
          doctest::Approx(0.5 * (pm.script_d.maxCoeff() + pm.script_d.minCoeff())));
  }
}

TEST_CASE("population Laplacian has numerical rank K") {
  for (std::uint64_t seed : {2ull, 5ull, 11ull}) {
    const int k = 2 + static_cast<int>(seed % 3);
    const DcsbmParams p = test::random_params(50, k, seed);
    const PopulationMatrices pm = population_matrices(p, 0.1);
    const EigenSystem es = leading_eigenpairs(pm.laplacian, k + 1);
    CHECK(std::abs(es.values[k]) < 1e-8 * std::abs(es.values[0]));
    CHECK(std::abs(es.values[k - 1]) > 1e-6);
  }
}

TEST_CASE("a huge ridge drives the population Laplacian to zero") {
  const DcsbmParams p = two_block_params(12);
  const PopulationMatrices pm = population_matrices(p, 1e9);
  CHECK(pm.laplacian.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("population eigenpairs: closed form agrees with the big problem") {
  const DcsbmParams p = two_block_params(30);
  const PopulationEigen pe = population_eigen(p, 0.1);
  REQUIRE(pe.eigs.count() == 2);
  CHECK(!pe.degenerate_spectrum);
  CHECK(pe.value_gap < 1e-8);
  CHECK(pe.vector_gap < 1e-8);

  // The eigenvalue set equals the nonzero spectrum of the Laplacian.
  const PopulationMatrices pm = population_matrices(p, 0.1);
  const EigenSystem direct = leading_eigenpairs(pm.laplacian, 2);
  CHECK(std::abs(pe.eigs.values[0] - direct.values[0]) < 1e-10);
  CHECK(std::abs(pe.eigs.values[1] - direct.values[1]) < 1e-10);
}

TEST_CASE("single-block model has a rank-one population Laplacian") {
  DcsbmParams p;
  p.n = 15;
  p.k = 1;
  p.mixing = Eigen::MatrixXd(1, 1);
  p.mixing << 0.6;
  p.community.assign(p.n, 1);
  p.theta = Eigen::VectorXd::Constant(p.n, 0.7);
  const PopulationEigen pe = population_eigen(p, 0.1);
  REQUIRE(pe.eigs.count() == 1);
  const PopulationMatrices pm = population_matrices(p, 0.1);
  const EigenSystem full = leading_eigenpairs(pm.laplacian, p.n);
  CHECK(std::abs(full.values[0] - pe.eigs.values[0]) < 1e-10);
  for (int k = 1; k < p.n; ++k) CHECK(std::abs(full.values[k]) < 1e-10);
}

TEST_CASE("symmetric two-block model: leading eigenvector constant in blocks") {
  DcsbmParams p;
  p.n = 16;
  p.k = 2;
  p.mixing = Eigen::MatrixXd(2, 2);
  p.mixing << 0.9, 0.1, 0.1, 0.9;
  p.community = membership_blocks({8, 8});
  p.theta = Eigen::VectorXd::Constant(p.n, 0.8);
  const PopulationEigen pe = population_eigen(p, 0.1);
  const Eigen::VectorXd eta1 = pe.eigs.vectors.col(0);
  for (int i = 1; i < 8; ++i) CHECK(eta1[i] == doctest::Approx(eta1[0]).epsilon(1e-10));
  for (int i = 9; i < 16; ++i) CHECK(eta1[i] == doctest::Approx(eta1[8]).epsilon(1e-10));
}

TEST_CASE("benchmark model with three communities has three nonzero eigenvalues") {
  const ExperimentConfig cfg = builtin_experiment("exp1b");
  const DcsbmParams p = instantiate_model(cfg, 120.0, rng::derive_seed(1, 0));
  REQUIRE(p.k == 3);
  const PopulationMatrices pm = population_matrices(p, 0.1);
  const EigenSystem full = leading_eigenpairs(pm.laplacian, p.n);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(full.values[k]) > 1e-8);
  for (int k = 3; k < p.n; ++k) CHECK(std::abs(full.values[k]) < 1e-8);
}

TEST_CASE("theta generators implement the documented formulas") {
  const Eigen::VectorXd q = theta_quadratic(4);
  CHECK(q[0] == doctest::Approx(0.5 + 0.5 * 0.0625));
  CHECK(q[1] == doctest::Approx(0.5 + 0.5 * 0.25));
  CHECK(q[2] == doctest::Approx(0.5 + 0.5 * 0.5625));
  CHECK(q[3] == doctest::Approx(1.0));

  const Eigen::VectorXd l = theta_linear(4);
  CHECK(l[0] == doctest::Approx(0.625));
  CHECK(l[1] == doctest::Approx(0.75));
  CHECK(l[2] == doctest::Approx(0.875));
  CHECK(l[3] == doctest::Approx(1.0));

  const Eigen::VectorXd pc = theta_per_community({0.2, 0.6}, {1, 2, 2, 1});
  CHECK(pc[0] == 0.2);
  CHECK(pc[1] == 0.6);
  CHECK(pc[2] == 0.6);
  CHECK(pc[3] == 0.2);
  CHECK_THROWS_AS(theta_per_community({0.2}, {1, 2}), ParameterError);
}

TEST_CASE("membership rules produce the documented block structure") {
  CHECK(membership_blocks({2, 3}) == std::vector<int>({1, 1, 2, 2, 2}));
  CHECK_THROWS_AS(membership_blocks({2, 0}), ParameterError);

  // Ratio rule: first block holds round(n/(c0+1)) nodes.
  const std::vector<int> r9 = membership_ratio_first(400, 9.0);
  CHECK(std::count(r9.begin(), r9.end(), 1) == 40);
  CHECK(std::count(r9.begin(), r9.end(), 2) == 360);
  const std::vector<int> r1 = membership_ratio_first(10, 1.0);
  CHECK(std::count(r1.begin(), r1.end(), 1) == 5);
  CHECK_THROWS_AS(membership_ratio_first(10, 0.0), ParameterError);
  CHECK_THROWS_AS(membership_ratio_first(2, 100.0), ParameterError);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::vector<int> g = membership_iid_uniform(30, 4, seed);
    CHECK(g.size() == 30);
    std::set<int> seen(g.begin(), g.end());
    CHECK(seen == std::set<int>({1, 2, 3, 4}));
    CHECK(g == membership_iid_uniform(30, 4, seed));
  }
  CHECK_THROWS_AS(membership_iid_uniform(3, 5, 0), ParameterError);
}
