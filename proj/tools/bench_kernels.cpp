// Times each parallel kernel against its serial reference build on a
// mid-sized sampled graph and checks that their outputs agree bitwise
// (the contract the test suite also enforces, at smaller sizes).

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "isc/dcsbm.hpp"
#include "isc/graph.hpp"
#include "isc/kernels.hpp"
#include "isc/rng.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double best_of_3_ms(const std::function<void()>& fn) {
  double best = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-26s %10.2f ms %10.2f ms %8.2fx   %s\n", name.c_str(), serial_ms,
              parallel_ms, serial_ms / parallel_ms, match ? "match" : "MISMATCH");
}

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

int main(int argc, char** argv) {
  const int n = (argc > 1) ? std::atoi(argv[1]) : 1500;
  const int k = 3;

  isc::DcsbmParams params;
  params.n = n;
  params.k = k;
  params.mixing.setConstant(k, k, 0.3);
  params.mixing.diagonal().setConstant(0.8);
  params.community = isc::membership_iid_uniform(n, k, 7);
  params.theta = isc::theta_linear(n, 0.2, 0.6);

  std::printf("n = %d, K = %d\n", n, k);
  std::printf("%-26s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  bool all_match = true;
  namespace kk = isc::kernels;

  std::vector<int> community0(params.community.size());
  for (std::size_t i = 0; i < community0.size(); ++i)
    community0[i] = params.community[i] - 1;

  std::vector<std::pair<int, int>> edges_p, edges_s;
  double tp = best_of_3_ms([&] {
    edges_p = kk::sample_pair_edges(params.theta, params.mixing, community0, 11);
  });
  double ts = best_of_3_ms([&] {
    edges_s = kk::serial::sample_pair_edges(params.theta, params.mixing, community0, 11);
  });
  bool match = edges_p == edges_s;
  all_match = all_match && match;
  report("sample_pair_edges", ts, tp, match);

  const isc::Graph g(n, edges_s);

  Eigen::MatrixXd lap_p, lap_s;
  tp = best_of_3_ms([&] { lap_p = kk::ridge_normalized_adjacency(g, 2.5); });
  ts = best_of_3_ms([&] { lap_s = kk::serial::ridge_normalized_adjacency(g, 2.5); });
  match = bitwise_equal(lap_p, lap_s);
  all_match = all_match && match;
  report("ridge_normalized_adjacency", ts, tp, match);

  Eigen::MatrixXd omega_p, omega_s;
  tp = best_of_3_ms(
      [&] { omega_p = kk::population_expectation(params.theta, params.mixing, community0); });
  ts = best_of_3_ms([&] {
    omega_s = kk::serial::population_expectation(params.theta, params.mixing, community0);
  });
  match = bitwise_equal(omega_p, omega_s);
  all_match = all_match && match;
  report("population_expectation", ts, tp, match);

  const Eigen::MatrixXd points = lap_s.leftCols(k + 1);
  auto norm_p = points, norm_s = points;
  std::vector<char> flags_p, flags_s;
  tp = best_of_3_ms([&] { std::tie(norm_p, flags_p) = kk::normalize_rows(points, 1e-12); });
  ts = best_of_3_ms(
      [&] { std::tie(norm_s, flags_s) = kk::serial::normalize_rows(points, 1e-12); });
  match = bitwise_equal(norm_p, norm_s) && flags_p == flags_s;
  all_match = all_match && match;
  report("normalize_rows", ts, tp, match);

  const Eigen::MatrixXd centers = norm_s.topRows(k);
  std::vector<int> labels_p, labels_s;
  Eigen::VectorXd dist_p, dist_s;
  tp = best_of_3_ms([&] { kk::assign_nearest(norm_s, centers, labels_p, dist_p); });
  ts = best_of_3_ms([&] { kk::serial::assign_nearest(norm_s, centers, labels_s, dist_s); });
  match = labels_p == labels_s && bitwise_equal(dist_p, dist_s);
  all_match = all_match && match;
  report("assign_nearest", ts, tp, match);

  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
  Eigen::VectorXd y_p, y_s;
  tp = best_of_3_ms([&] { y_p = kk::sym_matvec(lap_s, x); });
  ts = best_of_3_ms([&] { y_s = kk::serial::sym_matvec(lap_s, x); });
  match = bitwise_equal(y_p, y_s);
  all_match = all_match && match;
  report("sym_matvec", ts, tp, match);

  if (!all_match) {
    std::printf("\nFAIL: at least one kernel pair disagreed\n");
    return 1;
  }
  std::printf("\nall kernel pairs agree bitwise\n");
  return 0;
}
