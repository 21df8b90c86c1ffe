#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crowdcore/peeling.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace crowdcore;

namespace {

AgreementGraph graph_from_weights(const Eigen::MatrixXd& gamma) {
  AgreementGraph graph;
  graph.worker_count = static_cast<int>(gamma.rows());
  graph.question_count = 0;
  graph.p = 0.5;
  graph.tau = Eigen::MatrixXi::Zero(gamma.rows(), gamma.cols());
  graph.gamma = gamma;
  return graph;
}

Eigen::MatrixXd random_weights(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      gamma(u, v) = unit(rng);
      gamma(v, u) = gamma(u, v);
    }
  return gamma;
}

AgreementGraph figure1_graph() {
  const int tau[6][6] = {
      {0, 6, 7, 1, 1, 3},
      {6, 0, 5, 1, 2, 5},
      {7, 5, 0, 1, 1, 2},
      {1, 1, 1, 0, 2, 1},
      {1, 2, 1, 2, 0, 2},
      {3, 5, 2, 1, 2, 0},
  };
  Eigen::MatrixXd gamma(6, 6);
  for (int u = 0; u < 6; ++u)
    for (int v = 0; v < 6; ++v) gamma(u, v) = tau[u][v];
  return graph_from_weights(gamma);
}

}  // namespace

TEST_CASE("figure 1 peel with count weights") {
  const AgreementGraph graph = figure1_graph();

  // initial weighted degrees
  const double degrees[6] = {18, 19, 16, 6, 8, 13};
  for (int v = 0; v < 6; ++v) CHECK(graph.gamma.row(v).sum() == degrees[v]);

  const PeelingTrace trace = peel(graph);
  CHECK(trace.removal_order == std::vector<int>{3, 4, 5, 1, 0, 2});
  const double recorded[6] = {6, 6, 10, 11, 7, 0};
  for (int j = 0; j < 6; ++j) CHECK(trace.min_degree[j] == recorded[j]);

  CHECK(trace.best_step == 3);
  CHECK(max_core(trace) == std::vector<int>{0, 1, 2});
  CHECK(trace.survivors(1) == std::vector<int>{2});
  CHECK(log_theta(graph, {0, 1, 2}) == -11.0);
}

TEST_CASE("theta basics") {
  const AgreementGraph graph = figure1_graph();
  CHECK(log_theta(graph, {4}) == 0.0);
  CHECK(log_theta(graph, {0, 2}) == -7.0);
  CHECK_THROWS_AS(log_theta(graph, {}), EmptySubsetError);
  CHECK_THROWS_AS(log_theta(graph, {6}), UnknownWorkerError);
}

TEST_CASE("trivial traces") {
  SUBCASE("single vertex") {
    const PeelingTrace trace = peel(graph_from_weights(Eigen::MatrixXd::Zero(1, 1)));
    CHECK(trace.removal_order == std::vector<int>{0});
    CHECK(trace.min_degree[0] == 0.0);
    CHECK(max_core(trace) == std::vector<int>{0});
  }
  SUBCASE("uniform weights peel in index order") {
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Constant(5, 5, 2.0);
    gamma.diagonal().setZero();
    const PeelingTrace trace = peel(graph_from_weights(gamma));
    CHECK(trace.removal_order == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(max_core(trace) == std::vector<int>{0, 1, 2, 3, 4});
  }
  SUBCASE("one positive edge keeps both vertices") {
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(2, 2);
    gamma(0, 1) = gamma(1, 0) = 5.0;
    CHECK(max_core(peel(graph_from_weights(gamma))) == std::vector<int>{0, 1});
  }
  SUBCASE("zero-weight pair still returns both (largest-set tie rule)") {
    CHECK(max_core(peel(graph_from_weights(Eigen::MatrixXd::Zero(2, 2)))) ==
          std::vector<int>{0, 1});
  }
  SUBCASE("survivor size is validated") {
    const PeelingTrace trace = peel(graph_from_weights(Eigen::MatrixXd::Zero(2, 2)));
    CHECK_THROWS_AS(trace.survivors(0), DomainError);
    CHECK_THROWS_AS(trace.survivors(3), DomainError);
  }
}

TEST_CASE("recorded min-degrees match from-scratch recomputation") {
  std::mt19937 rng(7);
  for (int n : {3, 6, 12, 25}) {
    const AgreementGraph graph = graph_from_weights(random_weights(n, rng));
    const PeelingTrace trace = peel(graph);
    std::vector<char> alive(n, 1);
    for (int j = 0; j < n; ++j) {
      const int v = trace.removal_order[j];
      double expected = 0.0;
      for (int u = 0; u < n; ++u)
        if (alive[u] && u != v) expected += graph.gamma(v, u);
      CHECK(trace.min_degree[j] == expected);
      alive[v] = 0;
    }
  }
}

TEST_CASE("max_core output is a k-core at the recorded level") {
  std::mt19937 rng(8);
  for (int round = 0; round < 20; ++round) {
    const AgreementGraph graph = graph_from_weights(random_weights(9, rng));
    const PeelingTrace trace = peel(graph);
    const std::vector<int> core = max_core(trace);
    const double level = trace.min_degree[trace.best_step];
    for (int v : core) {
      double degree = 0.0;
      for (int u : core)
        if (u != v) degree += graph.gamma(v, u);
      CHECK(degree >= level);
    }
    CHECK(-log_theta(graph, core) == level);
  }
}

TEST_CASE("peeling solves the maximin exactly on small graphs") {
  std::mt19937 rng(9);
  for (int round = 0; round < 60; ++round) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const AgreementGraph graph = graph_from_weights(random_weights(n, rng));
    const PeelingTrace trace = peel(graph);
    CHECK(-log_theta(graph, max_core(trace)) == oracles::exhaustive_maximin(graph.gamma));
  }
}

TEST_CASE("scaling the weights leaves the result unchanged") {
  std::mt19937 rng(10);
  const Eigen::MatrixXd base = random_weights(10, rng);
  const PeelingTrace reference = peel(graph_from_weights(base));
  for (double c : {8.0, 0.0625, 3.0}) {
    const PeelingTrace scaled = peel(graph_from_weights(c * base));
    CHECK(scaled.removal_order == reference.removal_order);
    CHECK(scaled.best_step == reference.best_step);
  }
}

TEST_CASE("expert core on table 1") {
  const ResponseMatrix matrix = fixtures::table1_matrix();
  const std::vector<int> core = expert_core(matrix);

  // subset of {w1, w2, w3} with at least two members
  CHECK(core.size() >= 2);
  for (int w : core) CHECK(w <= 2);

  // exact-rational exhaustive minimization of theta agrees
  const auto minimizers =
      oracles::exact_theta_minimizers(agreement_counts(matrix), 8, oracles::Rational(1, 3));
  bool found = false;
  for (unsigned mask : minimizers) found = found || mask == oracles::to_mask(core);
  CHECK(found);
}

TEST_CASE("expert core errors and trivial cases") {
  std::istringstream one("worker,question,answer\nw1,q1,A\n");
  CHECK_THROWS_AS(expert_core(load_response_matrix(one)), TooFewWorkersError);

  std::istringstream two("worker,question,answer\nw1,q1,A\nw1,q2,B\nw2,q1,A\nw2,q2,B\n");
  CHECK(expert_core(load_response_matrix(two)) == std::vector<int>{0, 1});

  std::istringstream disjoint("worker,question,answer\nw1,q1,A\nw2,q1,B\n");
  CHECK(expert_core(load_response_matrix(disjoint)) == std::vector<int>{0, 1});
}
