#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "crowdcore/agreement.hpp"
#include "crowdcore/io.hpp"
#include "crowdcore/synthetic.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace crowdcore;

TEST_CASE("table 1 agreement counts match the figure") {
  const Eigen::MatrixXi tau = agreement_counts(fixtures::table1_matrix());
  // all 15 edge labels
  const int expected[6][6] = {
      {0, 6, 7, 1, 1, 3},
      {6, 0, 5, 1, 2, 5},
      {7, 5, 0, 1, 1, 2},
      {1, 1, 1, 0, 2, 1},
      {1, 2, 1, 2, 0, 2},
      {3, 5, 2, 1, 2, 0},
  };
  for (int u = 0; u < 6; ++u)
    for (int v = 0; v < 6; ++v)
      if (u != v) CHECK(tau(u, v) == expected[u][v]);
}

TEST_CASE("single worker has no pairs") {
  std::istringstream in("worker,question,answer\nw1,q1,A\n");
  const ResponseMatrix matrix = load_response_matrix(in);
  CHECK(agreement_counts(matrix).size() == 1);
  CHECK_THROWS_AS(average_agreement_probability(matrix), TooFewWorkersError);
}

TEST_CASE("average agreement probability") {
  SUBCASE("table 1 gives exactly 1/3") {
    CHECK(average_agreement_probability(fixtures::table1_matrix()) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("identical workers clamp high") {
    std::istringstream in("worker,question,answer\nw1,q1,A\nw2,q1,A\n");
    CHECK(average_agreement_probability(load_response_matrix(in)) == 1.0 - 1e-6);
  }
  SUBCASE("fully disagreeing workers clamp low") {
    std::istringstream in("worker,question,answer\nw1,q1,A\nw2,q1,B\n");
    CHECK(average_agreement_probability(load_response_matrix(in)) == 1e-6);
  }
}

TEST_CASE("log binomial tail basics") {
  CHECK(log_binomial_tail(2, 2, 0.5) == doctest::Approx(std::log(0.25)).epsilon(1e-12));
  CHECK(log_binomial_tail(7, 0, 0.3) == 0.0);
  CHECK(log_binomial_tail(0, 0, 0.5) == 0.0);
  // single-term tail: t = m
  CHECK(log_binomial_tail(10, 10, 0.25) ==
        doctest::Approx(10 * std::log(0.25)).epsilon(1e-12));
  CHECK(log_binomial_tail(8, 7, 1.0 / 3) ==
        doctest::Approx(std::log(8 * std::pow(1.0 / 3, 7) * (2.0 / 3) +
                                 std::pow(1.0 / 3, 8))).epsilon(1e-12));

  CHECK_THROWS_AS(log_binomial_tail(5, 6, 0.5), DomainError);
  CHECK_THROWS_AS(log_binomial_tail(5, 2, 0.0), DomainError);
  CHECK_THROWS_AS(log_binomial_tail(5, 2, 1.0), DomainError);
}

TEST_CASE("log binomial tail against the exact oracle") {
  const std::pair<double, oracles::Rational> ps[] = {
      {0.1, oracles::Rational(1, 10)},
      {1.0 / 3, oracles::Rational(1, 3)},
      {0.5, oracles::Rational(1, 2)},
      {0.9, oracles::Rational(9, 10)},
  };
  for (const auto& [p, p_exact] : ps) {
    for (int m : {1, 2, 3, 7, 20, 50}) {
      const auto tails = oracles::exact_tails(m, p_exact);
      for (int t = 1; t <= m; ++t) {
        const double expected = oracles::log_of_rational(tails[t]);
        const double got = log_binomial_tail(m, t, p);
        CHECK(std::abs(got - expected) <=
              1e-9 * std::max(1e-300, std::abs(expected)));
      }
    }
  }
}

TEST_CASE("tail is monotone in t and never positive") {
  for (double p : {0.2, 0.5, 0.8}) {
    double previous = 0.0;
    for (int t = 0; t <= 30; ++t) {
      const double value = log_binomial_tail(30, t, p);
      CHECK(value <= 0.0);
      CHECK(value <= previous + 1e-12);
      previous = value;
    }
  }
}

TEST_CASE("complement identity at small m") {
  for (int m : {1, 2, 5, 9}) {
    for (int t = 1; t <= m; ++t) {
      const double p = 0.37;
      double lower = 0.0;
      for (int i = 0; i < t; ++i) {
        double choose = std::lgamma(m + 1.0) - std::lgamma(i + 1.0) - std::lgamma(m - i + 1.0);
        lower += std::exp(choose + i * std::log(p) + (m - i) * std::log1p(-p));
      }
      CHECK(std::exp(log_binomial_tail(m, t, p)) + lower == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("build_graph") {
  const ResponseMatrix matrix = fixtures::table1_matrix();
  const AgreementGraph graph = build_graph(matrix);

  SUBCASE("p and strongest edge match the exact tail") {
    CHECK(graph.p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    const double expected =
        -oracles::oracle_log_tail(8, 7, oracles::Rational(1, 3));
    CHECK(graph.gamma(0, 2) == doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("gamma agrees with the scalar tail bit for bit") {
    for (int u = 0; u < 6; ++u)
      for (int v = u + 1; v < 6; ++v)
        CHECK(graph.gamma(u, v) == -log_binomial_tail(8, graph.tau(u, v), graph.p));
  }
  SUBCASE("symmetry and zero diagonal") {
    CHECK(graph.gamma == graph.gamma.transpose().eval());
    for (int u = 0; u < 6; ++u) CHECK(graph.gamma(u, u) == 0.0);
  }
  SUBCASE("gamma is monotone in tau") {
    for (int u = 0; u < 6; ++u)
      for (int v = u + 1; v < 6; ++v)
        for (int a = 0; a < 6; ++a)
          for (int b = a + 1; b < 6; ++b)
            if (graph.tau(u, v) < graph.tau(a, b))
              CHECK(graph.gamma(u, v) <= graph.gamma(a, b));
  }
  SUBCASE("tau = 0 gives gamma = 0") {
    std::istringstream in("worker,question,answer\nw1,q1,A\nw2,q1,B\n");
    const AgreementGraph tiny = build_graph(load_response_matrix(in), 0.5);
    CHECK(tiny.tau(0, 1) == 0);
    CHECK(tiny.gamma(0, 1) == 0.0);
  }
  SUBCASE("identical workers hit the maximum weight") {
    std::istringstream in(
        "worker,question,answer\nw1,q1,A\nw1,q2,B\nw2,q1,A\nw2,q2,B\n");
    const AgreementGraph twin = build_graph(load_response_matrix(in), 0.25);
    CHECK(twin.gamma(0, 1) == doctest::Approx(-2 * std::log(0.25)).epsilon(1e-12));
  }
  SUBCASE("p override is respected and validated") {
    const AgreementGraph forced = build_graph(matrix, 0.5);
    CHECK(forced.p == 0.5);
    CHECK_THROWS_AS(build_graph(matrix, 1.5), DomainError);
  }
}

TEST_CASE("permuting workers permutes the graph") {
  const Instance instance = generate({8, 12, 4, 3, 0.9, 42});
  const AgreementGraph graph = build_graph(instance.matrix);

  // reverse the worker order
  ResponseMatrix reversed = instance.matrix;
  for (int w = 0; w < 8; ++w) reversed.labels.row(w) = instance.matrix.labels.row(7 - w);
  const AgreementGraph rgraph = build_graph(reversed);
  CHECK(rgraph.p == graph.p);
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      CHECK(rgraph.tau(u, v) == graph.tau(7 - u, 7 - v));
      CHECK(rgraph.gamma(u, v) == graph.gamma(7 - u, 7 - v));
    }
}

TEST_CASE("graph dump format") {
  const ResponseMatrix matrix = fixtures::table1_matrix();
  const AgreementGraph graph = build_graph(matrix);
  std::ostringstream out;
  write_graph_csv(matrix, graph, out);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "u,v,tau,gamma");
  std::getline(lines, line);
  CHECK(line.substr(0, 8) == "w1,w2,6,");
  int rows = 1;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 15);
}
