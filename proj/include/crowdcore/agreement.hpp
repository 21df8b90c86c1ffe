#pragma once

#include "crowdcore/types.hpp"

namespace crowdcore {

// Complete weighted graph over workers. tau(u, v) counts identical answers;
// gamma(u, v) = -log P[Binomial(m, p) >= tau(u, v)] is the surprise of that
// much agreement under independent chance-level answering.
struct AgreementGraph {
  int worker_count = 0;
  int question_count = 0;
  double p = 0.0;  // chance agreement rate actually used (override or estimate)
  Eigen::MatrixXi tau;
  Eigen::MatrixXd gamma;
};

Eigen::MatrixXi agreement_counts(const ResponseMatrix& matrix);

// Mean pairwise agreement sum(tau) / (m * C(n, 2)), clamped to
// [1e-6, 1 - 1e-6]. Needs at least two workers.
double average_agreement_probability(const ResponseMatrix& matrix);

// log P[Binomial(m, p) >= t], evaluated in the log domain so that extreme
// tails keep full relative precision. t <= 0 gives 0; p must lie in (0, 1).
double log_binomial_tail(int m, int t, double p);

inline constexpr double kGammaCap = 1e12;

AgreementGraph build_graph(const ResponseMatrix& matrix,
                           std::optional<double> p_override = std::nullopt);

}  // namespace crowdcore
