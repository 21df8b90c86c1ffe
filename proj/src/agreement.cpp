#include "crowdcore/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace crowdcore {
namespace {

// Per-term log probabilities log C(m,i) + i log p + (m-i) log(1-p). The
// lgamma values are cached so the whole-table and single-t paths produce
// bit-identical doubles.
struct TermTable {
  int m;
  std::vector<double> log_fact;  // lgamma(i + 1)
  double log_p, log_1mp;

  TermTable(int m_in, double p) : m(m_in), log_fact(m_in + 1) {
    for (int i = 0; i <= m; ++i) log_fact[i] = std::lgamma(i + 1.0);
    log_p = std::log(p);
    log_1mp = std::log1p(-p);
  }

  double term(int i) const {
    return log_fact[m] - log_fact[i] - log_fact[m - i] + i * log_p + (m - i) * log_1mp;
  }

  // log-sum-exp of terms i in [lo, hi]
  double sum(int lo, int hi) const {
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = lo; i <= hi; ++i) peak = std::max(peak, term(i));
    if (!std::isfinite(peak)) return peak;
    double acc = 0.0;
    for (int i = lo; i <= hi; ++i) acc += std::exp(term(i) - peak);
    return peak + std::log(acc);
  }

  double tail(int t) const {
    if (t <= 0) return 0.0;
    const double upper = sum(t, m);
    if (upper <= -std::numbers::ln2) return upper;
    // The tail is close to 1, where the direct sum loses all relative
    // precision in the log; go through the (small) lower tail instead.
    return std::log1p(-std::exp(sum(0, t - 1)));
  }
};

}  // namespace

Eigen::MatrixXi agreement_counts(const ResponseMatrix& matrix) {
  const int n = matrix.worker_count();
  Eigen::MatrixXi tau = Eigen::MatrixXi::Zero(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const int t =
          static_cast<int>((matrix.labels.row(u).array() == matrix.labels.row(v).array()).count());
      tau(u, v) = t;
      tau(v, u) = t;
    }
  return tau;
}

double average_agreement_probability(const ResponseMatrix& matrix) {
  const int n = matrix.worker_count();
  if (n < 2) throw TooFewWorkersError("agreement probability needs at least 2 workers");
  const Eigen::MatrixXi tau = agreement_counts(matrix);
  double total = 0.0;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) total += tau(u, v);
  const double pairs = 0.5 * n * (n - 1);
  const double p = total / (pairs * matrix.question_count());
  return std::clamp(p, 1e-6, 1.0 - 1e-6);
}

double log_binomial_tail(int m, int t, double p) {
  if (m < 0 || t > m) throw DomainError("binomial tail needs 0 <= t <= m");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("binomial tail needs p in (0,1)");
  return TermTable(m, p).tail(t);
}

AgreementGraph build_graph(const ResponseMatrix& matrix, std::optional<double> p_override) {
  const int n = matrix.worker_count();
  if (n < 2) throw TooFewWorkersError("agreement graph needs at least 2 workers");
  if (p_override && !(*p_override > 0.0 && *p_override < 1.0))
    throw DomainError("p override must lie in (0,1)");

  AgreementGraph graph;
  graph.worker_count = n;
  graph.question_count = matrix.question_count();
  graph.tau = agreement_counts(matrix);
  graph.p = p_override ? *p_override : average_agreement_probability(matrix);

  const int m = graph.question_count;
  const TermTable table(m, graph.p);
  std::vector<double> weight(m + 1);
  for (int t = 0; t <= m; ++t) weight[t] = std::min(kGammaCap, -table.tail(t));

  graph.gamma = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      graph.gamma(u, v) = weight[graph.tau(u, v)];
      graph.gamma(v, u) = weight[graph.tau(u, v)];
    }
  return graph;
}

}  // namespace crowdcore
