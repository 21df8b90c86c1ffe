#include "crowdcore/peeling.hpp"

#include <algorithm>

namespace crowdcore {
namespace {

// Weighted degree of v inside the alive set, summed in ascending vertex
// order so independent recomputations agree bit for bit.
double exact_degree(const AgreementGraph& graph, const std::vector<char>& alive, int v) {
  double sum = 0.0;
  for (int u = 0; u < graph.worker_count; ++u)
    if (alive[u] && u != v) sum += graph.gamma(v, u);
  return sum;
}

}  // namespace

std::vector<int> PeelingTrace::survivors(int set_size) const {
  const int n = size();
  if (set_size < 1 || set_size > n)
    throw DomainError("survivor set size must lie in [1, n]");
  std::vector<int> out(removal_order.end() - set_size, removal_order.end());
  std::sort(out.begin(), out.end());
  return out;
}

PeelingTrace peel(const AgreementGraph& graph) {
  const int n = graph.worker_count;
  PeelingTrace trace;
  trace.removal_order.reserve(n);
  trace.min_degree = Eigen::VectorXd::Zero(n);

  std::vector<char> alive(n, 1);
  std::vector<double> degree(n);
  for (int v = 0; v < n; ++v) degree[v] = exact_degree(graph, alive, v);

  // Incremental updates drift by a few ulp, which would turn genuine degree
  // ties into arbitrary strict orders. Candidates within the drift bound of
  // the running minimum are re-evaluated exactly before the argmin is taken.
  const double top = n ? *std::max_element(degree.begin(), degree.end()) : 0.0;
  const double slack = 16.0 * std::numeric_limits<double>::epsilon() * n * top;

  const int refresh_period = std::max(1, n / 2);
  for (int j = 0; j < n; ++j) {
    if (j > 0 && j % refresh_period == 0)
      for (int v = 0; v < n; ++v)
        if (alive[v]) degree[v] = exact_degree(graph, alive, v);

    double rough = std::numeric_limits<double>::infinity();
    for (int v = 0; v < n; ++v)
      if (alive[v]) rough = std::min(rough, degree[v]);

    int argmin = -1;
    bool spread = false;
    for (int v = 0; v < n; ++v) {
      if (!alive[v] || degree[v] > rough + slack) continue;
      if (argmin == -1) argmin = v;
      spread = spread || degree[v] != degree[argmin];
    }
    if (spread) {
      int best = -1;
      for (int v = argmin; v < n; ++v) {
        if (!alive[v] || degree[v] > rough + slack) continue;
        degree[v] = exact_degree(graph, alive, v);
        if (best == -1 || degree[v] < degree[best]) best = v;
      }
      argmin = best;
    }

    trace.removal_order.push_back(argmin);
    trace.min_degree[j] = exact_degree(graph, alive, argmin);
    alive[argmin] = 0;
    for (int v = 0; v < n; ++v)
      if (alive[v]) degree[v] -= graph.gamma(v, argmin);
  }

  trace.best_step = 0;
  for (int j = 1; j < n; ++j)
    if (trace.min_degree[j] > trace.min_degree[trace.best_step]) trace.best_step = j;
  return trace;
}

std::vector<int> max_core(const PeelingTrace& trace) {
  return trace.survivors(trace.size() - trace.best_step);
}

double log_theta(const AgreementGraph& graph, const std::vector<int>& members) {
  validate_subset(graph.worker_count, members);
  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  double worst = std::numeric_limits<double>::infinity();
  for (int v : sorted) {
    double sum = 0.0;
    for (int u : sorted)
      if (u != v) sum += graph.gamma(v, u);
    worst = std::min(worst, sum);
  }
  return -worst;
}

std::vector<int> expert_core(const ResponseMatrix& matrix, std::optional<double> p_override) {
  if (matrix.worker_count() < 2)
    throw TooFewWorkersError("expert core needs at least 2 workers");
  return max_core(peel(build_graph(matrix, p_override)));
}

}  // namespace crowdcore
