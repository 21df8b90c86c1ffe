#pragma once

#include "crowdcore/agreement.hpp"
#include "crowdcore/types.hpp"

namespace crowdcore {

// Record of the greedy peel. removal_order[j] is the vertex removed at step
// j (so it was the weighted-degree argmin of the survivor set S_i with
// i = n - j members); min_degree[j] is its degree inside that set. The last
// entry is the final singleton with degree 0.
struct PeelingTrace {
  std::vector<int> removal_order;
  Eigen::VectorXd min_degree;
  int best_step = 0;  // argmax of min_degree; ties resolve to the largest set

  int size() const { return static_cast<int>(removal_order.size()); }

  // Survivor set S_i (the i vertices still present when removal_order[n-i]
  // was selected), in ascending vertex order.
  std::vector<int> survivors(int set_size) const;
};

PeelingTrace peel(const AgreementGraph& graph);

// Survivor set with the maximal min-degree over the whole peel.
std::vector<int> max_core(const PeelingTrace& trace);

// log theta(W) = -min_{u in W} sum_{v in W \ {u}} gamma(u, v).
double log_theta(const AgreementGraph& graph, const std::vector<int>& members);

// build_graph + peel + max_core.
std::vector<int> expert_core(const ResponseMatrix& matrix,
                             std::optional<double> p_override = std::nullopt);

}  // namespace crowdcore
