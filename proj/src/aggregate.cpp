#include "crowdcore/aggregate.hpp"

#include <algorithm>
#include <map>

namespace crowdcore {
namespace {

std::vector<int> resolve_subset(const ResponseMatrix& matrix,
                                const std::optional<std::vector<int>>& subset) {
  if (!subset) {
    std::vector<int> all(matrix.worker_count());
    for (int w = 0; w < matrix.worker_count(); ++w) all[w] = w;
    return all;
  }
  validate_subset(matrix.worker_count(), *subset);
  return *subset;
}

// Argmax candidate of `votes` for `question`, ties resolved per policy over
// the tied candidates in catalog order.
template <typename Count>
int pick_winner(const std::vector<Count>& votes, int question, const TiePolicy& policy,
                bool* tie_out) {
  const Count top = *std::max_element(votes.begin(), votes.end());
  std::vector<int> tied;
  for (int c = 0; c < static_cast<int>(votes.size()); ++c)
    if (votes[c] == top) tied.push_back(c);
  if (tie_out) *tie_out = tied.size() > 1;
  return tied[policy.pick(question, static_cast<int>(tied.size()))];
}

}  // namespace

AggregationResult majority_vote(const ResponseMatrix& matrix, const TiePolicy& policy,
                                const std::optional<std::vector<int>>& subset) {
  const std::vector<int> rows = resolve_subset(matrix, subset);
  const int m = matrix.question_count();

  AggregationResult result;
  result.estimates.resize(m);
  result.tie.assign(m, 0);
  for (int q = 0; q < m; ++q) {
    std::vector<long long> votes(matrix.candidate_count(q), 0);
    for (int w : rows) ++votes[matrix.labels(w, q)];
    bool tie = false;
    result.estimates[q] = pick_winner(votes, q, policy, &tie);
    result.tie[q] = tie;
  }
  return result;
}

AggregationResult top2(const ResponseMatrix& matrix, const PeelingTrace& trace) {
  const int n = matrix.worker_count();
  const int m = matrix.question_count();
  if (n < 2) throw TooFewWorkersError("top2 needs at least 2 workers");
  if (trace.size() != n) throw DomainError("trace does not match the matrix");

  AggregationResult result;
  result.estimates.resize(m);
  result.tie.assign(m, 0);
  result.top2_depth.assign(m, -1);
  for (int q = 0; q < m; ++q) {
    std::vector<int> votes(matrix.candidate_count(q), 0);
    const int first = trace.removal_order[n - 1];  // S_1
    votes[matrix.labels(first, q)] = 1;
    int estimate = matrix.labels(first, q);  // Alg. 2 fallback
    for (int i = 2; i <= n; ++i) {
      const int w = trace.removal_order[n - i];
      const int c = matrix.labels(w, q);
      if (++votes[c] == 2) {
        estimate = c;
        result.top2_depth[q] = i;
        break;
      }
    }
    result.estimates[q] = estimate;
  }
  return result;
}

AggregationResult hyper_mv(const ResponseMatrix& matrix, const HyperParams& params,
                           const TiePolicy& policy,
                           const std::optional<std::vector<int>>& subset) {
  const int m = matrix.question_count();
  if (params.k < 1 || params.k > m) throw BadKError("hyper-question size must lie in [1, m]");
  if (params.rounds < 1) throw DomainError("rounds must be >= 1");
  const std::vector<int> rows = resolve_subset(matrix, subset);
  const int k = params.k;

  std::vector<std::vector<long long>> decoded(m);
  for (int q = 0; q < m; ++q) decoded[q].assign(matrix.candidate_count(q), 0);

  std::vector<int> perm(m);
  std::vector<int> group(k);
  for (int round = 0; round < params.rounds; ++round) {
    for (int q = 0; q < m; ++q) perm[q] = q;
    for (int i = m - 1; i >= 1; --i) {
      const auto j = rng::bounded(
          rng::key(params.seed, rng::kStreamPerm, static_cast<std::uint64_t>(round),
                   static_cast<std::uint64_t>(i)),
          static_cast<std::uint64_t>(i) + 1);
      std::swap(perm[i], perm[j]);
    }

    for (int g = 0; g + k <= m; g += k) {
      std::map<std::vector<int>, int> tuple_votes;
      std::vector<int> tuple(k);
      for (int w : rows) {
        for (int j = 0; j < k; ++j) tuple[j] = matrix.labels(w, perm[g + j]);
        ++tuple_votes[tuple];
      }
      int top = 0;
      for (const auto& [_, count] : tuple_votes) top = std::max(top, count);

      // Winning tuple. Multi-question tuples resolve ties to the smallest
      // tuple in catalog order; 1-tuples are ordinary per-question votes
      // and follow the policy (keyed like majority_vote, so k = 1 reduces
      // to it exactly).
      const std::vector<int>* winner = nullptr;
      if (k == 1) {
        std::vector<const std::vector<int>*> tied;
        for (const auto& [t, count] : tuple_votes)
          if (count == top) tied.push_back(&t);
        winner = tied[policy.pick(perm[g], static_cast<int>(tied.size()))];
      } else {
        for (const auto& [t, count] : tuple_votes)
          if (count == top) {
            winner = &t;
            break;
          }
      }
      for (int j = 0; j < k; ++j) ++decoded[perm[g + j]][(*winner)[j]];
    }
  }

  AggregationResult result;
  result.estimates.resize(m);
  result.tie.assign(m, 0);
  for (int q = 0; q < m; ++q) {
    bool tie = false;
    result.estimates[q] = pick_winner(decoded[q], q, policy, &tie);
    result.tie[q] = tie;
  }
  result.info["hyper_k"] = k;
  result.info["hyper_rounds"] = params.rounds;
  return result;
}

}  // namespace crowdcore
