#pragma once

#include "crowdcore/peeling.hpp"
#include "crowdcore/rng.hpp"
#include "crowdcore/types.hpp"

namespace crowdcore {

// Tie handling shared by all vote-based aggregators. Lexicographic picks
// the tied candidate earliest in catalog order; seeded-uniform draws one
// with a counter-based key, so the choice depends only on (seed, question).
struct TiePolicy {
  enum class Mode { kLexicographic, kSeededUniform };

  Mode mode = Mode::kLexicographic;
  std::uint64_t seed = 0;

  static TiePolicy lexicographic() { return {}; }
  static TiePolicy seeded(std::uint64_t seed) {
    return {Mode::kSeededUniform, seed};
  }

  // Index into a list of `count` tied options associated with `question`.
  int pick(int question, int count) const {
    if (mode == Mode::kLexicographic || count == 1) return 0;
    return static_cast<int>(rng::bounded(
        rng::key(seed, rng::kStreamTie, static_cast<std::uint64_t>(question)),
        static_cast<std::uint64_t>(count)));
  }
};

AggregationResult majority_vote(const ResponseMatrix& matrix,
                                const TiePolicy& policy = TiePolicy::lexicographic(),
                                const std::optional<std::vector<int>>& subset = std::nullopt);

// Early-stopped vote over the peeling order: grow the survivor sets from
// S_1 upward and take the first candidate to reach two votes; if none ever
// does, fall back to the last survivor's answer.
AggregationResult top2(const ResponseMatrix& matrix, const PeelingTrace& trace);

struct HyperParams {
  int k = 2;          // questions per hyper-question
  int rounds = 1;
  std::uint64_t seed = 0;
};

// Majority vote over k-tuples of answers on randomly grouped questions,
// repeated for `rounds` permutations; the winning tuple of each group casts
// one vote per component question. Tuple-stage ties resolve to the smallest
// tuple in catalog order (for k = 1 they are ordinary per-question ties and
// follow the policy); the final per-question vote follows the policy.
AggregationResult hyper_mv(const ResponseMatrix& matrix, const HyperParams& params,
                           const TiePolicy& policy = TiePolicy::lexicographic(),
                           const std::optional<std::vector<int>>& subset = std::nullopt);

}  // namespace crowdcore
