#pragma once

#include <cstdint>

#include "crowdcore/types.hpp"

namespace crowdcore {

// Planted-expert instance: truth is uniform over the candidates, the first
// `experts` workers answer correctly with probability expert_accuracy and
// otherwise pick a wrong candidate uniformly, everyone else answers
// uniformly at random.
struct SyntheticSpec {
  int workers = 0;
  int questions = 0;
  int candidates = 0;
  int experts = 0;
  double expert_accuracy = 1.0;
  std::uint64_t seed = 0;
};

struct Instance {
  ResponseMatrix matrix;
  GroundTruth truth;
};

Instance generate(const SyntheticSpec& spec);

enum class PairKind { kExpertExpert, kExpertNon, kNonNon };

// Closed-form per-question agreement probability for a worker pair.
double expected_pair_agreement(const SyntheticSpec& spec, PairKind kind);

}  // namespace crowdcore
