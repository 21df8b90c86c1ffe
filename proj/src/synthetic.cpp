#include "crowdcore/synthetic.hpp"

#include <cmath>

#include "crowdcore/rng.hpp"

namespace crowdcore {
namespace {

void validate(const SyntheticSpec& spec) {
  if (spec.workers < 1 || spec.questions < 1 || spec.candidates < 2)
    throw BadSpecError("need workers >= 1, questions >= 1, candidates >= 2");
  if (spec.experts < 0 || spec.experts > spec.workers)
    throw BadSpecError("expert count must lie in [0, workers]");
  if (!(spec.expert_accuracy > 1.0 / spec.candidates && spec.expert_accuracy <= 1.0))
    throw BadSpecError("expert accuracy must lie in (1/s, 1]");
}

std::vector<std::string> candidate_names(int s) {
  std::vector<std::string> names(s);
  for (int c = 0; c < s; ++c)
    names[c] = s <= 26 ? std::string(1, char('A' + c)) : "a" + std::to_string(c);
  return names;
}

}  // namespace

Instance generate(const SyntheticSpec& spec) {
  validate(spec);
  const int n = spec.workers, m = spec.questions, s = spec.candidates;

  Instance out;
  out.truth.answer.resize(m);
  out.truth.is_expert.assign(n, 0);
  for (int w = 0; w < spec.experts; ++w) out.truth.is_expert[w] = 1;

  for (int q = 0; q < m; ++q)
    out.truth.answer[q] = static_cast<int>(
        rng::bounded(rng::key(spec.seed, rng::kStreamTruth, q), s));

  ResponseMatrix& matrix = out.matrix;
  matrix.labels.resize(n, m);
  for (int w = 0; w < n; ++w)
    for (int q = 0; q < m; ++q) {
      const std::uint64_t cell = rng::key(spec.seed, rng::kStreamLabel, w, q);
      int label;
      if (w < spec.experts) {
        if (rng::uniform(cell ^ 1) < spec.expert_accuracy) {
          label = out.truth.answer[q];
        } else {
          const int wrong = static_cast<int>(rng::bounded(cell ^ 2, s - 1));
          label = wrong + (wrong >= out.truth.answer[q]);
        }
      } else {
        label = static_cast<int>(rng::bounded(cell ^ 3, s));
      }
      matrix.labels(w, q) = label;
    }

  matrix.workers.resize(n);
  for (int w = 0; w < n; ++w) {
    matrix.workers[w] = "w" + std::to_string(w + 1);
    matrix.worker_index[matrix.workers[w]] = w;
  }
  matrix.questions.resize(m);
  matrix.candidates.assign(m, candidate_names(s));
  for (int q = 0; q < m; ++q) {
    matrix.questions[q] = "q" + std::to_string(q + 1);
    matrix.question_index[matrix.questions[q]] = q;
  }
  return out;
}

double expected_pair_agreement(const SyntheticSpec& spec, PairKind kind) {
  const double u = 1.0 / spec.candidates;
  if (kind != PairKind::kExpertExpert) return u;
  const double edge = spec.expert_accuracy - u;
  return edge * edge / (1.0 - u) + u;
}

double pair_agreement_rate_check(const SyntheticSpec& spec, PairKind kind) {
  int u, v;
  switch (kind) {
    case PairKind::kExpertExpert:
      if (spec.experts < 2) throw BadSpecError("need two experts for an expert pair");
      u = 0, v = 1;
      break;
    case PairKind::kExpertNon:
      if (spec.experts < 1 || spec.experts >= spec.workers)
        throw BadSpecError("need one expert and one non-expert");
      u = 0, v = spec.experts;
      break;
    default:
      if (spec.workers - spec.experts < 2) throw BadSpecError("need two non-experts");
      u = spec.experts, v = spec.experts + 1;
  }
  const Instance instance = generate(spec);
  const auto& labels = instance.matrix.labels;
  const auto agreed = (labels.row(u).array() == labels.row(v).array()).count();
  return static_cast<double>(agreed) / spec.questions;
}

}  // namespace crowdcore
