#include "crowdcore/types.hpp"

#include <algorithm>

namespace crowdcore {

ResponseMatrix ResponseMatrix::from_records(const std::vector<ResponseRecord>& records,
                                            const std::optional<Catalog>& catalog) {
  if (records.empty()) throw EmptyInputError("no response records");

  ResponseMatrix out;
  std::unordered_map<std::string, std::unordered_map<std::string, int>> catalog_index;
  if (catalog) {
    for (const auto& [question, candidate] : *catalog) {
      auto& slots = catalog_index[question];
      if (!slots.emplace(candidate, static_cast<int>(slots.size())).second)
        throw DuplicateCellError("catalog repeats candidate '" + candidate +
                                 "' for question '" + question + "'");
    }
  }

  auto intern = [](std::vector<std::string>& ids, std::unordered_map<std::string, int>& index,
                   const std::string& id) {
    auto [it, fresh] = index.emplace(id, static_cast<int>(ids.size()));
    if (fresh) ids.push_back(id);
    return it->second;
  };

  std::vector<std::array<int, 3>> cells;  // worker, question, label
  cells.reserve(records.size());
  for (const auto& rec : records) {
    const int w = intern(out.workers, out.worker_index, rec.worker);
    const int q = intern(out.questions, out.question_index, rec.question);
    if (q == static_cast<int>(out.candidates.size())) out.candidates.emplace_back();
    int label;
    if (catalog) {
      auto cat = catalog_index.find(rec.question);
      if (cat == catalog_index.end())
        throw UnknownCandidateError("question '" + rec.question + "' missing from catalog");
      auto slot = cat->second.find(rec.answer);
      if (slot == cat->second.end())
        throw UnknownCandidateError("answer '" + rec.answer + "' not in catalog of question '" +
                                    rec.question + "'");
      label = slot->second;
    } else {
      auto& names = out.candidates[q];
      auto it = std::find(names.begin(), names.end(), rec.answer);
      label = static_cast<int>(it - names.begin());
      if (it == names.end()) names.push_back(rec.answer);
    }
    cells.push_back({w, q, label});
  }
  if (catalog) {
    for (size_t q = 0; q < out.questions.size(); ++q) {
      auto& names = out.candidates[q];
      names.resize(catalog_index[out.questions[q]].size());
      for (const auto& [question, candidate] : *catalog)
        if (question == out.questions[q]) names[catalog_index[question][candidate]] = candidate;
    }
  }

  const int n = out.worker_count();
  const int m = out.question_count();
  out.labels = Eigen::MatrixXi::Constant(n, m, -1);
  for (const auto& [w, q, label] : cells) {
    if (out.labels(w, q) != -1)
      throw DuplicateCellError("duplicate cell (" + out.workers[w] + ", " + out.questions[q] + ")");
    out.labels(w, q) = label;
  }
  for (int w = 0; w < n; ++w)
    for (int q = 0; q < m; ++q)
      if (out.labels(w, q) == -1)
        throw MissingCellError("missing cell (" + out.workers[w] + ", " + out.questions[q] + ")");
  return out;
}

double accuracy(const Eigen::VectorXi& estimates, const GroundTruth& truth) {
  if (estimates.size() != static_cast<Eigen::Index>(truth.answer.size()))
    throw UnknownQuestionError("estimates cover " + std::to_string(estimates.size()) +
                               " questions, truth covers " + std::to_string(truth.answer.size()));
  long long known = 0, hits = 0;
  for (Eigen::Index q = 0; q < estimates.size(); ++q) {
    if (truth.answer[q] < 0) continue;
    ++known;
    hits += estimates[q] == truth.answer[q];
  }
  if (known == 0) throw MissingTruthError("no reference answers available");
  return static_cast<double>(hits) / static_cast<double>(known);
}

void validate_subset(int worker_count, const std::vector<int>& subset) {
  if (subset.empty()) throw EmptySubsetError("worker subset is empty");
  std::vector<char> seen(worker_count, 0);
  for (int w : subset) {
    if (w < 0 || w >= worker_count)
      throw UnknownWorkerError("worker index " + std::to_string(w) + " out of range");
    if (seen[w]) throw UnknownWorkerError("worker index " + std::to_string(w) + " repeated");
    seen[w] = 1;
  }
}

}  // namespace crowdcore
