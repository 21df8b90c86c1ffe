#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace crowdcore {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyInputError : Error { using Error::Error; };
struct MissingCellError : Error { using Error::Error; };
struct DuplicateCellError : Error { using Error::Error; };
struct UnknownCandidateError : Error { using Error::Error; };
struct UnknownQuestionError : Error { using Error::Error; };
struct UnknownWorkerError : Error { using Error::Error; };
struct MissingTruthError : Error { using Error::Error; };
struct TooFewWorkersError : Error { using Error::Error; };
struct EmptySubsetError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct BadKError : Error { using Error::Error; };
struct BadSpecError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

struct ResponseRecord {
  std::string worker;
  std::string question;
  std::string answer;
};

// (question, candidate) rows fixing the candidate order per question.
using Catalog = std::vector<std::pair<std::string, std::string>>;

// Complete n x m answer matrix. labels(w, q) is the index of worker w's
// answer within candidates[q]. Candidate order is first appearance unless
// an explicit catalog was supplied; that order is the deterministic
// tie-break order everywhere downstream.
struct ResponseMatrix {
  std::vector<std::string> workers;
  std::vector<std::string> questions;
  std::vector<std::vector<std::string>> candidates;
  Eigen::MatrixXi labels;

  std::unordered_map<std::string, int> worker_index;
  std::unordered_map<std::string, int> question_index;

  int worker_count() const { return static_cast<int>(workers.size()); }
  int question_count() const { return static_cast<int>(questions.size()); }
  int candidate_count(int q) const { return static_cast<int>(candidates[q].size()); }

  int max_candidate_count() const {
    int s = 0;
    for (const auto& c : candidates) s = std::max<int>(s, static_cast<int>(c.size()));
    return s;
  }

  static ResponseMatrix from_records(const std::vector<ResponseRecord>& records,
                                     const std::optional<Catalog>& catalog = std::nullopt);
};

// Reference answers (-1 where unknown) and optional expert marks, both
// indexed against a companion ResponseMatrix.
struct GroundTruth {
  std::vector<int> answer;
  std::vector<char> is_expert;

  bool has_expert_marks() const {
    for (char e : is_expert)
      if (e) return true;
    return false;
  }

  std::vector<int> expert_indices() const {
    std::vector<int> out;
    for (int w = 0; w < static_cast<int>(is_expert.size()); ++w)
      if (is_expert[w]) out.push_back(w);
    return out;
  }
};

struct AggregationResult {
  Eigen::VectorXi estimates;       // per question, candidate index
  std::vector<char> tie;           // per question, tie among top vote counts
  std::vector<int> top2_depth;     // top2 only: survivor-set size at decision, -1 = fallback
  std::map<std::string, double> info;
};

// Fraction of questions with known truth where the estimate matches.
double accuracy(const Eigen::VectorXi& estimates, const GroundTruth& truth);

// Worker subsets are lists of row indices: must be non-empty, in range and
// free of duplicates.
void validate_subset(int worker_count, const std::vector<int>& subset);

}  // namespace crowdcore
