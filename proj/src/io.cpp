#include "crowdcore/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "crowdcore/agreement.hpp"
#include "crowdcore/peeling.hpp"

namespace crowdcore {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

// Reads a CSV stream of fixed-width rows, checking the header.
std::vector<std::vector<std::string>> read_rows(std::istream& in, const std::string& header,
                                                size_t width) {
  std::string line;
  bool saw_header = false;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != header)
        throw ParseError("expected header '" + header + "', got '" + line + "'");
      saw_header = true;
      continue;
    }
    auto fields = split_row(line);
    if (fields.size() != width)
      throw ParseError("expected " + std::to_string(width) + " fields, got '" + line + "'");
    rows.push_back(std::move(fields));
  }
  if (!saw_header) throw EmptyInputError("stream has no header row");
  return rows;
}

std::string format_g12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

ResponseMatrix load_response_matrix(std::istream& in, const std::optional<Catalog>& catalog) {
  std::vector<ResponseRecord> records;
  for (auto& row : read_rows(in, "worker,question,answer", 3))
    records.push_back({std::move(row[0]), std::move(row[1]), std::move(row[2])});
  return ResponseMatrix::from_records(records, catalog);
}

void save_response_matrix(const ResponseMatrix& matrix, std::ostream& out) {
  out << "worker,question,answer\n";
  for (int w = 0; w < matrix.worker_count(); ++w)
    for (int q = 0; q < matrix.question_count(); ++q)
      out << matrix.workers[w] << ',' << matrix.questions[q] << ','
          << matrix.candidates[q][matrix.labels(w, q)] << '\n';
}

Catalog load_catalog(std::istream& in) {
  Catalog catalog;
  for (auto& row : read_rows(in, "question,candidate", 2))
    catalog.emplace_back(std::move(row[0]), std::move(row[1]));
  return catalog;
}

void save_catalog(const ResponseMatrix& matrix, std::ostream& out) {
  out << "question,candidate\n";
  for (int q = 0; q < matrix.question_count(); ++q)
    for (const auto& candidate : matrix.candidates[q])
      out << matrix.questions[q] << ',' << candidate << '\n';
}

GroundTruth load_ground_truth(std::istream& in, const ResponseMatrix& matrix) {
  GroundTruth truth;
  truth.answer.assign(matrix.question_count(), -1);
  truth.is_expert.assign(matrix.worker_count(), 0);
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "question,answer")
        throw ParseError("expected header 'question,answer', got '" + line + "'");
      saw_header = true;
      continue;
    }
    auto fields = split_row(line);
    if (fields.size() != 2) throw ParseError("expected 2 fields, got '" + line + "'");
    if (fields[1] == "expert") {
      auto w = matrix.worker_index.find(fields[0]);
      if (w == matrix.worker_index.end())
        throw UnknownWorkerError("expert mark for unknown worker '" + fields[0] + "'");
      truth.is_expert[w->second] = 1;
      continue;
    }
    auto q = matrix.question_index.find(fields[0]);
    if (q == matrix.question_index.end())
      throw UnknownQuestionError("unknown question '" + fields[0] + "'");
    const auto& names = matrix.candidates[q->second];
    auto c = std::find(names.begin(), names.end(), fields[1]);
    if (c == names.end())
      throw UnknownCandidateError("answer '" + fields[1] + "' not a candidate of '" +
                                  fields[0] + "'");
    if (truth.answer[q->second] != -1)
      throw DuplicateCellError("duplicate truth for question '" + fields[0] + "'");
    truth.answer[q->second] = static_cast<int>(c - names.begin());
  }
  return truth;
}

void save_ground_truth(const ResponseMatrix& matrix, const GroundTruth& truth,
                       std::ostream& out) {
  out << "question,answer\n";
  for (int q = 0; q < matrix.question_count(); ++q)
    if (truth.answer[q] >= 0)
      out << matrix.questions[q] << ',' << matrix.candidates[q][truth.answer[q]] << '\n';
  for (int w = 0; w < matrix.worker_count(); ++w)
    if (w < static_cast<int>(truth.is_expert.size()) && truth.is_expert[w])
      out << matrix.workers[w] << ",expert\n";
}

void write_result_json(const ResponseMatrix& matrix, const AggregationResult& result,
                       const std::string& algorithm, std::ostream& out) {
  nlohmann::ordered_json doc;
  auto& estimates = doc["estimates"] = nlohmann::ordered_json::object();
  for (int q = 0; q < matrix.question_count(); ++q)
    estimates[matrix.questions[q]] = matrix.candidates[q][result.estimates[q]];

  auto& diag = doc["diagnostics"] = nlohmann::ordered_json::object();
  diag["algorithm"] = algorithm;
  auto ties = nlohmann::ordered_json::array();
  for (int q = 0; q < matrix.question_count(); ++q)
    if (q < static_cast<int>(result.tie.size()) && result.tie[q])
      ties.push_back(matrix.questions[q]);
  diag["ties"] = std::move(ties);
  if (!result.top2_depth.empty()) {
    auto& depth = diag["top2_depth"] = nlohmann::ordered_json::object();
    for (int q = 0; q < matrix.question_count(); ++q)
      depth[matrix.questions[q]] = result.top2_depth[q];
  }
  for (const auto& [key, value] : result.info) diag[key] = value;
  out << doc.dump(2) << '\n';
}

void write_graph_csv(const ResponseMatrix& matrix, const AgreementGraph& graph,
                     std::ostream& out) {
  out << "u,v,tau,gamma\n";
  for (int u = 0; u < graph.worker_count; ++u)
    for (int v = u + 1; v < graph.worker_count; ++v)
      out << matrix.workers[u] << ',' << matrix.workers[v] << ',' << graph.tau(u, v) << ','
          << format_g12(graph.gamma(u, v)) << '\n';
}

void write_order_csv(const ResponseMatrix& matrix, const PeelingTrace& trace,
                     const std::vector<int>& core, std::ostream& out) {
  std::vector<char> in_core(matrix.worker_count(), 0);
  for (int w : core) in_core[w] = 1;
  out << "rank,worker,min_degree_at_removal,in_expert_core\n";
  const int n = trace.size();
  for (int j = n - 1; j >= 0; --j) {
    const int w = trace.removal_order[j];
    out << (n - j) << ',' << matrix.workers[w] << ',' << format_g12(trace.min_degree[j]) << ','
        << int(in_core[w]) << '\n';
  }
}

}  // namespace crowdcore
