#pragma once

#include <sstream>
#include <string>

#include "crowdcore/io.hpp"
#include "crowdcore/types.hpp"

namespace fixtures {

// 6 workers x 8 questions, candidates A..E. w1..w3 track the reference row
// closely, w4..w6 answer mostly noise.
inline std::string table1_grid() {
  return "DCDEBCAE"   // w1
         "DCBEBCAC"   // w2
         "DCDDBCAE"   // w3
         "CBAAECDB"   // w4
         "ABEABEEC"   // w5
         "CABEBBAC";  // w6
}

inline std::string table1_truth_row() { return "DCDEBCAE"; }

inline std::string table1_responses_csv() {
  std::ostringstream out;
  out << "worker,question,answer\n";
  const std::string grid = table1_grid();
  for (int w = 0; w < 6; ++w)
    for (int q = 0; q < 8; ++q)
      out << 'w' << w + 1 << ",q" << q + 1 << ',' << grid[w * 8 + q] << '\n';
  return out.str();
}

inline std::string table1_catalog_csv() {
  std::ostringstream out;
  out << "question,candidate\n";
  for (int q = 0; q < 8; ++q)
    for (char c = 'A'; c <= 'E'; ++c) out << 'q' << q + 1 << ',' << c << '\n';
  return out.str();
}

inline std::string table1_truth_csv(bool with_experts = false) {
  std::ostringstream out;
  out << "question,answer\n";
  const std::string truth = table1_truth_row();
  for (int q = 0; q < 8; ++q) out << 'q' << q + 1 << ',' << truth[q] << '\n';
  if (with_experts)
    for (int w = 1; w <= 3; ++w) out << 'w' << w << ",expert\n";
  return out.str();
}

inline crowdcore::ResponseMatrix table1_matrix() {
  std::istringstream catalog_in(table1_catalog_csv());
  const crowdcore::Catalog catalog = crowdcore::load_catalog(catalog_in);
  std::istringstream in(table1_responses_csv());
  return crowdcore::load_response_matrix(in, catalog);
}

inline crowdcore::GroundTruth table1_truth(const crowdcore::ResponseMatrix& matrix,
                                           bool with_experts = false) {
  std::istringstream in(table1_truth_csv(with_experts));
  return crowdcore::load_ground_truth(in, matrix);
}

}  // namespace fixtures
