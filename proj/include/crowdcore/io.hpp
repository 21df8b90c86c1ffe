#pragma once

#include <iosfwd>

#include "crowdcore/types.hpp"

namespace crowdcore {

struct AgreementGraph;
struct PeelingTrace;

// Long-format CSV with header "worker,question,answer". The matrix must be
// complete; duplicate cells and (with a catalog) unknown answers are errors.
ResponseMatrix load_response_matrix(std::istream& in,
                                    const std::optional<Catalog>& catalog = std::nullopt);
void save_response_matrix(const ResponseMatrix& matrix, std::ostream& out);

// Catalog CSV with header "question,candidate", one row per candidate in
// tie-break order.
Catalog load_catalog(std::istream& in);
void save_catalog(const ResponseMatrix& matrix, std::ostream& out);

// Truth CSV with header "question,answer". Rows whose answer column is the
// literal "expert" mark the worker named in the first column instead.
GroundTruth load_ground_truth(std::istream& in, const ResponseMatrix& matrix);
void save_ground_truth(const ResponseMatrix& matrix, const GroundTruth& truth,
                       std::ostream& out);

// {"estimates": {question: answer}, "diagnostics": {...}}
void write_result_json(const ResponseMatrix& matrix, const AggregationResult& result,
                       const std::string& algorithm, std::ostream& out);

// "u,v,tau,gamma" rows for all u < v, gamma at 12 significant digits.
void write_graph_csv(const ResponseMatrix& matrix, const AgreementGraph& graph,
                     std::ostream& out);

// "rank,worker,min_degree_at_removal,in_expert_core", rank 1 = removed first.
void write_order_csv(const ResponseMatrix& matrix, const PeelingTrace& trace,
                     const std::vector<int>& core, std::ostream& out);

}  // namespace crowdcore
