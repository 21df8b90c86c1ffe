#pragma once

#include <functional>

#include "crowdcore/aggregate.hpp"
#include "crowdcore/glad.hpp"
#include "crowdcore/synthetic.hpp"

namespace crowdcore {

// One-pass Welford accumulator; stddev is the sample standard deviation.
struct StatAccumulator {
  long long n = 0;
  double mean_ = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n);
    m2 += d * (x - mean_);
  }

  double mean() const { return mean_; }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stddev() const;
};

// Per-realization seed: pure function of (master seed, grid point,
// realization index), so grids can grow without disturbing earlier points.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t grid_point,
                          std::uint64_t realization);

// Deterministic parallel map: fn(i) for i in [0, count), any thread order.
void parallel_for(int count, const std::function<void(int)>& fn);

enum class Algorithm { kMV, kExMV, kTop2, kHyperMV, kExHyperMV, kGLAD, kExGLAD };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm algorithm);
bool uses_expert_core(Algorithm algorithm);

struct RunOptions {
  TiePolicy policy = TiePolicy::lexicographic();
  HyperParams hyper{5, 100, 0};
  GladConfig glad{};
  std::optional<double> p_override;
};

AggregationResult run_algorithm(const ResponseMatrix& matrix, Algorithm algorithm,
                                const RunOptions& options);

// ---- comparison (Table 3 / Table 4 format) ----

struct ComparisonRow {
  double expert_accuracy = 0.0;
  int experts = 0;
  std::vector<StatAccumulator> stats;  // one per algorithm
};

struct ComparisonTable {
  std::vector<Algorithm> algorithms;
  std::vector<ComparisonRow> rows;
};

// Accuracy stats per algorithm over the given instances. Per-instance seeds
// (for seeded ties and hyper-question sampling) derive from master_seed.
std::vector<StatAccumulator> run_comparison(const std::vector<Instance>& instances,
                                            const std::vector<Algorithm>& algorithms,
                                            const RunOptions& options,
                                            std::uint64_t master_seed);

// Synthetic Table-3-style grid: one row per (p_ex, n_ex) cell.
struct SyntheticComparisonConfig {
  int workers = 100;
  int questions = 50;
  int candidates = 5;
  std::vector<std::pair<double, int>> cells;  // (p_ex, n_ex)
  std::vector<Algorithm> algorithms;
  int realizations = 100;
  std::uint64_t master_seed = 0;
  RunOptions options;
};

ComparisonTable run_synthetic_comparison(const SyntheticComparisonConfig& config);

// ---- extraction sweep (Figure 2 format) ----

struct SweepConfig {
  enum class Param { kQuestions, kExpertAccuracy };

  SyntheticSpec base;  // swept field ignored; seed ignored (derived per point)
  Param param = Param::kQuestions;
  std::vector<double> grid;
  int realizations = 100;
  std::uint64_t master_seed = 0;
};

struct SweepRow {
  double value = 0.0;
  StatAccumulator core_precision, core_recall;
  StatAccumulator pair_precision, pair_recall;
  StatAccumulator core_size;
};

std::vector<SweepRow> run_extraction_sweep(const SweepConfig& config);

// ---- peeling-order diagnostics (Figure 3 format) ----

struct OrderRow {
  int rank = 0;  // 1 = removed last (most reliable)
  int worker = 0;
  double min_degree = 0.0;
  double accuracy = 0.0;
  bool in_core = false;
};

std::vector<OrderRow> run_order_report(const ResponseMatrix& matrix, const GroundTruth& truth,
                                       std::optional<double> p_override = std::nullopt);

// ---- theorem checks ----

enum class Theorem { kT2, kT3, kT4 };

struct TheoremCheck {
  Theorem which = Theorem::kT2;
  std::string description;
  double empirical = 0.0;
  double threshold = 0.0;
  bool lower_bound = true;  // pass when empirical >= threshold
  bool passed = false;
};

// Desk-scale Monte-Carlo checks of the three guarantees:
//   T2  core containment  Pr[expert_core subset of experts]  >= 0.95
//       (n=20, n_ex=4, p_ex=0.9, s=5, m=200, 200 seeds)
//   T3  all-expert MV     per-question accuracy              >= 0.99
//       (n=n_ex=200, p_ex=0.8, s=5, m=100, 50 seeds)
//   T4  diluted MV        per-question accuracy              <= 0.57
//       (s=2, n_ex=4 with p_ex=1, n_non=1100, m=10^4, 1 seed)
TheoremCheck run_theorem_check(Theorem which, std::uint64_t master_seed);

double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace crowdcore
