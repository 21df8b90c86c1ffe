#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crowdcore/harness.hpp"
#include "crowdcore/io.hpp"

namespace cc = crowdcore;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cc::ParseError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw cc::ParseError("cannot write '" + path + "'");
  return out;
}

cc::ResponseMatrix load_matrix(const std::string& input, const std::string& catalog_path) {
  std::optional<cc::Catalog> catalog;
  if (!catalog_path.empty()) {
    auto in = open_input(catalog_path);
    catalog = cc::load_catalog(in);
  }
  auto in = open_input(input);
  return cc::load_response_matrix(in, catalog);
}

std::string format3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string format_g12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct AlgorithmFlags {
  std::string tie = "lex";
  std::uint64_t seed = 0;
  int hyper_k = 5;
  int hyper_r = 100;
  double p_override = -1.0;
  int glad_iters = 100;
  double glad_lr = 0.01;
  double glad_tol = 1e-6;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tie", tie, "tie policy: lex or rand")
        ->check(CLI::IsMember({"lex", "rand"}));
    cmd->add_option("--seed", seed, "seed for ties and hyper-question sampling");
    cmd->add_option("--hyper-k", hyper_k, "questions per hyper-question");
    cmd->add_option("--hyper-r", hyper_r, "hyper-question sampling rounds");
    cmd->add_option("--p-override", p_override, "fixed agreement probability");
    cmd->add_option("--glad-iters", glad_iters, "max EM iterations");
    cmd->add_option("--glad-lr", glad_lr, "M-step learning rate");
    cmd->add_option("--glad-tol", glad_tol, "EM convergence tolerance");
  }

  cc::RunOptions options() const {
    cc::RunOptions out;
    out.policy = tie == "rand" ? cc::TiePolicy::seeded(seed) : cc::TiePolicy::lexicographic();
    out.hyper = {hyper_k, hyper_r, seed};
    out.glad.max_em_iters = glad_iters;
    out.glad.learning_rate = glad_lr;
    out.glad.tol = glad_tol;
    if (p_override >= 0.0) out.p_override = p_override;
    return out;
  }
};

std::vector<cc::Algorithm> parse_algorithm_list(const std::string& csv) {
  std::vector<cc::Algorithm> out;
  std::istringstream ss(csv);
  std::string name;
  while (std::getline(ss, name, ',')) out.push_back(cc::parse_algorithm(name));
  if (out.empty()) throw cc::DomainError("no algorithms given");
  return out;
}

int run_gen(int n, int m, int s, int experts, double p_ex, std::uint64_t seed,
            const std::string& prefix, bool with_catalog) {
  const cc::Instance instance = cc::generate({n, m, s, experts, p_ex, seed});
  auto responses = open_output(prefix + "_responses.csv");
  cc::save_response_matrix(instance.matrix, responses);
  auto truth = open_output(prefix + "_truth.csv");
  cc::save_ground_truth(instance.matrix, instance.truth, truth);
  if (with_catalog) {
    auto catalog = open_output(prefix + "_catalog.csv");
    cc::save_catalog(instance.matrix, catalog);
  }
  std::cout << "wrote " << prefix << "_responses.csv (" << n << " workers, " << m
            << " questions)\n";
  return 0;
}

int run_aggregate(const std::string& input, const std::string& catalog,
                  const std::string& algorithm, const AlgorithmFlags& flags,
                  const std::string& truth_path, const std::string& out_path,
                  const std::string& model_prefix) {
  const cc::ResponseMatrix matrix = load_matrix(input, catalog);
  const cc::Algorithm algo = cc::parse_algorithm(algorithm);
  const cc::RunOptions options = flags.options();

  cc::AggregationResult result;
  if (algo == cc::Algorithm::kGLAD || algo == cc::Algorithm::kExGLAD) {
    std::optional<std::vector<int>> subset;
    if (algo == cc::Algorithm::kExGLAD) subset = cc::expert_core(matrix, options.p_override);
    const cc::GladModel model = cc::glad_fit(matrix, options.glad, subset);
    result = cc::glad_aggregate(model);
    if (subset) result.info["core_size"] = static_cast<double>(subset->size());
    if (!model_prefix.empty()) {
      auto alpha = open_output(model_prefix + "_alpha.csv");
      alpha << "worker,alpha\n";
      for (size_t i = 0; i < model.subset.size(); ++i)
        alpha << matrix.workers[model.subset[i]] << ',' << format_g12(model.alpha[i]) << '\n';
      auto beta = open_output(model_prefix + "_beta.csv");
      beta << "question,beta\n";
      for (int q = 0; q < matrix.question_count(); ++q)
        beta << matrix.questions[q] << ',' << format_g12(std::exp(model.log_beta[q])) << '\n';
    }
  } else {
    result = cc::run_algorithm(matrix, algo, options);
  }

  if (out_path.empty()) {
    cc::write_result_json(matrix, result, algorithm, std::cout);
  } else {
    auto out = open_output(out_path);
    cc::write_result_json(matrix, result, algorithm, out);
  }
  if (!truth_path.empty()) {
    auto in = open_input(truth_path);
    const cc::GroundTruth truth = cc::load_ground_truth(in, matrix);
    std::cout << "accuracy: " << format3(cc::accuracy(result.estimates, truth)) << '\n';
  }
  return 0;
}

int run_extract(const std::string& input, const std::string& catalog, double p_override,
                const std::string& out_path, const std::string& graph_out,
                const std::string& order_out) {
  const cc::ResponseMatrix matrix = load_matrix(input, catalog);
  std::optional<double> p;
  if (p_override >= 0.0) p = p_override;
  const cc::AgreementGraph graph = cc::build_graph(matrix, p);
  const cc::PeelingTrace trace = cc::peel(graph);
  const std::vector<int> core = cc::max_core(trace);

  std::ostringstream core_csv;
  core_csv << "worker\n";
  for (int w : core) core_csv << matrix.workers[w] << '\n';
  if (out_path.empty()) {
    std::cout << core_csv.str();
  } else {
    open_output(out_path) << core_csv.str();
  }
  if (!graph_out.empty()) {
    auto out = open_output(graph_out);
    cc::write_graph_csv(matrix, graph, out);
  }
  if (!order_out.empty()) {
    auto out = open_output(order_out);
    cc::write_order_csv(matrix, trace, core, out);
  }
  std::cerr << "core size " << core.size() << " of " << matrix.worker_count() << ", p = "
            << format_g12(graph.p) << ", log theta = "
            << format_g12(cc::log_theta(graph, core)) << '\n';
  return 0;
}

int run_sweep(const std::string& param, double from, double to, double step, int n, int m,
              int s, int experts, double p_ex, int realizations, std::uint64_t seed,
              const std::string& out_path) {
  cc::SweepConfig config;
  config.base = {n, m, s, experts, p_ex, 0};
  config.param = param == "m" ? cc::SweepConfig::Param::kQuestions
                              : cc::SweepConfig::Param::kExpertAccuracy;
  for (double v = from; v <= to + 1e-9; v += step) config.grid.push_back(v);
  config.realizations = realizations;
  config.master_seed = seed;

  const auto rows = cc::run_extraction_sweep(config);
  std::ostringstream csv;
  csv << param << ",core_precision,core_precision_std,core_recall,core_recall_std,"
         "pair_precision,pair_precision_std,pair_recall,pair_recall_std,core_size\n";
  for (const auto& row : rows) {
    csv << format_g12(row.value) << ',' << format3(row.core_precision.mean()) << ','
        << format3(row.core_precision.stddev()) << ',' << format3(row.core_recall.mean())
        << ',' << format3(row.core_recall.stddev()) << ','
        << format3(row.pair_precision.mean()) << ',' << format3(row.pair_precision.stddev())
        << ',' << format3(row.pair_recall.mean()) << ',' << format3(row.pair_recall.stddev())
        << ',' << format3(row.core_size.mean()) << '\n';
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    open_output(out_path) << csv.str();
  }
  return 0;
}

int run_compare(const std::string& cells_arg, const std::string& algorithms_arg, int n, int m,
                int s, int realizations, const AlgorithmFlags& flags,
                const std::string& input, const std::string& catalog,
                const std::string& truth_path, const std::string& out_path) {
  const std::vector<cc::Algorithm> algorithms = parse_algorithm_list(algorithms_arg);
  std::ostringstream csv;

  if (!input.empty()) {
    // Real-data mode: one matrix, stochastic algorithms averaged over seeds.
    if (truth_path.empty()) throw cc::DomainError("--truth is required with --input");
    const cc::ResponseMatrix matrix = load_matrix(input, catalog);
    auto in = open_input(truth_path);
    const cc::GroundTruth truth = cc::load_ground_truth(in, matrix);
    std::vector<cc::Instance> instances(realizations, cc::Instance{matrix, truth});
    const auto stats =
        cc::run_comparison(instances, algorithms, flags.options(), flags.seed);
    csv << "input";
    for (auto a : algorithms) csv << ',' << cc::algorithm_name(a);
    csv << '\n' << input;
    for (const auto& st : stats)
      csv << ',' << format3(st.mean()) << "±" << format3(st.stddev());
    csv << '\n';
  } else {
    cc::SyntheticComparisonConfig config;
    config.workers = n;
    config.questions = m;
    config.candidates = s;
    config.realizations = realizations;
    config.master_seed = flags.seed;
    config.algorithms = algorithms;
    config.options = flags.options();
    std::istringstream ss(cells_arg);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto colon = cell.find(':');
      if (colon == std::string::npos)
        throw cc::DomainError("cell '" + cell + "' is not p_ex:n_ex");
      config.cells.emplace_back(std::stod(cell.substr(0, colon)),
                                std::stoi(cell.substr(colon + 1)));
    }
    if (config.cells.empty()) throw cc::DomainError("no cells given");

    const cc::ComparisonTable table = cc::run_synthetic_comparison(config);
    csv << "p_ex,n_ex";
    for (auto a : table.algorithms) csv << ',' << cc::algorithm_name(a);
    csv << '\n';
    for (const auto& row : table.rows) {
      csv << format_g12(row.expert_accuracy) << ',' << row.experts;
      for (const auto& st : row.stats)
        csv << ',' << format3(st.mean()) << "±" << format3(st.stddev());
      csv << '\n';
    }
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    open_output(out_path) << csv.str();
  }
  return 0;
}

int run_order_report_cmd(const std::string& input, const std::string& catalog,
                         const std::string& truth_path, double p_override,
                         const std::string& out_path) {
  const cc::ResponseMatrix matrix = load_matrix(input, catalog);
  auto in = open_input(truth_path);
  const cc::GroundTruth truth = cc::load_ground_truth(in, matrix);
  std::optional<double> p;
  if (p_override >= 0.0) p = p_override;
  const auto rows = cc::run_order_report(matrix, truth, p);

  std::ostringstream csv;
  csv << "rank,worker,min_degree_at_removal,accuracy,in_expert_core\n";
  for (const auto& row : rows)
    csv << row.rank << ',' << matrix.workers[row.worker] << ','
        << format_g12(row.min_degree) << ',' << format3(row.accuracy) << ','
        << int(row.in_core) << '\n';
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    open_output(out_path) << csv.str();
  }
  return 0;
}

int run_theorem_cmd(const std::string& which, std::uint64_t seed, const std::string& out_path) {
  std::vector<cc::Theorem> checks;
  if (which == "all") {
    checks = {cc::Theorem::kT2, cc::Theorem::kT3, cc::Theorem::kT4};
  } else {
    checks = {which == "T2"   ? cc::Theorem::kT2
              : which == "T3" ? cc::Theorem::kT3
                              : cc::Theorem::kT4};
  }
  bool all_passed = true;
  std::ostringstream json;
  json << "[\n";
  for (size_t i = 0; i < checks.size(); ++i) {
    const cc::TheoremCheck result = cc::run_theorem_check(checks[i], seed);
    all_passed = all_passed && result.passed;
    std::cout << (result.passed ? "PASS" : "FAIL") << "  " << result.description
              << "  empirical=" << format3(result.empirical)
              << (result.lower_bound ? " >= " : " <= ") << format3(result.threshold) << '\n';
    json << "  {\"check\": \"" << result.description << "\", \"empirical\": "
         << format_g12(result.empirical) << ", \"threshold\": "
         << format_g12(result.threshold) << ", \"passed\": "
         << (result.passed ? "true" : "false") << (i + 1 < checks.size() ? "},\n" : "}\n");
  }
  json << "]\n";
  if (!out_path.empty()) open_output(out_path) << json.str();
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expert-core extraction and answer aggregation for crowdsourced "
               "multiple-choice questions"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic planted-expert instance");
  int gen_n = 100, gen_m = 50, gen_s = 5, gen_experts = 4;
  double gen_p_ex = 0.8;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "instance";
  bool gen_catalog = false;
  gen->add_option("--n", gen_n, "workers");
  gen->add_option("--m", gen_m, "questions");
  gen->add_option("--s", gen_s, "candidates per question");
  gen->add_option("--n-ex", gen_experts, "experts");
  gen->add_option("--p-ex", gen_p_ex, "expert accuracy");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "output prefix")->required();
  gen->add_flag("--catalog", gen_catalog, "also write the candidate catalog");

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "estimate answers with one algorithm");
  std::string agg_input, agg_catalog, agg_algorithm, agg_truth, agg_out, agg_model;
  AlgorithmFlags agg_flags;
  agg->add_option("--input", agg_input, "responses CSV")->required();
  agg->add_option("--catalog", agg_catalog, "candidate catalog CSV");
  agg->add_option("--algorithm", agg_algorithm,
                  "mv|ex-mv|top2|hyper-mv|ex-hyper-mv|glad|ex-glad")->required();
  agg->add_option("--truth", agg_truth, "truth CSV (prints accuracy)");
  agg->add_option("--out", agg_out, "result JSON path (default stdout)");
  agg->add_option("--model-out", agg_model, "GLAD model dump prefix");
  agg_flags.attach(agg);

  // extract
  auto* ext = app.add_subcommand("extract", "extract the expert core");
  std::string ext_input, ext_catalog, ext_out, ext_graph, ext_order;
  double ext_p = -1.0;
  ext->add_option("--input", ext_input, "responses CSV")->required();
  ext->add_option("--catalog", ext_catalog, "candidate catalog CSV");
  ext->add_option("--p-override", ext_p, "fixed agreement probability");
  ext->add_option("--out", ext_out, "core member CSV (default stdout)");
  ext->add_option("--graph-out", ext_graph, "agreement graph CSV");
  ext->add_option("--order-out", ext_order, "peeling order CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "extraction precision/recall over a grid");
  std::string sweep_param = "m", sweep_out;
  double sweep_from = 5, sweep_to = 50, sweep_step = 5, sweep_p_ex = 0.8;
  int sweep_n = 20, sweep_m = 25, sweep_s = 5, sweep_experts = 4, sweep_reals = 100;
  std::uint64_t sweep_seed = 0;
  sweep->add_option("--param", sweep_param, "swept parameter: m or p-ex")
      ->check(CLI::IsMember({"m", "p-ex"}));
  sweep->add_option("--from", sweep_from, "grid start");
  sweep->add_option("--to", sweep_to, "grid end (inclusive)");
  sweep->add_option("--step", sweep_step, "grid step");
  sweep->add_option("--n", sweep_n, "workers");
  sweep->add_option("--m", sweep_m, "questions (fixed when sweeping p-ex)");
  sweep->add_option("--s", sweep_s, "candidates");
  sweep->add_option("--n-ex", sweep_experts, "experts");
  sweep->add_option("--p-ex", sweep_p_ex, "expert accuracy (fixed when sweeping m)");
  sweep->add_option("--realizations", sweep_reals, "realizations per grid point");
  sweep->add_option("--seed", sweep_seed, "master seed");
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

  // compare
  auto* cmp = app.add_subcommand("compare", "accuracy table over algorithms");
  std::string cmp_cells = "0.8:4", cmp_algorithms = "top2,ex-mv,ex-glad,ex-hyper-mv,mv,glad,hyper-mv";
  std::string cmp_input, cmp_catalog, cmp_truth, cmp_out;
  int cmp_n = 100, cmp_m = 50, cmp_s = 5, cmp_reals = 100;
  AlgorithmFlags cmp_flags;
  cmp->add_option("--cells", cmp_cells, "synthetic rows, e.g. 0.8:4,0.9:6");
  cmp->add_option("--algorithms", cmp_algorithms, "comma-separated algorithm list");
  cmp->add_option("--n", cmp_n, "workers");
  cmp->add_option("--m", cmp_m, "questions");
  cmp->add_option("--s", cmp_s, "candidates");
  cmp->add_option("--realizations", cmp_reals, "instances per cell / seeds per dataset");
  cmp->add_option("--input", cmp_input, "real responses CSV (replaces synthetic mode)");
  cmp->add_option("--catalog", cmp_catalog, "candidate catalog CSV");
  cmp->add_option("--truth", cmp_truth, "truth CSV (required with --input)");
  cmp->add_option("--out", cmp_out, "CSV path (default stdout)");
  cmp_flags.attach(cmp);

  // order-report
  auto* order = app.add_subcommand("order-report", "peeling order vs worker accuracy");
  std::string ord_input, ord_catalog, ord_truth, ord_out;
  double ord_p = -1.0;
  order->add_option("--input", ord_input, "responses CSV")->required();
  order->add_option("--catalog", ord_catalog, "candidate catalog CSV");
  order->add_option("--truth", ord_truth, "truth CSV")->required();
  order->add_option("--p-override", ord_p, "fixed agreement probability");
  order->add_option("--out", ord_out, "CSV path (default stdout)");

  // theorem-check
  auto* thm = app.add_subcommand("theorem-check", "desk-scale statistical guarantees");
  std::string thm_which = "all", thm_out;
  std::uint64_t thm_seed = 20240501;
  thm->add_option("--which", thm_which, "T2, T3, T4 or all")
      ->check(CLI::IsMember({"T2", "T3", "T4", "all"}));
  thm->add_option("--seed", thm_seed, "master seed");
  thm->add_option("--out", thm_out, "JSON report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen)
      return run_gen(gen_n, gen_m, gen_s, gen_experts, gen_p_ex, gen_seed, gen_out,
                     gen_catalog);
    if (*agg)
      return run_aggregate(agg_input, agg_catalog, agg_algorithm, agg_flags, agg_truth,
                           agg_out, agg_model);
    if (*ext) return run_extract(ext_input, ext_catalog, ext_p, ext_out, ext_graph, ext_order);
    if (*sweep)
      return run_sweep(sweep_param, sweep_from, sweep_to, sweep_step, sweep_n, sweep_m,
                       sweep_s, sweep_experts, sweep_p_ex, sweep_reals, sweep_seed, sweep_out);
    if (*cmp)
      return run_compare(cmp_cells, cmp_algorithms, cmp_n, cmp_m, cmp_s, cmp_reals, cmp_flags,
                         cmp_input, cmp_catalog, cmp_truth, cmp_out);
    if (*order) return run_order_report_cmd(ord_input, ord_catalog, ord_truth, ord_p, ord_out);
    if (*thm) return run_theorem_cmd(thm_which, thm_seed, thm_out);
  } catch (const cc::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 0;
}
