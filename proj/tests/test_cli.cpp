#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
  const std::string command = std::string(CROWDCTL_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buffer[4096];
  while (size_t got = fread(buffer, 1, sizeof buffer, pipe)) result.output.append(buffer, got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string workdir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/crowdctl_test_XXXXXX";
    REQUIRE(mkdtemp(tmpl) != nullptr);
    return std::string(tmpl);
  }();
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) lines += c == '\n';
  return lines;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("gen writes a loadable instance") {
  const std::string prefix = workdir() + "/inst";
  const auto result = run_cli("gen --n 6 --m 12 --s 4 --n-ex 2 --p-ex 0.9 --seed 3 --out " +
                              prefix + " --catalog");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("6 workers") != std::string::npos);

  const std::string responses = slurp(prefix + "_responses.csv");
  CHECK(first_line(responses) == "worker,question,answer");
  CHECK(count_lines(responses) == 1 + 6 * 12);
  CHECK(first_line(slurp(prefix + "_catalog.csv")) == "question,candidate");
  CHECK(first_line(slurp(prefix + "_truth.csv")) == "question,answer");
}

TEST_CASE("aggregate emits a result document and accuracy") {
  const std::string prefix = workdir() + "/inst";
  const std::string json_path = workdir() + "/mv.json";
  const auto result = run_cli("aggregate --input " + prefix + "_responses.csv --catalog " +
                              prefix + "_catalog.csv --algorithm mv --truth " + prefix +
                              "_truth.csv --out " + json_path);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("accuracy: ") != std::string::npos);

  const auto doc = nlohmann::json::parse(slurp(json_path));
  CHECK(doc.at("estimates").size() == 12);
  CHECK(doc.at("diagnostics").at("algorithm") == "mv");
}

TEST_CASE("aggregate can dump the fitted confidence model") {
  const std::string prefix = workdir() + "/inst";
  const std::string model = workdir() + "/model";
  const auto result = run_cli("aggregate --input " + prefix + "_responses.csv --algorithm glad" +
                              " --glad-iters 5 --out " + workdir() + "/glad.json" +
                              " --model-out " + model);
  CHECK(result.exit_code == 0);

  const std::string alpha = slurp(model + "_alpha.csv");
  CHECK(first_line(alpha) == "worker,alpha");
  CHECK(count_lines(alpha) == 1 + 6);
  const std::string beta = slurp(model + "_beta.csv");
  CHECK(first_line(beta) == "question,beta");
  CHECK(count_lines(beta) == 1 + 12);
}

TEST_CASE("extract reports the core and its artifacts") {
  const std::string prefix = workdir() + "/inst";
  const auto result =
      run_cli("extract --input " + prefix + "_responses.csv --out " + workdir() +
              "/core.csv --graph-out " + workdir() + "/graph.csv --order-out " + workdir() +
              "/order.csv");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("core size ") != std::string::npos);
  CHECK(result.output.find("log theta = ") != std::string::npos);

  CHECK(first_line(slurp(workdir() + "/core.csv")) == "worker");
  const std::string graph = slurp(workdir() + "/graph.csv");
  CHECK(first_line(graph) == "u,v,tau,gamma");
  CHECK(count_lines(graph) == 1 + 6 * 5 / 2);
  const std::string order = slurp(workdir() + "/order.csv");
  CHECK(first_line(order) == "rank,worker,min_degree_at_removal,in_expert_core");
  CHECK(count_lines(order) == 1 + 6);
}

TEST_CASE("order-report joins ranks with accuracy") {
  const std::string prefix = workdir() + "/inst";
  const auto result = run_cli("order-report --input " + prefix + "_responses.csv --truth " +
                              prefix + "_truth.csv");
  CHECK(result.exit_code == 0);
  CHECK(first_line(result.output) == "rank,worker,min_degree_at_removal,accuracy,in_expert_core");
  CHECK(count_lines(result.output) == 1 + 6);
}

TEST_CASE("compare prints a synthetic accuracy table") {
  const auto result = run_cli(
      "compare --cells 0.9:3 --algorithms mv,top2,ex-mv --n 9 --m 12 --s 4 --realizations 3");
  CHECK(result.exit_code == 0);
  CHECK(first_line(result.output) == "p_ex,n_ex,mv,top2,ex-mv");
  CHECK(count_lines(result.output) == 2);
  CHECK(result.output.find("0.9,3,") != std::string::npos);
}

TEST_CASE("compare on a saved instance") {
  const std::string prefix = workdir() + "/inst";
  const auto result = run_cli("compare --input " + prefix + "_responses.csv --truth " + prefix +
                              "_truth.csv --algorithms mv,top2 --realizations 2");
  CHECK(result.exit_code == 0);
  CHECK(first_line(result.output) == "input,mv,top2");

  const auto missing = run_cli("compare --input " + prefix + "_responses.csv" +
                               " --algorithms mv --realizations 1");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("sweep prints one row per grid point") {
  const auto result = run_cli(
      "sweep --param m --from 10 --to 20 --step 10 --n 8 --s 4 --n-ex 2 --p-ex 0.9 "
      "--realizations 3");
  CHECK(result.exit_code == 0);
  CHECK(first_line(result.output) ==
        "m,core_precision,core_precision_std,core_recall,core_recall_std,"
        "pair_precision,pair_precision_std,pair_recall,pair_recall_std,core_size");
  CHECK(count_lines(result.output) == 3);
}

TEST_CASE("bad inputs exit with the error status") {
  CHECK(run_cli("aggregate --input /nonexistent.csv --algorithm mv").exit_code == 2);
  CHECK(run_cli("gen --n 0 --m 5 --s 4 --out " + workdir() + "/bad").exit_code == 2);
  CHECK(run_cli("aggregate --input " + workdir() + "/inst_responses.csv --algorithm nope")
            .exit_code == 2);
}
