#include "crowdcore/glad.hpp"

#include <cmath>

namespace crowdcore {
namespace {

// log(1 + exp(x)) without overflow
double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Workspace {
  const ResponseMatrix& matrix;
  const std::vector<int>& rows;
  int m;

  // per (worker-in-subset, question): log-likelihood of agreeing with the
  // latent answer and of each particular disagreement
  Eigen::MatrixXd log_hit, log_miss;

  Workspace(const ResponseMatrix& matrix_in, const std::vector<int>& rows_in)
      : matrix(matrix_in), rows(rows_in), m(matrix_in.question_count()),
        log_hit(rows_in.size(), m), log_miss(rows_in.size(), m) {}

  void refresh(const Eigen::VectorXd& alpha, const Eigen::VectorXd& log_beta) {
    for (size_t i = 0; i < rows.size(); ++i)
      for (int q = 0; q < m; ++q) {
        const int s = matrix.candidate_count(q);
        const double t = alpha[i] * std::exp(log_beta[q]);
        log_hit(i, q) = -softplus(-t);
        log_miss(i, q) = s > 1 ? -softplus(t) - std::log(s - 1.0) : 0.0;
      }
  }

  // log of the unnormalized posterior column: -log s_q + sum_w loglik
  Eigen::VectorXd question_scores(int q) const {
    const int s = matrix.candidate_count(q);
    Eigen::VectorXd scores = Eigen::VectorXd::Constant(s, -std::log(double(s)));
    if (s < 2) return scores;
    for (size_t i = 0; i < rows.size(); ++i) {
      scores.array() += log_miss(i, q);
      const int c = matrix.labels(rows[i], q);
      scores[c] += log_hit(i, q) - log_miss(i, q);
    }
    return scores;
  }
};

double log_sum_exp(const Eigen::VectorXd& v) {
  const double peak = v.maxCoeff();
  return peak + std::log((v.array() - peak).exp().sum());
}

double penalty(const Eigen::VectorXd& alpha, const Eigen::VectorXd& log_beta,
               const GladConfig& config) {
  if (!config.map_penalties) return 0.0;
  const auto beta = log_beta.array().exp();
  return 0.5 * (alpha.array() - 1.0).square().sum() + 0.5 * (beta - 1.0).square().sum();
}

}  // namespace

Eigen::MatrixXd glad_posteriors(const ResponseMatrix& matrix, const std::vector<int>& subset,
                                const Eigen::VectorXd& alpha, const Eigen::VectorXd& log_beta) {
  validate_subset(matrix.worker_count(), subset);
  Workspace ws(matrix, subset);
  ws.refresh(alpha, log_beta);
  Eigen::MatrixXd post = Eigen::MatrixXd::Zero(matrix.question_count(),
                                               matrix.max_candidate_count());
  for (int q = 0; q < ws.m; ++q) {
    const Eigen::VectorXd scores = ws.question_scores(q);
    post.row(q).head(scores.size()) = (scores.array() - log_sum_exp(scores)).exp();
  }
  return post;
}

double glad_objective(const ResponseMatrix& matrix, const std::vector<int>& subset,
                      const Eigen::VectorXd& alpha, const Eigen::VectorXd& log_beta,
                      const GladConfig& config) {
  validate_subset(matrix.worker_count(), subset);
  Workspace ws(matrix, subset);
  ws.refresh(alpha, log_beta);
  double total = 0.0;
  for (int q = 0; q < ws.m; ++q) total += log_sum_exp(ws.question_scores(q));
  return total - penalty(alpha, log_beta, config);
}

double glad_q_value(const ResponseMatrix& matrix, const std::vector<int>& subset,
                    const Eigen::MatrixXd& posteriors, const Eigen::VectorXd& alpha,
                    const Eigen::VectorXd& log_beta, const GladConfig& config) {
  Workspace ws(matrix, subset);
  ws.refresh(alpha, log_beta);
  double total = 0.0;
  for (int q = 0; q < ws.m; ++q) {
    const int s = matrix.candidate_count(q);
    total += -std::log(double(s));
    if (s < 2) continue;
    for (size_t i = 0; i < subset.size(); ++i) {
      const double hit = posteriors(q, matrix.labels(subset[i], q));
      total += hit * ws.log_hit(i, q) + (1.0 - hit) * ws.log_miss(i, q);
    }
  }
  return total - penalty(alpha, log_beta, config);
}

void glad_q_gradient(const ResponseMatrix& matrix, const std::vector<int>& subset,
                     const Eigen::MatrixXd& posteriors, const Eigen::VectorXd& alpha,
                     const Eigen::VectorXd& log_beta, const GladConfig& config,
                     Eigen::VectorXd& grad_alpha, Eigen::VectorXd& grad_log_beta) {
  const int m = matrix.question_count();
  grad_alpha = Eigen::VectorXd::Zero(alpha.size());
  grad_log_beta = Eigen::VectorXd::Zero(log_beta.size());
  for (int q = 0; q < m; ++q) {
    if (matrix.candidate_count(q) < 2) continue;
    const double beta = std::exp(log_beta[q]);
    for (size_t i = 0; i < subset.size(); ++i) {
      // d/dt of E_post[loglik], with t = alpha * beta
      const double slope =
          posteriors(q, matrix.labels(subset[i], q)) - sigmoid(alpha[i] * beta);
      grad_alpha[i] += beta * slope;
      grad_log_beta[q] += alpha[i] * beta * slope;
    }
  }
  if (config.map_penalties) {
    grad_alpha -= alpha - Eigen::VectorXd::Ones(alpha.size());
    const auto beta = log_beta.array().exp();
    grad_log_beta.array() -= (beta - 1.0) * beta;
  }
}

GladModel glad_fit(const ResponseMatrix& matrix, const GladConfig& config,
                   const std::optional<std::vector<int>>& subset) {
  std::vector<int> rows;
  if (subset) {
    validate_subset(matrix.worker_count(), *subset);
    rows = *subset;
  } else {
    rows.resize(matrix.worker_count());
    for (int w = 0; w < matrix.worker_count(); ++w) rows[w] = w;
  }

  GladModel model;
  model.subset = rows;
  model.alpha = Eigen::VectorXd::Ones(rows.size());
  model.log_beta = Eigen::VectorXd::Zero(matrix.question_count());

  double objective = glad_objective(matrix, rows, model.alpha, model.log_beta, config);
  model.objective_trace.push_back(objective);

  Eigen::VectorXd grad_alpha, grad_log_beta;
  for (int iter = 1; iter <= config.max_em_iters; ++iter) {
    const Eigen::MatrixXd post = glad_posteriors(matrix, rows, model.alpha, model.log_beta);

    // M-step: gradient ascent on the EM surrogate, each step backtracked
    // so the surrogate (and hence the MAP objective) cannot decrease.
    double q_value = glad_q_value(matrix, rows, post, model.alpha, model.log_beta, config);
    for (int step = 0; step < config.grad_steps; ++step) {
      glad_q_gradient(matrix, rows, post, model.alpha, model.log_beta, config, grad_alpha,
                      grad_log_beta);
      double lr = config.learning_rate;
      bool moved = false;
      while (lr > 1e-12) {
        const Eigen::VectorXd alpha_try = model.alpha + lr * grad_alpha;
        const Eigen::VectorXd beta_try = model.log_beta + lr * grad_log_beta;
        const double q_try = glad_q_value(matrix, rows, post, alpha_try, beta_try, config);
        if (q_try >= q_value) {
          model.alpha = alpha_try;
          model.log_beta = beta_try;
          q_value = q_try;
          moved = true;
          break;
        }
        lr *= 0.5;
      }
      if (!moved) break;
    }

    const double next = glad_objective(matrix, rows, model.alpha, model.log_beta, config);
    model.objective_trace.push_back(next);
    model.iterations = iter;
    const double gain = next - objective;
    objective = next;
    if (gain < config.tol) {
      model.converged = true;
      break;
    }
  }

  model.objective = objective;
  model.posteriors = glad_posteriors(matrix, rows, model.alpha, model.log_beta);
  return model;
}

AggregationResult glad_aggregate(const GladModel& model) {
  const int m = static_cast<int>(model.posteriors.rows());
  AggregationResult result;
  result.estimates.resize(m);
  result.tie.assign(m, 0);
  for (int q = 0; q < m; ++q) {
    int best = 0;
    int hits = 1;
    for (int c = 1; c < model.posteriors.cols(); ++c) {
      if (model.posteriors(q, c) > model.posteriors(q, best)) {
        best = c;
        hits = 1;
      } else if (model.posteriors(q, c) == model.posteriors(q, best)) {
        ++hits;
      }
    }
    result.tie[q] = hits > 1;
    result.estimates[q] = best;
  }
  result.info["em_iterations"] = model.iterations;
  result.info["objective"] = model.objective;
  return result;
}

}  // namespace crowdcore
