#pragma once

#include "crowdcore/types.hpp"

namespace crowdcore {

struct GladConfig {
  int max_em_iters = 100;
  int grad_steps = 25;        // gradient ascent steps per M-step
  double learning_rate = 0.01;
  double tol = 1e-6;          // stop when the MAP objective gain falls below
  bool map_penalties = true;  // N(1, 1) priors on alpha and beta
};

// P(l = c | z, alpha, beta) = sigma(alpha beta) when c = z, else the
// complement split evenly over the s - 1 wrong candidates. beta is
// optimized in log space to stay positive.
struct GladModel {
  Eigen::VectorXd alpha;             // per worker in the fitted subset
  Eigen::VectorXd log_beta;          // per question
  Eigen::MatrixXd posteriors;        // question x candidate, zero padded
  std::vector<int> subset;           // worker rows the model was fit on
  int iterations = 0;
  double objective = 0.0;
  std::vector<double> objective_trace;  // value before EM and after each iteration
  bool converged = false;
};

GladModel glad_fit(const ResponseMatrix& matrix, const GladConfig& config = {},
                   const std::optional<std::vector<int>>& subset = std::nullopt);

AggregationResult glad_aggregate(const GladModel& model);

// Building blocks, exposed so the EM pieces can be checked independently.

// E-step: posterior over candidates per question at fixed parameters.
Eigen::MatrixXd glad_posteriors(const ResponseMatrix& matrix, const std::vector<int>& subset,
                                const Eigen::VectorXd& alpha, const Eigen::VectorXd& log_beta);

// MAP objective: marginal log likelihood plus the Gaussian penalties.
double glad_objective(const ResponseMatrix& matrix, const std::vector<int>& subset,
                      const Eigen::VectorXd& alpha, const Eigen::VectorXd& log_beta,
                      const GladConfig& config);

// EM surrogate Q(alpha, log_beta | posteriors) and its exact gradient.
double glad_q_value(const ResponseMatrix& matrix, const std::vector<int>& subset,
                    const Eigen::MatrixXd& posteriors, const Eigen::VectorXd& alpha,
                    const Eigen::VectorXd& log_beta, const GladConfig& config);
void glad_q_gradient(const ResponseMatrix& matrix, const std::vector<int>& subset,
                     const Eigen::MatrixXd& posteriors, const Eigen::VectorXd& alpha,
                     const Eigen::VectorXd& log_beta, const GladConfig& config,
                     Eigen::VectorXd& grad_alpha, Eigen::VectorXd& grad_log_beta);

}  // namespace crowdcore
