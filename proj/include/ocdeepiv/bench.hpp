#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ocdeepiv/sim.hpp"
#include "ocdeepiv/theta.hpp"

namespace ocdeepiv {

enum class EstimatorKind {
  NaiveOLS,
  TwoSLS,
  LinearDML,
  DeepIVNoOrtho,
  OCDeepIV_CodeFaithful,
  OCDeepIV_TwoStage,
};

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator(const std::string& name);
bool estimator_requires_y(EstimatorKind kind);

struct EstimateResult {
  EstimatorKind kind;
  Matrix theta_hat;
  Matrix theta_hat_smoothed;
  double mse_raw = 0.0;
  double mse_smoothed = 0.0;
  double wall_time_s = 0.0;
  std::vector<LossRecord> loss_history;  // empty for closed-form estimators
  int smoothing_window = 15;
};

// Solve the least squares problem design*b ~= y via normal equations.
std::vector<double> least_squares(const Matrix& design, const Matrix& y);

// OLS of Y on [1, T, x1, x2, x1*T, x2*T, x1*x2*T]; theta from the T-interacted
// coefficients. Biased under confounding.
EstimateResult fit_naive_ols(const Dataset& ds, int smoothing_window = 15);

// Stage 1 projects T on [1, Z, X]; stage 2 replaces T by the projection in
// the same basis as naive OLS.
EstimateResult fit_2sls(const Dataset& ds, int smoothing_window = 15);

// 2-fold cross-fit partialling-out on [1, X, X^2]; theta from the residual
// regression with [1, x1, x2, x1*x2] interactions.
EstimateResult fit_linear_dml(const Dataset& ds, int smoothing_window = 15,
                              std::uint64_t fold_seed = 0);

// OC-DeepIV with lambda_reg forced to 0; mode picks which pipeline runs.
EstimateResult fit_ablation_no_ortho(const Dataset& ds, TrainConfig cfg,
                                     bool two_stage, int smoothing_window = 15);

EstimateResult fit_estimator(EstimatorKind kind, const Dataset& ds,
                             const TrainConfig& cfg, int smoothing_window = 15);

struct CompareRow {
  EstimatorKind kind;
  bool ok = false;
  std::string error;
  double mse_raw_mean = 0.0, mse_raw_std = 0.0;
  double mse_smoothed_mean = 0.0, mse_smoothed_std = 0.0;
  double wall_time_s = 0.0;
};

// Runs every estimator on the dataset produced by make_dataset(seed) for
// each replication seed; estimators that cannot run (missing Y) are recorded
// as failed rows and the run continues. max_threads > 1 fans replications
// out across threads; rows come back in declared estimator order.
std::vector<CompareRow> compare(const std::function<Dataset(std::uint64_t)>& make_dataset,
                                const std::vector<EstimatorKind>& kinds,
                                const TrainConfig& cfg,
                                const std::vector<std::uint64_t>& replication_seeds,
                                int smoothing_window = 15, unsigned max_threads = 1);

double mse_between(const Matrix& a, const Matrix& b);

}  // namespace ocdeepiv
