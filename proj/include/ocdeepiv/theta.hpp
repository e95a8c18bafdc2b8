#pragma once

#include "ocdeepiv/sim.hpp"
#include "ocdeepiv/train.hpp"

namespace ocdeepiv {

// Eval-mode forward of the trained treatment net, read directly as
// theta_hat. Mirrors the single-network estimation mode; the two-stage
// mode below is the estimator consistent with the IV framework.
Matrix predict_theta_code_faithful(DualPathNet& net, const Matrix& Z, const Matrix& F);

struct CodeFaithfulFit {
  DualPathNet net;
  std::vector<LossRecord> losses;
  Matrix theta_hat;
};

// Train a treatment net on (Z, build_features(X,T)) with target T and read
// its Eval output as theta_hat.
CodeFaithfulFit train_code_faithful(const Dataset& ds, const TrainConfig& cfg,
                                    std::vector<LossRecord>* progress = nullptr);

struct TwoStageFit {
  DualPathNet treatment_net;
  DualPathNet outcome_net;
  std::vector<LossRecord> stage1_losses;
  std::vector<LossRecord> stage2_losses;
  Matrix theta_hat;  // g(1,x) - g(0,x)
};

// Stage 1 fits E[T|Z] via the treatment net; stage 2 fits the outcome on
// (T_hat, X); the effect is the eval-mode treatment contrast. progress, when
// given, receives stage-1 records then stage-2 records with offset epochs.
TwoStageFit estimate_theta_two_stage(const Dataset& ds, const TrainConfig& cfg,
                                     std::vector<LossRecord>* progress = nullptr);

}  // namespace ocdeepiv
