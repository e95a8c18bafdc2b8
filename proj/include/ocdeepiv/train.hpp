#pragma once

#include <cstdint>
#include <vector>

#include "ocdeepiv/model.hpp"

namespace ocdeepiv {

struct TrainConfig {
  int epochs = 100;
  int switch_epoch = 50;
  double lr = 1e-3;
  double weight_decay = 5e-4;
  double lambda_reg = 0.02;
  double dropout_p = 0.3;
  std::uint64_t seed = 0;
  double lr_decay = 1.0;  // multiplicative per-epoch factor, 1.0 = none

  void validate() const;
};

struct LossRecord {
  int epoch;  // 1-based
  double total;
  double mse;
  double ortho;  // 0 for epoch <= switch_epoch
};

// lambda * sum over 2-D weights W of ||W^T W - I||_F^2, I sized in x in.
double ortho_penalty(DualPathNet& net, double lambda_reg);
double ortho_penalty_single(const Matrix& W, double lambda_reg);

// dL/dW = 4 lambda W (W^T W - I).
Matrix ortho_grad_single(const Matrix& W, double lambda_reg);
void add_ortho_grads(DualPathNet& net, double lambda_reg);

// Full-batch staged training: epochs 1..switch_epoch minimize MSE alone,
// the rest minimize MSE + ortho. One Adam step per epoch; losses are
// recorded before the step, in Train mode. rng feeds dropout only.
// progress, when given, receives each record as soon as it is computed, so
// partial history survives a divergence throw.
std::vector<LossRecord> staged_train(DualPathNet& net, const Matrix& a, const Matrix& b,
                                     const Matrix& target, const TrainConfig& cfg,
                                     RngStream& rng,
                                     std::vector<LossRecord>* progress = nullptr);

}  // namespace ocdeepiv
