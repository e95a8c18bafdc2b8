#include "ocdeepiv/train.hpp"

#include <cmath>

namespace ocdeepiv {

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
  if (switch_epoch < 0 || switch_epoch > epochs)
    throw ConfigError("train: switch_epoch must be in [0, epochs]");
  if (lambda_reg < 0.0) throw ConfigError("train: lambda_reg must be >= 0");
  if (dropout_p < 0.0 || dropout_p >= 1.0)
    throw ConfigError("train: dropout_p must be in [0,1)");
  if (lr <= 0.0) throw ConfigError("train: lr must be > 0");
  if (lr_decay <= 0.0) throw ConfigError("train: lr_decay must be > 0");
}

double ortho_penalty_single(const Matrix& W, double lambda_reg) {
  Matrix wtw = matmul_at_b(W, W);  // in x in
  for (std::size_t i = 0; i < wtw.rows; ++i) wtw(i, i) -= 1.0;
  return lambda_reg * frobenius_sq(wtw);
}

double ortho_penalty(DualPathNet& net, double lambda_reg) {
  double s = 0.0;
  for (Matrix* W : net.weight_matrices()) s += ortho_penalty_single(*W, lambda_reg);
  return s;
}

Matrix ortho_grad_single(const Matrix& W, double lambda_reg) {
  Matrix wtw = matmul_at_b(W, W);
  for (std::size_t i = 0; i < wtw.rows; ++i) wtw(i, i) -= 1.0;
  Matrix g = matmul(W, wtw);
  const double c = 4.0 * lambda_reg;
  for (auto& v : g.data) v *= c;
  return g;
}

void add_ortho_grads(DualPathNet& net, double lambda_reg) {
  auto weights = net.weight_matrices();
  auto grads = net.weight_grads();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    Matrix g = ortho_grad_single(*weights[i], lambda_reg);
    for (std::size_t k = 0; k < g.size(); ++k) grads[i]->data[k] += g.data[k];
  }
}

std::vector<LossRecord> staged_train(DualPathNet& net, const Matrix& a, const Matrix& b,
                                     const Matrix& target, const TrainConfig& cfg,
                                     RngStream& rng, std::vector<LossRecord>* progress) {
  cfg.validate();
  if (a.rows != target.rows || b.rows != target.rows)
    throw ShapeError("staged_train: row mismatch " + a.shape_str() + " / " +
                     b.shape_str() + " vs target " + target.shape_str());

  AdamConfig acfg;
  acfg.lr = cfg.lr;
  acfg.weight_decay = cfg.weight_decay;
  Adam opt(net.params(), acfg);

  std::vector<LossRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const bool with_ortho = epoch > cfg.switch_epoch;

    Matrix pred = net.forward(a, b, Mode::Train, &rng);
    auto [mse, grad] = mse_loss(pred, target);
    const double ortho = with_ortho ? ortho_penalty(net, cfg.lambda_reg) : 0.0;
    const double total = mse + ortho;
    if (!std::isfinite(total))
      throw TrainError("staged_train: non-finite loss at epoch " + std::to_string(epoch));
    records.push_back({epoch, total, mse, ortho});
    if (progress) progress->push_back(records.back());

    net.zero_grad();
    net.backward(grad);
    if (with_ortho) add_ortho_grads(net, cfg.lambda_reg);
    opt.set_lr(cfg.lr * std::pow(cfg.lr_decay, static_cast<double>(epoch - 1)));
    opt.step();
  }
  return records;
}

}  // namespace ocdeepiv
