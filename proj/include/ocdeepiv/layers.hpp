#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ocdeepiv/matrix.hpp"
#include "ocdeepiv/rng.hpp"

namespace ocdeepiv {

enum class Mode { Train, Eval };

// Handle to one trainable parameter and its gradient buffer.
struct ParamRef {
  Matrix* value;
  Matrix* grad;
  std::string name;
};

// y = x * W^T + b, broadcast over rows. W is out x in, b is 1 x out.
class LinearLayer {
 public:
  LinearLayer() = default;
  // PyTorch-style init: W, b ~ U(-k, k) with k = 1/sqrt(in).
  LinearLayer(std::size_t in, std::size_t out, RngStream& rng);

  Matrix forward(const Matrix& x);
  // Returns grad_x; accumulates gW, gb.
  Matrix backward(const Matrix& upstream);

  void zero_grad();
  void collect(std::vector<ParamRef>& out, const std::string& prefix);

  Matrix W, b;
  Matrix gW, gb;

 private:
  Matrix x_;
};

// Column-wise batch norm. Train mode normalizes with the biased batch
// variance and updates running stats with the unbiased variance
// (running <- (1-momentum)*running + momentum*batch_stat). Eval mode
// normalizes with running stats.
class BatchNormLayer {
 public:
  BatchNormLayer() = default;
  explicit BatchNormLayer(std::size_t width);

  Matrix forward(const Matrix& x, Mode mode);
  Matrix backward(const Matrix& upstream);

  void zero_grad();
  void collect(std::vector<ParamRef>& out, const std::string& prefix);

  Matrix gamma, beta, running_mean, running_var;  // 1 x width
  Matrix ggamma, gbeta;
  double eps = 1e-5;
  double momentum = 0.1;

 private:
  Matrix xhat_;
  std::vector<double> invstd_;
  bool has_cache_ = false;
};

// Per-row normalization with biased variance; mode-independent.
class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  explicit LayerNormLayer(std::size_t width);

  Matrix forward(const Matrix& x);
  Matrix backward(const Matrix& upstream);

  void zero_grad();
  void collect(std::vector<ParamRef>& out, const std::string& prefix);

  Matrix gamma, beta;  // 1 x width
  Matrix ggamma, gbeta;
  double eps = 1e-5;

 private:
  Matrix xhat_;
  std::vector<double> invstd_;
};

class ReluLayer {
 public:
  Matrix forward(const Matrix& x);
  // Masks upstream where x <= 0 (subgradient at 0 is 0).
  Matrix backward(const Matrix& upstream);

  const Matrix& last_input() const { return x_; }

 private:
  Matrix x_;
};

// Inverted dropout: Train scales survivors by 1/(1-p), Eval is identity.
class DropoutLayer {
 public:
  DropoutLayer() = default;
  explicit DropoutLayer(double p);

  // rng may be null in Eval mode. With freeze set, the previous mask is
  // reused when its shape matches (gradient checks need this).
  Matrix forward(const Matrix& x, Mode mode, RngStream* rng);
  Matrix backward(const Matrix& upstream);

  double p = 0.0;
  bool freeze = false;
  Matrix mask;

 private:
  Mode last_mode_ = Mode::Eval;
};

// L = (1/N) sum (p_i - t_i)^2; grad = (2/N)(p - t).
std::pair<double, Matrix> mse_loss(const Matrix& pred, const Matrix& target);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // coupled L2-style, applied to all params
};

class Adam {
 public:
  Adam(std::vector<ParamRef> params, AdamConfig cfg);

  void step();
  void set_lr(double lr) { cfg_.lr = lr; }
  std::int64_t t() const { return t_; }

 private:
  std::vector<ParamRef> params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::int64_t t_ = 0;
};

}  // namespace ocdeepiv
