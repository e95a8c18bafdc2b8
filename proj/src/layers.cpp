#include "ocdeepiv/layers.hpp"

#include <cmath>

namespace ocdeepiv {

// ---------- LinearLayer ----------

LinearLayer::LinearLayer(std::size_t in, std::size_t out, RngStream& rng)
    : W(out, in), b(1, out), gW(out, in), gb(1, out) {
  const double k = 1.0 / std::sqrt(static_cast<double>(in));
  for (auto& v : W.data) v = (2.0 * rng.next_uniform() - 1.0) * k;
  for (auto& v : b.data) v = (2.0 * rng.next_uniform() - 1.0) * k;
}

Matrix LinearLayer::forward(const Matrix& x) {
  if (x.cols != W.cols)
    throw ShapeError("linear_forward: input " + x.shape_str() + " vs W " + W.shape_str());
  x_ = x;
  Matrix y = matmul_a_bt(x, W);
  for (std::size_t i = 0; i < y.rows; ++i)
    for (std::size_t j = 0; j < y.cols; ++j) y(i, j) += b(0, j);
  return y;
}

Matrix LinearLayer::backward(const Matrix& upstream) {
  if (upstream.rows != x_.rows || upstream.cols != W.rows)
    throw ShapeError("linear_backward: upstream " + upstream.shape_str() + " vs W " +
                     W.shape_str());
  Matrix gw = matmul_at_b(upstream, x_);  // out x in
  for (std::size_t i = 0; i < gW.size(); ++i) gW.data[i] += gw.data[i];
  for (std::size_t i = 0; i < upstream.rows; ++i)
    for (std::size_t j = 0; j < upstream.cols; ++j) gb(0, j) += upstream(i, j);
  return matmul(upstream, W);
}

void LinearLayer::zero_grad() {
  gW.data.assign(gW.size(), 0.0);
  gb.data.assign(gb.size(), 0.0);
}

void LinearLayer::collect(std::vector<ParamRef>& out, const std::string& prefix) {
  out.push_back({&W, &gW, prefix + ".W"});
  out.push_back({&b, &gb, prefix + ".b"});
}

// ---------- BatchNormLayer ----------

BatchNormLayer::BatchNormLayer(std::size_t width)
    : gamma(1, width, 1.0),
      beta(1, width),
      running_mean(1, width),
      running_var(1, width, 1.0),
      ggamma(1, width),
      gbeta(1, width) {}

Matrix BatchNormLayer::forward(const Matrix& x, Mode mode) {
  if (x.cols != gamma.cols)
    throw ShapeError("batchnorm_forward: input " + x.shape_str() + " vs width " +
                     std::to_string(gamma.cols));
  const std::size_t n = x.rows, w = x.cols;
  Matrix y(n, w);
  if (mode == Mode::Eval) {
    has_cache_ = false;
    for (std::size_t j = 0; j < w; ++j) {
      const double inv = 1.0 / std::sqrt(running_var(0, j) + eps);
      for (std::size_t i = 0; i < n; ++i)
        y(i, j) = gamma(0, j) * (x(i, j) - running_mean(0, j)) * inv + beta(0, j);
    }
    return y;
  }
  if (n < 2) throw TrainError("batchnorm_forward: Train mode needs batch >= 2");
  xhat_ = Matrix(n, w);
  invstd_.assign(w, 0.0);
  for (std::size_t j = 0; j < w; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x(i, j) - mean;
      var += d * d;
    }
    const double biased = var / static_cast<double>(n);
    const double unbiased = var / static_cast<double>(n - 1);
    const double inv = 1.0 / std::sqrt(biased + eps);
    invstd_[j] = inv;
    for (std::size_t i = 0; i < n; ++i) {
      xhat_(i, j) = (x(i, j) - mean) * inv;
      y(i, j) = gamma(0, j) * xhat_(i, j) + beta(0, j);
    }
    running_mean(0, j) = (1.0 - momentum) * running_mean(0, j) + momentum * mean;
    running_var(0, j) = (1.0 - momentum) * running_var(0, j) + momentum * unbiased;
  }
  has_cache_ = true;
  return y;
}

Matrix BatchNormLayer::backward(const Matrix& upstream) {
  if (!has_cache_) throw TrainError("batchnorm_backward: no Train-mode cache");
  const std::size_t n = upstream.rows, w = upstream.cols;
  Matrix gx(n, w);
  for (std::size_t j = 0; j < w; ++j) {
    double sum_up = 0.0, sum_up_xhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum_up += upstream(i, j);
      sum_up_xhat += upstream(i, j) * xhat_(i, j);
    }
    ggamma(0, j) += sum_up_xhat;
    gbeta(0, j) += sum_up;
    const double g = gamma(0, j);
    const double inv = invstd_[j];
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      gx(i, j) = g * inv / nn *
                 (nn * upstream(i, j) - sum_up - xhat_(i, j) * sum_up_xhat);
    }
  }
  return gx;
}

void BatchNormLayer::zero_grad() {
  ggamma.data.assign(ggamma.size(), 0.0);
  gbeta.data.assign(gbeta.size(), 0.0);
}

void BatchNormLayer::collect(std::vector<ParamRef>& out, const std::string& prefix) {
  out.push_back({&gamma, &ggamma, prefix + ".gamma"});
  out.push_back({&beta, &gbeta, prefix + ".beta"});
}

// ---------- LayerNormLayer ----------

LayerNormLayer::LayerNormLayer(std::size_t width)
    : gamma(1, width, 1.0), beta(1, width), ggamma(1, width), gbeta(1, width) {}

Matrix LayerNormLayer::forward(const Matrix& x) {
  if (x.cols != gamma.cols)
    throw ShapeError("layernorm_forward: input " + x.shape_str() + " vs width " +
                     std::to_string(gamma.cols));
  const std::size_t n = x.rows, w = x.cols;
  Matrix y(n, w);
  xhat_ = Matrix(n, w);
  invstd_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < w; ++j) mean += x(i, j);
    mean /= static_cast<double>(w);
    double var = 0.0;
    for (std::size_t j = 0; j < w; ++j) {
      const double d = x(i, j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(w);
    const double inv = 1.0 / std::sqrt(var + eps);
    invstd_[i] = inv;
    for (std::size_t j = 0; j < w; ++j) {
      xhat_(i, j) = (x(i, j) - mean) * inv;
      y(i, j) = gamma(0, j) * xhat_(i, j) + beta(0, j);
    }
  }
  return y;
}

Matrix LayerNormLayer::backward(const Matrix& upstream) {
  const std::size_t n = upstream.rows, w = upstream.cols;
  Matrix gx(n, w);
  for (std::size_t i = 0; i < n; ++i) {
    double sum_g = 0.0, sum_g_xhat = 0.0;
    for (std::size_t j = 0; j < w; ++j) {
      const double g = upstream(i, j) * gamma(0, j);
      sum_g += g;
      sum_g_xhat += g * xhat_(i, j);
    }
    const double inv = invstd_[i];
    const double ww = static_cast<double>(w);
    for (std::size_t j = 0; j < w; ++j) {
      const double g = upstream(i, j) * gamma(0, j);
      gx(i, j) = inv / ww * (ww * g - sum_g - xhat_(i, j) * sum_g_xhat);
      ggamma(0, j) += upstream(i, j) * xhat_(i, j);
      gbeta(0, j) += upstream(i, j);
    }
  }
  return gx;
}

void LayerNormLayer::zero_grad() {
  ggamma.data.assign(ggamma.size(), 0.0);
  gbeta.data.assign(gbeta.size(), 0.0);
}

void LayerNormLayer::collect(std::vector<ParamRef>& out, const std::string& prefix) {
  out.push_back({&gamma, &ggamma, prefix + ".gamma"});
  out.push_back({&beta, &gbeta, prefix + ".beta"});
}

// ---------- ReluLayer ----------

Matrix ReluLayer::forward(const Matrix& x) {
  x_ = x;
  Matrix y = x;
  for (auto& v : y.data)
    if (v < 0.0) v = 0.0;
  return y;
}

Matrix ReluLayer::backward(const Matrix& upstream) {
  Matrix gx = upstream;
  for (std::size_t i = 0; i < gx.size(); ++i)
    if (x_.data[i] <= 0.0) gx.data[i] = 0.0;
  return gx;
}

// ---------- DropoutLayer ----------

DropoutLayer::DropoutLayer(double p_) : p(p_) {
  if (p < 0.0 || p >= 1.0)
    throw ConfigError("dropout: p must be in [0,1), got " + std::to_string(p));
}

Matrix DropoutLayer::forward(const Matrix& x, Mode mode, RngStream* rng) {
  last_mode_ = mode;
  if (mode == Mode::Eval || p == 0.0) {
    mask = Matrix(x.rows, x.cols, 1.0);
    return x;
  }
  const bool reuse = freeze && mask.rows == x.rows && mask.cols == x.cols;
  if (!reuse) {
    if (!rng) throw TrainError("dropout_forward: Train mode needs an RngStream");
    mask = rng->bernoulli_mask(x.rows, x.cols, 1.0 - p);
  }
  const double scale = 1.0 / (1.0 - p);
  Matrix y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y.data[i] *= mask.data[i] * scale;
  return y;
}

Matrix DropoutLayer::backward(const Matrix& upstream) {
  if (last_mode_ == Mode::Eval || p == 0.0) return upstream;
  const double scale = 1.0 / (1.0 - p);
  Matrix gx = upstream;
  for (std::size_t i = 0; i < gx.size(); ++i) gx.data[i] *= mask.data[i] * scale;
  return gx;
}

// ---------- losses ----------

std::pair<double, Matrix> mse_loss(const Matrix& pred, const Matrix& target) {
  if (pred.rows != target.rows || pred.cols != target.cols)
    throw ShapeError("mse_loss: " + pred.shape_str() + " vs " + target.shape_str());
  const double n = static_cast<double>(pred.size());
  double loss = 0.0;
  Matrix grad(pred.rows, pred.cols);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred.data[i] - target.data[i];
    loss += d * d;
    grad.data[i] = 2.0 * d / n;
  }
  return {loss / n, grad};
}

// ---------- Adam ----------

Adam::Adam(std::vector<ParamRef> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(p.value->size(), 0.0);
    v_.emplace_back(p.value->size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Matrix& theta = *params_[pi].value;
    const Matrix& grad = *params_[pi].grad;
    if (theta.size() != grad.size())
      throw ShapeError("adam_step: param " + params_[pi].name + " " + theta.shape_str() +
                       " vs grad " + grad.shape_str());
    auto& m = m_[pi];
    auto& v = v_[pi];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double g = grad.data[i] + cfg_.weight_decay * theta.data[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      theta.data[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace ocdeepiv
