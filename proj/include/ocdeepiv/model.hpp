#pragma once

#include "ocdeepiv/layers.hpp"

namespace ocdeepiv {

// fc1 -> bn1 -> relu -> dropout -> fc2 -> ln2 -> relu, hidden width 64.
class FeatureExtractor {
 public:
  static constexpr std::size_t kWidth = 64;

  FeatureExtractor() = default;
  FeatureExtractor(std::size_t in, double dropout_p, RngStream& rng);

  Matrix forward(const Matrix& x, Mode mode, RngStream* rng);
  Matrix backward(const Matrix& upstream);

  void zero_grad();
  void collect(std::vector<ParamRef>& out, const std::string& prefix);

  LinearLayer fc1, fc2;
  BatchNormLayer bn1;
  DropoutLayer drop;
  LayerNormLayer ln2;
  ReluLayer relu1, relu2;
};

// Two feature extractors whose outputs are concatenated and fed through a
// linear head (128 -> 1).
class DualPathNet {
 public:
  DualPathNet() = default;
  DualPathNet(std::size_t in_a, std::size_t in_b, double dropout_p, RngStream& rng);

  Matrix forward(const Matrix& a, const Matrix& b, Mode mode, RngStream* rng = nullptr);
  void backward(const Matrix& upstream);

  void zero_grad();
  std::vector<ParamRef> params();
  // The 2-D weight matrices the orthogonality penalty acts on
  // (fc1/fc2 of both paths plus the head; never biases or norm affines).
  std::vector<Matrix*> weight_matrices();
  std::vector<Matrix*> weight_grads();
  void set_dropout_freeze(bool freeze);

  FeatureExtractor path_a, path_b;
  LinearLayer head;
};

// Treatment model: instrument path (width 3) and interaction-feature path
// (width 6).
DualPathNet make_treatment_net(double dropout_p, RngStream& rng);

// Outcome model: treatment channel (width 1) and raw covariates (width 2).
DualPathNet make_outcome_net(double dropout_p, RngStream& rng);

}  // namespace ocdeepiv
