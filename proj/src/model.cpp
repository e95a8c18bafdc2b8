#include "ocdeepiv/model.hpp"

namespace ocdeepiv {

FeatureExtractor::FeatureExtractor(std::size_t in, double dropout_p, RngStream& rng)
    : fc1(in, kWidth, rng),
      fc2(kWidth, kWidth, rng),
      bn1(kWidth),
      drop(dropout_p),
      ln2(kWidth) {}

Matrix FeatureExtractor::forward(const Matrix& x, Mode mode, RngStream* rng) {
  Matrix h = fc1.forward(x);
  h = bn1.forward(h, mode);
  h = relu1.forward(h);
  h = drop.forward(h, mode, rng);
  h = fc2.forward(h);
  h = ln2.forward(h);
  return relu2.forward(h);
}

Matrix FeatureExtractor::backward(const Matrix& upstream) {
  Matrix g = relu2.backward(upstream);
  g = ln2.backward(g);
  g = fc2.backward(g);
  g = drop.backward(g);
  g = relu1.backward(g);
  g = bn1.backward(g);
  return fc1.backward(g);
}

void FeatureExtractor::zero_grad() {
  fc1.zero_grad();
  fc2.zero_grad();
  bn1.zero_grad();
  ln2.zero_grad();
}

void FeatureExtractor::collect(std::vector<ParamRef>& out, const std::string& prefix) {
  fc1.collect(out, prefix + ".fc1");
  bn1.collect(out, prefix + ".bn1");
  fc2.collect(out, prefix + ".fc2");
  ln2.collect(out, prefix + ".ln2");
}

DualPathNet::DualPathNet(std::size_t in_a, std::size_t in_b, double dropout_p,
                         RngStream& rng)
    : path_a(in_a, dropout_p, rng),
      path_b(in_b, dropout_p, rng),
      head(2 * FeatureExtractor::kWidth, 1, rng) {}

Matrix DualPathNet::forward(const Matrix& a, const Matrix& b, Mode mode, RngStream* rng) {
  if (a.rows != b.rows)
    throw ShapeError("dualpath forward: row mismatch " + a.shape_str() + " vs " +
                     b.shape_str());
  Matrix fa = path_a.forward(a, mode, rng);
  Matrix fb = path_b.forward(b, mode, rng);
  Matrix combined(a.rows, fa.cols + fb.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < fa.cols; ++j) combined(i, j) = fa(i, j);
    for (std::size_t j = 0; j < fb.cols; ++j) combined(i, fa.cols + j) = fb(i, j);
  }
  return head.forward(combined);
}

void DualPathNet::backward(const Matrix& upstream) {
  Matrix gc = head.backward(upstream);
  const std::size_t w = FeatureExtractor::kWidth;
  Matrix ga(gc.rows, w), gb(gc.rows, w);
  for (std::size_t i = 0; i < gc.rows; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      ga(i, j) = gc(i, j);
      gb(i, j) = gc(i, w + j);
    }
  }
  path_a.backward(ga);
  path_b.backward(gb);
}

void DualPathNet::zero_grad() {
  path_a.zero_grad();
  path_b.zero_grad();
  head.zero_grad();
}

std::vector<ParamRef> DualPathNet::params() {
  std::vector<ParamRef> out;
  path_a.collect(out, "path_a");
  path_b.collect(out, "path_b");
  head.collect(out, "head");
  return out;
}

std::vector<Matrix*> DualPathNet::weight_matrices() {
  return {&path_a.fc1.W, &path_a.fc2.W, &path_b.fc1.W, &path_b.fc2.W, &head.W};
}

std::vector<Matrix*> DualPathNet::weight_grads() {
  return {&path_a.fc1.gW, &path_a.fc2.gW, &path_b.fc1.gW, &path_b.fc2.gW, &head.gW};
}

void DualPathNet::set_dropout_freeze(bool freeze) {
  path_a.drop.freeze = freeze;
  path_b.drop.freeze = freeze;
}

DualPathNet make_treatment_net(double dropout_p, RngStream& rng) {
  return DualPathNet(3, 6, dropout_p, rng);
}

DualPathNet make_outcome_net(double dropout_p, RngStream& rng) {
  return DualPathNet(1, 2, dropout_p, rng);
}

}  // namespace ocdeepiv
