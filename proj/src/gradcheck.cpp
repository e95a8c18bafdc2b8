#include "ocdeepiv/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ocdeepiv/features.hpp"
#include "ocdeepiv/model.hpp"
#include "ocdeepiv/train.hpp"

namespace ocdeepiv {

double fd_max_rel_error(Matrix& param, const Matrix& analytic_grad,
                        const std::function<double()>& loss, double h) {
  if (param.size() != analytic_grad.size())
    throw ShapeError("fd_max_rel_error: param " + param.shape_str() + " vs grad " +
                     analytic_grad.shape_str());
  double worst = 0.0;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double orig = param.data[i];
    param.data[i] = orig + h;
    const double lp = loss();
    param.data[i] = orig - h;
    const double lm = loss();
    param.data[i] = orig;
    if (!std::isfinite(lp) || !std::isfinite(lm))
      throw TrainError("fd_max_rel_error: non-finite loss during check");
    const double num = (lp - lm) / (2.0 * h);
    const double ana = analytic_grad.data[i];
    // Central differences bottom out at ~eps*|L|/h of rounding noise; a pair
    // below that floor is a matching zero gradient, not a mismatch.
    if (std::max(std::fabs(ana), std::fabs(num)) < 1e-9) continue;
    const double denom = std::max({std::fabs(ana), std::fabs(num), 1e-8});
    worst = std::max(worst, std::fabs(ana - num) / denom);
  }
  return worst;
}

namespace {

double dot(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

// Resample entries near the ReLU kink so central differences stay valid.
Matrix sample_away_from_zero(RngStream& rng, std::size_t r, std::size_t c,
                             double margin = 1e-4) {
  Matrix m(r, c);
  for (auto& v : m.data) {
    do {
      v = rng.next_normal();
    } while (std::fabs(v) < margin);
  }
  return m;
}

GradCheckResult check_linear(double tol) {
  RngStream rng(7, 11);
  LinearLayer layer(3, 4, rng);
  Matrix x = rng.standard_normal(5, 3);
  Matrix up = rng.standard_normal(5, 4);

  layer.forward(x);
  layer.zero_grad();
  Matrix gx = layer.backward(up);

  auto loss = [&] { return dot(layer.forward(x), up); };
  double worst = fd_max_rel_error(layer.W, layer.gW, loss);
  worst = std::max(worst, fd_max_rel_error(layer.b, layer.gb, loss));
  worst = std::max(worst, fd_max_rel_error(x, gx, loss));
  return {"linear", worst, worst < tol};
}

GradCheckResult check_batchnorm(double tol) {
  RngStream rng(7, 12);
  BatchNormLayer layer(4);
  layer.gamma = rng.standard_normal(1, 4);
  layer.beta = rng.standard_normal(1, 4);
  Matrix x = rng.standard_normal(8, 4);
  Matrix up = rng.standard_normal(8, 4);

  layer.forward(x, Mode::Train);
  layer.zero_grad();
  Matrix gx = layer.backward(up);
  Matrix ggamma = layer.ggamma, gbeta = layer.gbeta;

  auto loss = [&] { return dot(layer.forward(x, Mode::Train), up); };
  double worst = fd_max_rel_error(x, gx, loss);
  worst = std::max(worst, fd_max_rel_error(layer.gamma, ggamma, loss));
  worst = std::max(worst, fd_max_rel_error(layer.beta, gbeta, loss));
  return {"batchnorm", worst, worst < tol};
}

GradCheckResult check_layernorm(double tol) {
  RngStream rng(7, 13);
  LayerNormLayer layer(5);
  layer.gamma = rng.standard_normal(1, 5);
  layer.beta = rng.standard_normal(1, 5);
  Matrix x = rng.standard_normal(6, 5);
  Matrix up = rng.standard_normal(6, 5);

  layer.forward(x);
  layer.zero_grad();
  Matrix gx = layer.backward(up);
  Matrix ggamma = layer.ggamma, gbeta = layer.gbeta;

  auto loss = [&] { return dot(layer.forward(x), up); };
  double worst = fd_max_rel_error(x, gx, loss);
  worst = std::max(worst, fd_max_rel_error(layer.gamma, ggamma, loss));
  worst = std::max(worst, fd_max_rel_error(layer.beta, gbeta, loss));
  return {"layernorm", worst, worst < tol};
}

GradCheckResult check_relu(double tol) {
  RngStream rng(7, 14);
  ReluLayer layer;
  Matrix x = sample_away_from_zero(rng, 6, 5);
  Matrix up = rng.standard_normal(6, 5);

  layer.forward(x);
  Matrix gx = layer.backward(up);

  auto loss = [&] { return dot(layer.forward(x), up); };
  const double worst = fd_max_rel_error(x, gx, loss);
  return {"relu", worst, worst < tol};
}

GradCheckResult check_dropout(double tol) {
  RngStream rng(7, 15);
  DropoutLayer layer(0.3);
  Matrix x = rng.standard_normal(6, 5);
  Matrix up = rng.standard_normal(6, 5);

  layer.forward(x, Mode::Train, &rng);
  layer.freeze = true;  // same mask for analytic and numeric passes
  Matrix gx = layer.backward(up);

  auto loss = [&] { return dot(layer.forward(x, Mode::Train, nullptr), up); };
  const double worst = fd_max_rel_error(x, gx, loss);
  return {"dropout-frozen", worst, worst < tol};
}

GradCheckResult check_mse(double tol) {
  RngStream rng(7, 16);
  Matrix pred = rng.standard_normal(9, 1);
  Matrix target = rng.standard_normal(9, 1);

  Matrix grad = mse_loss(pred, target).second;
  auto loss = [&] { return mse_loss(pred, target).first; };
  const double worst = fd_max_rel_error(pred, grad, loss);
  return {"mse", worst, worst < tol};
}

GradCheckResult check_ortho(double tol) {
  RngStream rng(7, 17);
  Matrix w = rng.standard_normal(5, 3);
  const double lambda = 0.02;

  Matrix grad = ortho_grad_single(w, lambda);
  auto loss = [&] { return ortho_penalty_single(w, lambda); };
  const double worst = fd_max_rel_error(w, grad, loss);
  return {"ortho_penalty", worst, worst < tol};
}

double min_abs_relu_input(const DualPathNet& net) {
  double worst = 1e300;
  for (const ReluLayer* relu : {&net.path_a.relu1, &net.path_a.relu2, &net.path_b.relu1,
                                &net.path_b.relu2}) {
    for (double v : relu->last_input().data) worst = std::min(worst, std::fabs(v));
  }
  return worst;
}

GradCheckResult check_full_net(double tol) {
  RngStream init(7, 18);
  DualPathNet net = make_treatment_net(0.3, init);

  // Resample the batch until every ReLU preactivation clears the kink by
  // more than the finite-difference step can move it.
  const std::size_t batch = 16;
  Matrix z, f, target;
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt == 256)
      throw TrainError("gradcheck: no kink-free batch found for the full net");
    RngStream data(7, 100 + attempt);
    Matrix x = data.standard_normal(batch, 2);
    Matrix t(batch, 1);
    for (std::size_t i = 0; i < batch; ++i)
      t(i, 0) = data.next_uniform() > 0.5 ? 1.0 : 0.0;
    z = data.standard_normal(batch, 3);
    f = build_features(x, t);
    target = data.standard_normal(batch, 1);

    RngStream drop(7, 200 + attempt);
    net.set_dropout_freeze(false);
    net.forward(z, f, Mode::Train, &drop);  // materialize the dropout masks
    net.set_dropout_freeze(true);
    if (min_abs_relu_input(net) > 3e-4) break;
  }

  auto loss = [&] {
    auto [l, g] = mse_loss(net.forward(z, f, Mode::Train, nullptr), target);
    (void)g;
    return l;
  };

  Matrix pred = net.forward(z, f, Mode::Train, nullptr);
  auto [l0, grad] = mse_loss(pred, target);
  (void)l0;
  net.zero_grad();
  net.backward(grad);

  // Snapshot analytic grads before finite differencing overwrites caches.
  std::vector<Matrix> analytic;
  auto params = net.params();
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(*p.grad);

  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i)
    worst = std::max(worst, fd_max_rel_error(*params[i].value, analytic[i], loss));
  return {"treatment_net", worst, worst < tol};
}

}  // namespace

std::vector<GradCheckResult> run_grad_checks(const std::string& scope, double tol) {
  std::string s = scope;
  if (s.rfind("layer:", 0) == 0) s = s.substr(6);

  std::vector<GradCheckResult> results;
  const bool all = s == "all" || s.empty();
  if (all || s == "linear") results.push_back(check_linear(tol));
  if (all || s == "batchnorm") results.push_back(check_batchnorm(tol));
  if (all || s == "layernorm") results.push_back(check_layernorm(tol));
  if (all || s == "relu") results.push_back(check_relu(tol));
  if (all || s == "dropout") results.push_back(check_dropout(tol));
  if (all || s == "mse") results.push_back(check_mse(tol));
  if (all || s == "ortho") results.push_back(check_ortho(tol));
  if (all || s == "net") results.push_back(check_full_net(tol));
  if (results.empty())
    throw ConfigError("gradcheck: unknown scope '" + scope + "'");
  return results;
}

}  // namespace ocdeepiv
