#include "ocdeepiv/sim.hpp"

#include <cmath>
#include <cstdio>

#include "ocdeepiv/rng.hpp"

namespace ocdeepiv {

const Matrix& Dataset::require_y(const char* who) const {
  if (!Y) throw ConfigError(std::string(who) + ": dataset has no Y column");
  return *Y;
}

Matrix theta_true(const Matrix& X) {
  if (X.cols != 2)
    throw ShapeError("theta_true: X must be Nx2, got " + X.shape_str());
  Matrix th(X.rows, 1);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double x1 = X(i, 0), x2 = X(i, 1);
    th(i, 0) = 0.5 * x1 - 0.3 * x2 + 0.1 * x1 * x2;
  }
  return th;
}

Dataset gen_code_faithful(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("gen_code_faithful: n must be >= 2");
  RngStream rng(seed, 0);
  Dataset ds;
  ds.seed = seed;
  ds.Z = rng.standard_normal(n, 3);
  ds.X = rng.standard_normal(n, 2);
  ds.T = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) ds.T(i, 0) = rng.next_normal() > 0.0 ? 1.0 : 0.0;
  ds.theta_true = theta_true(ds.X);
  return ds;
}

void ConfoundedSpec::validate() const {
  if (n < 2) throw ConfigError("gen_confounded: n must be >= 2");
  if (noise_t <= 0.0 || noise_y <= 0.0)
    throw ConfigError("gen_confounded: noise scales must be > 0");
}

Dataset gen_confounded(const ConfoundedSpec& spec) {
  spec.validate();
  if (spec.gamma[0] == 0.0 && spec.gamma[1] == 0.0 && spec.gamma[2] == 0.0)
    std::fprintf(stderr,
                 "warning: gen_confounded with all-zero gamma, instruments are "
                 "irrelevant\n");
  RngStream rng(spec.seed, 0);
  const std::size_t n = spec.n;
  Dataset ds;
  ds.seed = spec.seed;
  ds.Z = rng.standard_normal(n, 3);
  ds.X = rng.standard_normal(n, 2);
  ds.T = Matrix(n, 1);
  ds.theta_true = Matrix(n, 1);
  Matrix y(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_normal();
    const double eps = rng.next_normal();
    const double eta = rng.next_normal();
    double index = spec.kappa_t * u + spec.noise_t * eps;
    for (std::size_t j = 0; j < 3; ++j) index += spec.gamma[j] * ds.Z(i, j);
    for (std::size_t j = 0; j < 2; ++j) index += spec.beta[j] * ds.X(i, j);
    const double t = index > 0.0 ? 1.0 : 0.0;
    ds.T(i, 0) = t;
    const double x1 = ds.X(i, 0), x2 = ds.X(i, 1);
    const double theta = spec.constant_effect
                             ? *spec.constant_effect
                             : 0.5 * x1 - 0.3 * x2 + 0.1 * x1 * x2;
    ds.theta_true(i, 0) = theta;
    y(i, 0) = theta * t + spec.delta[0] * x1 + spec.delta[1] * x2 +
              spec.kappa_y * u + spec.noise_y * eta;
  }
  ds.Y = std::move(y);
  return ds;
}

}  // namespace ocdeepiv
