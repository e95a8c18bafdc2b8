#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "ocdeepiv/matrix.hpp"

namespace ocdeepiv {

struct Dataset {
  Matrix Z;  // N x 3
  Matrix X;  // N x 2
  Matrix T;  // N x 1, entries in {0,1}
  std::optional<Matrix> Y;
  Matrix theta_true;  // N x 1
  std::uint64_t seed = 0;

  std::size_t n() const { return X.rows; }
  const Matrix& require_y(const char* who) const;
};

// 0.5*x1 - 0.3*x2 + 0.1*x1*x2 per row.
Matrix theta_true(const Matrix& X);

// Z ~ N(0,I3), X ~ N(0,I2), T an independent coin flip; no Y.
Dataset gen_code_faithful(std::size_t n, std::uint64_t seed);

struct ConfoundedSpec {
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  std::array<double, 3> gamma = {0.8, 0.8, 0.8};  // instrument strengths
  std::array<double, 2> beta = {0.3, 0.3};        // covariate coefs in T index
  double kappa_t = 0.7;                           // confounder loading in T
  double kappa_y = 0.7;                           // confounder loading in Y
  std::array<double, 2> delta = {0.5, -0.5};      // outcome baseline coefs
  double noise_t = 1.0;
  double noise_y = 1.0;
  // When set, the effect is the constant c instead of the heterogeneous
  // formula (theta_true column still records the effect actually used).
  std::optional<double> constant_effect;

  void validate() const;
};

// u ~ N(0,1); T = 1{Z*gamma + X*beta + kappa_t*u + noise_t*eps > 0};
// Y = theta(X)*T + X*delta + kappa_y*u + noise_y*eta.
Dataset gen_confounded(const ConfoundedSpec& spec);

}  // namespace ocdeepiv
