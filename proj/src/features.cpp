#include "ocdeepiv/features.hpp"

namespace ocdeepiv {

Matrix build_features(const Matrix& X, const Matrix& T) {
  if (X.cols != 2)
    throw ShapeError("build_features: X must be Nx2, got " + X.shape_str());
  if (T.cols != 1 || T.rows != X.rows)
    throw ShapeError("build_features: T must be " + std::to_string(X.rows) +
                     "x1, got " + T.shape_str());
  Matrix f(X.rows, 6);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double x1 = X(i, 0), x2 = X(i, 1), t = T(i, 0);
    f(i, 0) = x1;
    f(i, 1) = x2;
    f(i, 2) = x1 * x1;
    f(i, 3) = x2 * x2;
    f(i, 4) = x1 * t;
    f(i, 5) = x2 * t;
  }
  return f;
}

std::vector<double> moving_average(const std::vector<double>& x, std::size_t w) {
  if (w < 1) throw ConfigError("moving_average: window must be >= 1");
  if (w > x.size())
    throw ConfigError("moving_average: window " + std::to_string(w) +
                      " exceeds length " + std::to_string(x.size()));
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  // same[i] = full[i + (w-1)/2] of the full convolution with ones(w)/w
  const std::size_t off = (w - 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t hi = i + off;  // inclusive top index into x, clamped
    const std::size_t lo = hi >= w - 1 ? hi - (w - 1) : 0;
    double s = 0.0;
    for (std::size_t k = lo; k <= hi && k < n; ++k) s += x[k];
    out[i] = s / static_cast<double>(w);
  }
  return out;
}

}  // namespace ocdeepiv
