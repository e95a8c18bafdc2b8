#pragma once

#include <vector>

#include "ocdeepiv/matrix.hpp"

namespace ocdeepiv {

// Columns in order [x1, x2, x1^2, x2^2, x1*T, x2*T].
Matrix build_features(const Matrix& X, const Matrix& T);

// 'same'-length convolution with a uniform window, zero-padded at both
// edges (edge outputs biased toward 0). w must satisfy 1 <= w <= x.size().
std::vector<double> moving_average(const std::vector<double>& x, std::size_t w);

}  // namespace ocdeepiv
