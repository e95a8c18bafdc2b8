#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ocdeepiv/errors.hpp"

namespace ocdeepiv {

// Dense row-major matrix of doubles. The universal numeric carrier.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::size_t size() const { return data.size(); }
  std::string shape_str() const;
  bool all_finite() const;

  static Matrix identity(std::size_t n);
};

bool operator==(const Matrix& a, const Matrix& b);

// Serial reference kernels. Kept for tests and the kernel benchmark; the
// OpenMP versions below must match them bit for bit.
Matrix matmul_serial(const Matrix& a, const Matrix& b);
Matrix matmul_at_b_serial(const Matrix& a, const Matrix& b);  // a^T * b
Matrix matmul_a_bt_serial(const Matrix& a, const Matrix& b);  // a * b^T

// OpenMP kernels. Each output element is accumulated by a single thread in
// the same loop order as the serial kernel, so results are bit-identical
// regardless of thread count.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_at_b(const Matrix& a, const Matrix& b);
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);
double frobenius_sq(const Matrix& a);
double trace(const Matrix& a);

}  // namespace ocdeepiv
