#include "ocdeepiv/matrix.hpp"

#include <cmath>

namespace ocdeepiv {

std::string Matrix::shape_str() const {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

bool Matrix::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

namespace {
void require(bool ok, const std::string& what, const Matrix& a, const Matrix& b) {
  if (!ok)
    throw ShapeError(what + ": " + a.shape_str() + " vs " + b.shape_str());
}
}  // namespace

Matrix matmul_serial(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, "matmul dimension mismatch", a, b);
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* crow = &c.data[i * c.cols];
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      const double* brow = &b.data[k * b.cols];
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_at_b_serial(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows, "matmul_at_b dimension mismatch", a, b);
  Matrix c(a.cols, b.cols);
  for (std::size_t i = 0; i < a.cols; ++i) {
    double* crow = &c.data[i * c.cols];
    for (std::size_t k = 0; k < a.rows; ++k) {
      const double aki = a(k, i);
      const double* brow = &b.data[k * b.cols];
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aki * brow[j];
    }
  }
  return c;
}

Matrix matmul_a_bt_serial(const Matrix& a, const Matrix& b) {
  require(a.cols == b.cols, "matmul_a_bt dimension mismatch", a, b);
  Matrix c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[i * a.cols];
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* brow = &b.data[j * b.cols];
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
      c(i, j) = s;
    }
  }
  return c;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, "matmul dimension mismatch", a, b);
  Matrix c(a.rows, b.cols);
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(a.rows); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    double* crow = &c.data[i * c.cols];
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      const double* brow = &b.data[k * b.cols];
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows, "matmul_at_b dimension mismatch", a, b);
  Matrix c(a.cols, b.cols);
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(a.cols); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    double* crow = &c.data[i * c.cols];
    for (std::size_t k = 0; k < a.rows; ++k) {
      const double aki = a(k, i);
      const double* brow = &b.data[k * b.cols];
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aki * brow[j];
    }
  }
  return c;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  require(a.cols == b.cols, "matmul_a_bt dimension mismatch", a, b);
  Matrix c(a.rows, b.rows);
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(a.rows); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const double* arow = &a.data[i * a.cols];
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* brow = &b.data[j * b.cols];
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
      c(i, j) = s;
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

double frobenius_sq(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data) s += v * v;
  return s;
}

double trace(const Matrix& a) {
  std::size_t n = a.rows < a.cols ? a.rows : a.cols;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a(i, i);
  return s;
}

}  // namespace ocdeepiv
