#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ocdeepiv/matrix.hpp"
#include "ocdeepiv/rng.hpp"

using namespace ocdeepiv;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("matmul identity and basic products") {
  Matrix a = from_rows({{1, 2}, {3, 4}});
  CHECK(matmul(Matrix::identity(2), a) == a);
  CHECK(matmul(a, Matrix::identity(2)) == a);

  Matrix col = from_rows({{0}, {1}});
  Matrix picked = matmul(a, col);
  CHECK(picked(0, 0) == 2.0);
  CHECK(picked(1, 0) == 4.0);

  CHECK(matmul(from_rows({{2}}), from_rows({{3}}))(0, 0) == 6.0);
}

TEST_CASE("matmul shape error names both shapes") {
  Matrix a(2, 3), b(4, 2);
  CHECK_THROWS_AS(matmul(a, b), ShapeError);
  try {
    matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2x3") != std::string::npos);
    CHECK(msg.find("4x2") != std::string::npos);
  }
}

TEST_CASE("frobenius_sq examples and trace identity") {
  CHECK(frobenius_sq(Matrix::identity(2)) == 2.0);
  CHECK(frobenius_sq(Matrix(3, 3)) == 0.0);
  CHECK(frobenius_sq(from_rows({{1, 2}, {3, 4}})) == 30.0);

  RngStream rng(3, 0);
  Matrix a = rng.standard_normal(7, 4);
  const double f = frobenius_sq(a);
  const double t = trace(matmul_at_b(a, a));
  CHECK(std::fabs(f - t) <= 1e-12 * std::max(std::fabs(f), 1.0));
}

TEST_CASE("openmp kernels bit-match serial references") {
  RngStream rng(11, 5);
  Matrix a = rng.standard_normal(37, 19);
  Matrix b = rng.standard_normal(19, 23);
  Matrix c = rng.standard_normal(37, 23);
  CHECK(matmul(a, b) == matmul_serial(a, b));
  CHECK(matmul_at_b(a, c) == matmul_at_b_serial(a, c));
  CHECK(matmul_a_bt(a, transpose(b)) == matmul_a_bt_serial(a, transpose(b)));
  CHECK(matmul_a_bt(a, transpose(b)) == matmul_serial(a, b));
}

TEST_CASE("rng streams are reproducible bit for bit") {
  RngStream r1(123, 4);
  RngStream r2(123, 4);
  for (int i = 0; i < 1000; ++i) CHECK(r1.next_u64() == r2.next_u64());

  RngStream n1(9, 2), n2(9, 2);
  CHECK(n1.standard_normal(13, 7) == n2.standard_normal(13, 7));
  CHECK(n1.bernoulli_mask(13, 7, 0.4) == n2.bernoulli_mask(13, 7, 0.4));
}

TEST_CASE("standard normal sample statistics at N=10000") {
  RngStream rng(0, 0);
  Matrix s = rng.standard_normal(10000, 1);
  double mean = 0;
  for (double v : s.data) mean += v;
  mean /= 10000.0;
  double var = 0;
  for (double v : s.data) var += (v - mean) * (v - mean);
  var /= 9999.0;
  CHECK(std::fabs(mean) < 0.04);
  CHECK(var > 0.94);
  CHECK(var < 1.06);
}

TEST_CASE("distinct stream ids are uncorrelated") {
  RngStream ra(77, 0), rb(77, 1);
  Matrix a = ra.standard_normal(10000, 1);
  Matrix b = rb.standard_normal(10000, 1);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    ma += a.data[i];
    mb += b.data[i];
  }
  ma /= 10000;
  mb /= 10000;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    cov += (a.data[i] - ma) * (b.data[i] - mb);
    va += (a.data[i] - ma) * (a.data[i] - ma);
    vb += (b.data[i] - mb) * (b.data[i] - mb);
  }
  CHECK(std::fabs(cov / std::sqrt(va * vb)) < 0.04);
}

TEST_CASE("bernoulli mask") {
  RngStream rng(5, 0);
  Matrix ones = rng.bernoulli_mask(20, 5, 1.0);
  for (double v : ones.data) CHECK(v == 1.0);

  Matrix m = rng.bernoulli_mask(100, 100, 0.7);
  double frac = 0;
  for (double v : m.data) {
    CHECK((v == 0.0 || v == 1.0));
    frac += v;
  }
  frac /= 10000.0;
  CHECK(frac > 0.68);
  CHECK(frac < 0.72);

  CHECK_THROWS_AS(rng.bernoulli_mask(2, 2, 0.0), ConfigError);
  CHECK_THROWS_AS(rng.bernoulli_mask(2, 2, 1.5), ConfigError);
}

TEST_CASE("matrix ops keep entries finite") {
  RngStream rng(1, 1);
  Matrix a = rng.standard_normal(50, 20);
  Matrix b = rng.standard_normal(20, 30);
  CHECK(matmul(a, b).all_finite());
  CHECK(transpose(a).all_finite());
}
