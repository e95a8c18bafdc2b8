#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ocdeepiv/bench.hpp"

using namespace ocdeepiv;

namespace {

double mean_theta(const Matrix& theta) {
  double s = 0;
  for (double v : theta.data) s += v;
  return s / static_cast<double>(theta.size());
}

}  // namespace

TEST_CASE("estimator names round-trip") {
  for (EstimatorKind k :
       {EstimatorKind::NaiveOLS, EstimatorKind::TwoSLS, EstimatorKind::LinearDML,
        EstimatorKind::DeepIVNoOrtho, EstimatorKind::OCDeepIV_CodeFaithful,
        EstimatorKind::OCDeepIV_TwoStage}) {
    CHECK(parse_estimator(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_estimator("nope"), ConfigError);
  CHECK(!estimator_requires_y(EstimatorKind::OCDeepIV_CodeFaithful));
  CHECK(estimator_requires_y(EstimatorKind::NaiveOLS));
  CHECK(estimator_requires_y(EstimatorKind::OCDeepIV_TwoStage));
}

TEST_CASE("least_squares recovers planted coefficients") {
  RngStream rng(1, 0);
  Matrix design(200, 4);
  for (std::size_t i = 0; i < 200; ++i) {
    design(i, 0) = 1.0;
    for (std::size_t j = 1; j < 4; ++j) design(i, j) = rng.next_normal();
  }
  const std::vector<double> truth{2.0, -1.5, 0.25, 3.0};
  Matrix y(200, 1);
  for (std::size_t i = 0; i < 200; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < 4; ++j) s += design(i, j) * truth[j];
    y(i, 0) = s;
  }
  auto b = least_squares(design, y);
  REQUIRE(b.size() == 4);
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(b[j] - truth[j]) < 1e-8);

  Matrix singular(10, 2);
  for (std::size_t i = 0; i < 10; ++i) singular(i, 0) = singular(i, 1) = 1.0;
  CHECK_THROWS_AS(least_squares(singular, Matrix(10, 1)), ConfigError);
}

TEST_CASE("naive OLS is exact when its basis generates the outcome") {
  // Y built from the OLS basis with no noise and no confounding.
  ConfoundedSpec spec;
  spec.n = 4000;
  spec.seed = 2;
  spec.kappa_t = 0.0;
  spec.kappa_y = 0.0;
  Dataset ds = gen_confounded(spec);
  Matrix y(ds.n(), 1);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double x1 = ds.X(i, 0), x2 = ds.X(i, 1), t = ds.T(i, 0);
    y(i, 0) = 1.0 + 0.4 * x1 - 0.2 * x2 + (0.5 * x1 - 0.3 * x2 + 0.1 * x1 * x2) * t;
  }
  ds.Y = y;
  EstimateResult r = fit_naive_ols(ds);
  CHECK(r.mse_raw < 1e-12);
  for (std::size_t i = 0; i < ds.n(); ++i)
    CHECK(std::fabs(r.theta_hat(i, 0) - ds.theta_true(i, 0)) < 1e-6);
}

TEST_CASE("naive OLS is biased under confounding, 2SLS is not") {
  ConfoundedSpec spec;
  spec.n = 100000;
  spec.seed = 13;
  spec.constant_effect = 1.0;
  Dataset ds = gen_confounded(spec);

  EstimateResult ols = fit_naive_ols(ds);
  EstimateResult tsls = fit_2sls(ds);
  const double ols_bias = std::fabs(mean_theta(ols.theta_hat) - 1.0);
  const double tsls_bias = std::fabs(mean_theta(tsls.theta_hat) - 1.0);
  CHECK(ols_bias >= 0.1);
  CHECK(tsls_bias < 0.1);
  CHECK(tsls_bias < ols_bias);
}

TEST_CASE("without confounding OLS is consistent") {
  ConfoundedSpec spec;
  spec.n = 50000;
  spec.seed = 21;
  spec.kappa_t = 0.0;
  spec.kappa_y = 0.0;
  spec.constant_effect = 1.0;
  Dataset ds = gen_confounded(spec);
  EstimateResult ols = fit_naive_ols(ds);
  CHECK(std::fabs(mean_theta(ols.theta_hat) - 1.0) < 0.05);
}

TEST_CASE("linear DML recovers the effect without confounding") {
  ConfoundedSpec spec;
  spec.n = 50000;
  spec.seed = 33;
  spec.kappa_t = 0.0;
  spec.kappa_y = 0.0;
  spec.constant_effect = 1.0;
  Dataset ds = gen_confounded(spec);
  EstimateResult dml = fit_linear_dml(ds);
  CHECK(std::fabs(mean_theta(dml.theta_hat) - 1.0) < 0.05);
}

TEST_CASE("linear DML ignores the instruments") {
  ConfoundedSpec spec;
  spec.n = 5000;
  spec.seed = 8;
  Dataset ds = gen_confounded(spec);
  EstimateResult a = fit_linear_dml(ds);

  // permute the instrument rows; DML never reads Z
  Dataset shuffled = ds;
  for (std::size_t i = 0; i < ds.n(); ++i)
    for (std::size_t j = 0; j < 3; ++j)
      shuffled.Z(i, j) = ds.Z(ds.n() - 1 - i, j);
  EstimateResult b = fit_linear_dml(shuffled);
  CHECK(a.theta_hat == b.theta_hat);

  ConfoundedSpec tiny = spec;
  tiny.n = 30;  // folds of 15 rows are too small for the nuisance fits
  CHECK_THROWS_AS(fit_linear_dml(gen_confounded(tiny)), ConfigError);
}

TEST_CASE("ablation matches the penalized run through the first stage") {
  Dataset ds = gen_code_faithful(2000, 4);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.switch_epoch = 50;

  EstimateResult plain = fit_ablation_no_ortho(ds, cfg, /*two_stage=*/false);
  REQUIRE(plain.loss_history.size() == 60);
  for (const auto& rec : plain.loss_history) {
    CHECK(rec.ortho == 0.0);
    CHECK(rec.total == rec.mse);
  }

  TrainConfig pen = cfg;
  pen.lambda_reg = 0.02;
  std::vector<LossRecord> pen_hist;
  auto pen_fit = train_code_faithful(ds, pen, &pen_hist);
  REQUIRE(pen_hist.size() == 60);
  // identical trajectories until the penalty switches on
  for (int e = 0; e < 50; ++e) {
    CHECK(plain.loss_history[e].mse == pen_hist[e].mse);
    CHECK(plain.loss_history[e].total == pen_hist[e].total);
  }
  bool diverged = false;
  for (int e = 50; e < 60; ++e) {
    CHECK(pen_hist[e].ortho > 0.0);
    if (pen_hist[e].mse != plain.loss_history[e].mse) diverged = true;
  }
  CHECK(diverged);
}

TEST_CASE("compare runs mixed estimators and reports failures") {
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.switch_epoch = 2;
  auto make = [](std::uint64_t seed) { return gen_code_faithful(1000, seed); };
  std::vector<EstimatorKind> kinds{EstimatorKind::NaiveOLS,
                                   EstimatorKind::OCDeepIV_CodeFaithful};
  auto rows = compare(make, kinds, cfg, {1, 2});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].kind == EstimatorKind::NaiveOLS);
  CHECK(!rows[0].ok);  // no Y column in this generator
  CHECK(rows[0].error.find("Y") != std::string::npos);
  CHECK(rows[1].ok);
  CHECK(rows[1].mse_raw_mean > 0.0);
  CHECK(rows[1].mse_raw_std >= 0.0);

  auto rows2 = compare(make, kinds, cfg, {1, 2});
  CHECK(rows2[1].mse_raw_mean == rows[1].mse_raw_mean);
  CHECK(rows2[1].mse_smoothed_mean == rows[1].mse_smoothed_mean);
}

TEST_CASE("mse_between") {
  Matrix a(2, 1), b(2, 1);
  a(0, 0) = 1;
  a(1, 0) = 3;
  b(0, 0) = 0;
  b(1, 0) = 1;
  CHECK(mse_between(a, b) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(mse_between(a, a) == 0.0);
  CHECK_THROWS_AS(mse_between(a, Matrix(3, 1)), ShapeError);
}
