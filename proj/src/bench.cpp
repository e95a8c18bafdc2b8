#include "ocdeepiv/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>

#include "ocdeepiv/features.hpp"
#include "ocdeepiv/rng.hpp"

namespace ocdeepiv {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::NaiveOLS: return "NaiveOLS";
    case EstimatorKind::TwoSLS: return "TwoSLS";
    case EstimatorKind::LinearDML: return "LinearDML";
    case EstimatorKind::DeepIVNoOrtho: return "DeepIVNoOrtho";
    case EstimatorKind::OCDeepIV_CodeFaithful: return "OCDeepIV_CodeFaithful";
    case EstimatorKind::OCDeepIV_TwoStage: return "OCDeepIV_TwoStage";
  }
  return "?";
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "NaiveOLS") return EstimatorKind::NaiveOLS;
  if (name == "TwoSLS") return EstimatorKind::TwoSLS;
  if (name == "LinearDML") return EstimatorKind::LinearDML;
  if (name == "DeepIVNoOrtho") return EstimatorKind::DeepIVNoOrtho;
  if (name == "OCDeepIV_CodeFaithful") return EstimatorKind::OCDeepIV_CodeFaithful;
  if (name == "OCDeepIV_TwoStage") return EstimatorKind::OCDeepIV_TwoStage;
  throw ConfigError("unknown estimator '" + name + "'");
}

bool estimator_requires_y(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::OCDeepIV_CodeFaithful:
      return false;
    case EstimatorKind::DeepIVNoOrtho:
      return false;  // falls back to the code-faithful pipeline without Y
    default:
      return true;
  }
}

std::vector<double> least_squares(const Matrix& design, const Matrix& y) {
  if (design.rows != y.rows || y.cols != 1)
    throw ShapeError("least_squares: design " + design.shape_str() + " vs y " +
                     y.shape_str());
  const std::size_t p = design.cols;
  Matrix ata = matmul_at_b(design, design);
  Matrix atb = matmul_at_b(design, y);

  // Gaussian elimination with partial pivoting on the normal equations.
  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  double scale = 0.0;
  for (double v : ata.data) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) throw ConfigError("least_squares: zero design matrix");
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::fabs(ata(r, col)) > std::fabs(ata(piv, col))) piv = r;
    if (std::fabs(ata(piv, col)) < 1e-12 * scale)
      throw ConfigError("least_squares: singular design (rank-deficient at column " +
                        std::to_string(col) + ")");
    if (piv != col) {
      for (std::size_t j = 0; j < p; ++j) std::swap(ata(col, j), ata(piv, j));
      std::swap(atb(col, 0), atb(piv, 0));
    }
    for (std::size_t r = col + 1; r < p; ++r) {
      const double f = ata(r, col) / ata(col, col);
      for (std::size_t j = col; j < p; ++j) ata(r, j) -= f * ata(col, j);
      atb(r, 0) -= f * atb(col, 0);
    }
  }
  std::vector<double> b(p);
  for (std::size_t ri = p; ri-- > 0;) {
    double s = atb(ri, 0);
    for (std::size_t j = ri + 1; j < p; ++j) s -= ata(ri, j) * b[j];
    b[ri] = s / ata(ri, ri);
  }
  return b;
}

double mse_between(const Matrix& a, const Matrix& b) {
  if (a.size() != b.size())
    throw ShapeError("mse_between: " + a.shape_str() + " vs " + b.shape_str());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

namespace {

class Timer {
 public:
  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

void finish(EstimateResult& res, const Dataset& ds, int w, const Timer& timer) {
  std::vector<double> raw(res.theta_hat.data.begin(), res.theta_hat.data.end());
  std::vector<double> smooth = moving_average(raw, static_cast<std::size_t>(w));
  res.theta_hat_smoothed = Matrix(res.theta_hat.rows, 1);
  res.theta_hat_smoothed.data = smooth;
  res.smoothing_window = w;
  res.mse_raw = mse_between(res.theta_hat, ds.theta_true);
  res.mse_smoothed = mse_between(res.theta_hat_smoothed, ds.theta_true);
  res.wall_time_s = timer.elapsed_s();
}

// theta(x) = b[c0] + b[c1]*x1 + b[c2]*x2 + b[c3]*x1*x2
Matrix theta_from_coefs(const Matrix& X, const std::vector<double>& b, std::size_t c0,
                        std::size_t c1, std::size_t c2, std::size_t c3) {
  Matrix th(X.rows, 1);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double x1 = X(i, 0), x2 = X(i, 1);
    th(i, 0) = b[c0] + b[c1] * x1 + b[c2] * x2 + b[c3] * x1 * x2;
  }
  return th;
}

Matrix ols_basis(const Matrix& X, const Matrix& t) {
  Matrix d(X.rows, 7);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double x1 = X(i, 0), x2 = X(i, 1), ti = t(i, 0);
    d(i, 0) = 1.0;
    d(i, 1) = ti;
    d(i, 2) = x1;
    d(i, 3) = x2;
    d(i, 4) = x1 * ti;
    d(i, 5) = x2 * ti;
    d(i, 6) = x1 * x2 * ti;
  }
  return d;
}

}  // namespace

EstimateResult fit_naive_ols(const Dataset& ds, int smoothing_window) {
  Timer timer;
  const Matrix& y = ds.require_y("fit_naive_ols");
  auto b = least_squares(ols_basis(ds.X, ds.T), y);
  EstimateResult res;
  res.kind = EstimatorKind::NaiveOLS;
  res.theta_hat = theta_from_coefs(ds.X, b, 1, 4, 5, 6);
  finish(res, ds, smoothing_window, timer);
  return res;
}

EstimateResult fit_2sls(const Dataset& ds, int smoothing_window) {
  Timer timer;
  const Matrix& y = ds.require_y("fit_2sls");
  const std::size_t n = ds.n();

  Matrix s1(n, 6);
  for (std::size_t i = 0; i < n; ++i) {
    s1(i, 0) = 1.0;
    for (std::size_t j = 0; j < 3; ++j) s1(i, 1 + j) = ds.Z(i, j);
    s1(i, 4) = ds.X(i, 0);
    s1(i, 5) = ds.X(i, 1);
  }
  auto a = least_squares(s1, ds.T);
  Matrix t_hat(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < 6; ++j) v += a[j] * s1(i, j);
    t_hat(i, 0) = v;
  }

  auto b = least_squares(ols_basis(ds.X, t_hat), y);
  EstimateResult res;
  res.kind = EstimatorKind::TwoSLS;
  res.theta_hat = theta_from_coefs(ds.X, b, 1, 4, 5, 6);
  finish(res, ds, smoothing_window, timer);
  return res;
}

EstimateResult fit_linear_dml(const Dataset& ds, int smoothing_window,
                              std::uint64_t fold_seed) {
  Timer timer;
  const Matrix& y = ds.require_y("fit_linear_dml");
  const std::size_t n = ds.n();
  if (n / 2 < 20) throw ConfigError("fit_linear_dml: fold too small (< 20 rows)");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  RngStream rng(fold_seed, 77);
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
    std::swap(idx[i], idx[j]);
  }

  auto nuisance_basis = [&](std::size_t i) {
    const double x1 = ds.X(i, 0), x2 = ds.X(i, 1);
    return std::array<double, 5>{1.0, x1, x2, x1 * x1, x2 * x2};
  };

  Matrix e_y(n, 1), e_t(n, 1);
  for (int fold = 0; fold < 2; ++fold) {
    std::vector<std::size_t> train, test;
    for (std::size_t k = 0; k < n; ++k)
      ((k % 2 == static_cast<std::size_t>(fold)) ? test : train).push_back(idx[k]);

    Matrix d(train.size(), 5), yt(train.size(), 1), tt(train.size(), 1);
    for (std::size_t r = 0; r < train.size(); ++r) {
      auto basis = nuisance_basis(train[r]);
      for (std::size_t j = 0; j < 5; ++j) d(r, j) = basis[j];
      yt(r, 0) = y(train[r], 0);
      tt(r, 0) = ds.T(train[r], 0);
    }
    auto by = least_squares(d, yt);
    auto bt = least_squares(d, tt);
    for (std::size_t i : test) {
      auto basis = nuisance_basis(i);
      double py = 0.0, pt = 0.0;
      for (std::size_t j = 0; j < 5; ++j) {
        py += by[j] * basis[j];
        pt += bt[j] * basis[j];
      }
      e_y(i, 0) = y(i, 0) - py;
      e_t(i, 0) = ds.T(i, 0) - pt;
    }
  }

  Matrix d2(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = ds.X(i, 0), x2 = ds.X(i, 1), et = e_t(i, 0);
    d2(i, 0) = et;
    d2(i, 1) = et * x1;
    d2(i, 2) = et * x2;
    d2(i, 3) = et * x1 * x2;
  }
  auto b = least_squares(d2, e_y);

  EstimateResult res;
  res.kind = EstimatorKind::LinearDML;
  res.theta_hat = theta_from_coefs(ds.X, b, 0, 1, 2, 3);
  finish(res, ds, smoothing_window, timer);
  return res;
}

EstimateResult fit_ablation_no_ortho(const Dataset& ds, TrainConfig cfg, bool two_stage,
                                     int smoothing_window) {
  Timer timer;
  cfg.lambda_reg = 0.0;
  EstimateResult res;
  res.kind = EstimatorKind::DeepIVNoOrtho;
  if (two_stage) {
    TwoStageFit fit = estimate_theta_two_stage(ds, cfg);
    res.theta_hat = std::move(fit.theta_hat);
    res.loss_history = std::move(fit.stage1_losses);
    for (auto rec : fit.stage2_losses) {
      rec.epoch += cfg.epochs;
      res.loss_history.push_back(rec);
    }
  } else {
    CodeFaithfulFit fit = train_code_faithful(ds, cfg);
    res.theta_hat = std::move(fit.theta_hat);
    res.loss_history = std::move(fit.losses);
  }
  finish(res, ds, smoothing_window, timer);
  return res;
}

EstimateResult fit_estimator(EstimatorKind kind, const Dataset& ds,
                             const TrainConfig& cfg, int smoothing_window) {
  switch (kind) {
    case EstimatorKind::NaiveOLS:
      return fit_naive_ols(ds, smoothing_window);
    case EstimatorKind::TwoSLS:
      return fit_2sls(ds, smoothing_window);
    case EstimatorKind::LinearDML:
      return fit_linear_dml(ds, smoothing_window, cfg.seed);
    case EstimatorKind::DeepIVNoOrtho:
      return fit_ablation_no_ortho(ds, cfg, ds.Y.has_value(), smoothing_window);
    case EstimatorKind::OCDeepIV_CodeFaithful: {
      Timer timer;
      CodeFaithfulFit fit = train_code_faithful(ds, cfg);
      EstimateResult res;
      res.kind = kind;
      res.theta_hat = std::move(fit.theta_hat);
      res.loss_history = std::move(fit.losses);
      finish(res, ds, smoothing_window, timer);
      return res;
    }
    case EstimatorKind::OCDeepIV_TwoStage: {
      Timer timer;
      TwoStageFit fit = estimate_theta_two_stage(ds, cfg);
      EstimateResult res;
      res.kind = kind;
      res.theta_hat = std::move(fit.theta_hat);
      res.loss_history = std::move(fit.stage1_losses);
      for (auto rec : fit.stage2_losses) {
        rec.epoch += cfg.epochs;
        res.loss_history.push_back(rec);
      }
      finish(res, ds, smoothing_window, timer);
      return res;
    }
  }
  throw ConfigError("fit_estimator: bad kind");
}

std::vector<CompareRow> compare(const std::function<Dataset(std::uint64_t)>& make_dataset,
                                const std::vector<EstimatorKind>& kinds,
                                const TrainConfig& cfg,
                                const std::vector<std::uint64_t>& replication_seeds,
                                int smoothing_window, unsigned max_threads) {
  struct Cell {
    bool ok = false;
    std::string error;
    double mse_raw = 0.0, mse_smoothed = 0.0, wall_time_s = 0.0;
  };
  const std::size_t reps = replication_seeds.size();
  std::vector<std::vector<Cell>> cells(reps, std::vector<Cell>(kinds.size()));

  auto run_rep = [&](std::size_t r) {
    Dataset ds = make_dataset(replication_seeds[r]);
    TrainConfig rep_cfg = cfg;
    rep_cfg.seed = replication_seeds[r];
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      Cell& cell = cells[r][k];
      if (estimator_requires_y(kinds[k]) && !ds.Y) {
        cell.error = "failed: requires Y";
        continue;
      }
      try {
        EstimateResult res = fit_estimator(kinds[k], ds, rep_cfg, smoothing_window);
        cell.ok = true;
        cell.mse_raw = res.mse_raw;
        cell.mse_smoothed = res.mse_smoothed;
        cell.wall_time_s = res.wall_time_s;
      } catch (const std::exception& e) {
        cell.error = std::string("failed: ") + e.what();
      }
    }
  };

  if (max_threads <= 1 || reps <= 1) {
    for (std::size_t r = 0; r < reps; ++r) run_rep(r);
  } else {
    std::vector<std::future<void>> pending;
    for (std::size_t r = 0; r < reps; ++r) {
      if (pending.size() >= max_threads) {
        pending.front().get();
        pending.erase(pending.begin());
      }
      pending.push_back(std::async(std::launch::async, run_rep, r));
    }
    for (auto& f : pending) f.get();
  }

  std::vector<CompareRow> rows;
  rows.reserve(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    CompareRow row;
    row.kind = kinds[k];
    std::vector<double> raw, smooth;
    double wall = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const Cell& cell = cells[r][k];
      if (!cell.ok) {
        row.error = cell.error;
        continue;
      }
      raw.push_back(cell.mse_raw);
      smooth.push_back(cell.mse_smoothed);
      wall += cell.wall_time_s;
    }
    if (!raw.empty() && row.error.empty()) {
      row.ok = true;
      auto mean_std = [](const std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) /
                            static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v) s += (x - mean) * (x - mean);
        const double sd =
            v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
        return std::pair<double, double>{mean, sd};
      };
      std::tie(row.mse_raw_mean, row.mse_raw_std) = mean_std(raw);
      std::tie(row.mse_smoothed_mean, row.mse_smoothed_std) = mean_std(smooth);
      row.wall_time_s = wall;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ocdeepiv
