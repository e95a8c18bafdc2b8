#include "ocdeepiv/theta.hpp"

#include "ocdeepiv/features.hpp"

namespace ocdeepiv {

Matrix predict_theta_code_faithful(DualPathNet& net, const Matrix& Z, const Matrix& F) {
  return net.forward(Z, F, Mode::Eval);
}

CodeFaithfulFit train_code_faithful(const Dataset& ds, const TrainConfig& cfg,
                                    std::vector<LossRecord>* progress) {
  RngStream init_rng(cfg.seed, 1);
  RngStream drop_rng(cfg.seed, 2);
  CodeFaithfulFit fit{make_treatment_net(cfg.dropout_p, init_rng), {}, {}};
  Matrix F = build_features(ds.X, ds.T);
  fit.losses = staged_train(fit.net, ds.Z, F, ds.T, cfg, drop_rng, progress);
  fit.theta_hat = predict_theta_code_faithful(fit.net, ds.Z, F);
  return fit;
}

TwoStageFit estimate_theta_two_stage(const Dataset& ds, const TrainConfig& cfg,
                                     std::vector<LossRecord>* progress) {
  const Matrix& y = ds.require_y("estimate_theta_two_stage");

  RngStream init1(cfg.seed, 1);
  RngStream drop1(cfg.seed, 2);
  RngStream init2(cfg.seed, 3);
  RngStream drop2(cfg.seed, 4);

  TwoStageFit fit{make_treatment_net(cfg.dropout_p, init1),
                  make_outcome_net(cfg.dropout_p, init2),
                  {},
                  {},
                  {}};

  Matrix F = build_features(ds.X, ds.T);
  fit.stage1_losses = staged_train(fit.treatment_net, ds.Z, F, ds.T, cfg, drop1, progress);
  Matrix t_hat = fit.treatment_net.forward(ds.Z, F, Mode::Eval);

  std::vector<LossRecord> stage2_partial;
  auto append_offset = [&](const std::vector<LossRecord>& recs) {
    if (!progress) return;
    for (auto rec : recs) {
      rec.epoch += cfg.epochs;
      progress->push_back(rec);
    }
  };
  try {
    fit.stage2_losses =
        staged_train(fit.outcome_net, t_hat, ds.X, y, cfg, drop2, &stage2_partial);
  } catch (const TrainError&) {
    append_offset(stage2_partial);
    throw;
  }
  append_offset(fit.stage2_losses);

  Matrix ones(ds.n(), 1, 1.0);
  Matrix zeros(ds.n(), 1, 0.0);
  Matrix g1 = fit.outcome_net.forward(ones, ds.X, Mode::Eval);
  Matrix g0 = fit.outcome_net.forward(zeros, ds.X, Mode::Eval);
  fit.theta_hat = Matrix(ds.n(), 1);
  for (std::size_t i = 0; i < ds.n(); ++i)
    fit.theta_hat(i, 0) = g1(i, 0) - g0(i, 0);
  return fit;
}

}  // namespace ocdeepiv
