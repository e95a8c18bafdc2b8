#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ocdeepiv/commands.hpp"

namespace {

// Exit codes: 0 success, 1 config error, 2 runtime/divergence, 3 gradcheck
// failure.
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitGradcheck = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

ocdeepiv::ExperimentConfig load(const CommonOpts& opts) {
  ocdeepiv::ExperimentConfig cfg = opts.config_path.empty()
                                       ? ocdeepiv::ExperimentConfig{}
                                       : ocdeepiv::ExperimentConfig::parse_file(
                                             opts.config_path);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.seed) {
    cfg.dgp.seed = *opts.seed;
    cfg.train.seed = *opts.seed;
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "key=value config file");
  cmd->add_option("--out", opts.out_dir, "output directory (overrides run.output_dir)");
  cmd->add_option("--seed", opts.seed, "seed override for DGP and training");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OC-DeepIV causal-effect estimation toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string scope = "all";
  std::string theta_csv, losses_csv;

  auto* simulate = app.add_subcommand("simulate", "generate a dataset CSV");
  add_common(simulate, opts);
  auto* train = app.add_subcommand("train", "train the model; write losses and theta");
  add_common(train, opts);
  auto* cmp = app.add_subcommand("compare", "run estimator comparison");
  add_common(cmp, opts);
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  add_common(gradcheck, opts);
  gradcheck->add_option("--scope", scope,
                        "all or linear|batchnorm|layernorm|relu|dropout|mse|ortho|net");
  auto* plot = app.add_subcommand("plot", "render SVG plots from train output");
  add_common(plot, opts);
  plot->add_option("--theta", theta_csv, "theta.csv path (default <out>/theta.csv)");
  plot->add_option("--losses", losses_csv, "losses.csv path (default <out>/losses.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      auto cfg = load(opts);
      ocdeepiv::run_simulate(cfg, cfg.output_dir);
    } else if (train->parsed()) {
      auto cfg = load(opts);
      ocdeepiv::run_train(cfg, cfg.output_dir);
    } else if (cmp->parsed()) {
      auto cfg = load(opts);
      ocdeepiv::run_compare(cfg, cfg.output_dir);
    } else if (gradcheck->parsed()) {
      if (!ocdeepiv::run_gradcheck(scope)) return kExitGradcheck;
    } else if (plot->parsed()) {
      auto cfg = load(opts);
      if (theta_csv.empty()) theta_csv = cfg.output_dir + "/theta.csv";
      if (losses_csv.empty()) losses_csv = cfg.output_dir + "/losses.csv";
      ocdeepiv::run_plot(theta_csv, losses_csv, cfg.output_dir);
    }
  } catch (const ocdeepiv::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
