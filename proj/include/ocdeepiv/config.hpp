#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocdeepiv/bench.hpp"
#include "ocdeepiv/sim.hpp"
#include "ocdeepiv/train.hpp"

namespace ocdeepiv {

enum class DgpKind { CodeFaithful, LogisticConfounded };
enum class ThetaMode { CodeFaithful, TwoStage };

// Flat key=value config with [dgp] / [train] / [run] sections. Every
// default matches the reference experiment (N=10000, epochs=100, lr=0.001,
// lambda=0.02, w=15). Unknown keys are rejected with their line number.
struct ExperimentConfig {
  DgpKind dgp_kind = DgpKind::CodeFaithful;
  ConfoundedSpec dgp;  // n and seed also cover the code-faithful DGP

  TrainConfig train;

  std::vector<EstimatorKind> estimators = {EstimatorKind::OCDeepIV_CodeFaithful};
  int smoothing_window = 15;
  std::string output_dir = "out";
  bool plot = false;
  int replications = 1;
  ThetaMode theta_mode = ThetaMode::CodeFaithful;

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_text(const std::string& text, const std::string& origin);

  Dataset generate_dataset(std::uint64_t seed) const;
  // Stable key=value echo for the run manifest.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

}  // namespace ocdeepiv
