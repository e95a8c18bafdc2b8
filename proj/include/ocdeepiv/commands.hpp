#pragma once

#include <string>

#include "ocdeepiv/config.hpp"

namespace ocdeepiv {

// Subcommand implementations shared by the CLI and the acceptance suite.
// Each writes its artifacts plus manifest.txt under out_dir.

void run_simulate(const ExperimentConfig& cfg, const std::string& out_dir);

// Writes losses.csv and theta.csv. On divergence the partial losses.csv is
// written before the TrainError propagates.
void run_train(const ExperimentConfig& cfg, const std::string& out_dir);

void run_compare(const ExperimentConfig& cfg, const std::string& out_dir);

// Prints one line per check; returns true iff all pass at tol.
bool run_gradcheck(const std::string& scope, double tol = 1e-5);

// Renders theta_plot.svg and losses_plot.svg from the two CSVs.
void run_plot(const std::string& theta_csv, const std::string& losses_csv,
              const std::string& out_dir);

// FNV-1a 64 digest of a file's bytes, hex-encoded.
std::string file_digest(const std::string& path);

}  // namespace ocdeepiv
