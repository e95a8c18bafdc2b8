#pragma once

#include <stdexcept>
#include <string>

namespace ocdeepiv {

// Dimension mismatch in a matrix or layer operation.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration value (file, CLI flag, or API argument).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training failure: divergence, missing cache, batch too small.
struct TrainError : std::runtime_error {
  explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ocdeepiv
