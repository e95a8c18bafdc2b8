#pragma once

#include <cstdint>

#include "ocdeepiv/matrix.hpp"

namespace ocdeepiv {

// Splittable counter-seeded PRNG (xoshiro256++ state derived from
// splitmix64 over seed and stream_id). Identical (seed, stream_id) gives a
// bit-identical sequence on every platform; distinct stream_ids from the
// same seed give independent streams. Single-owner: not thread-safe.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();
  double next_uniform();  // [0, 1)
  double next_normal();   // N(0,1), Marsaglia polar

  Matrix standard_normal(std::size_t rows, std::size_t cols);
  // Entries in {0,1}, P(1) = keep_prob. Requires 0 < keep_prob <= 1.
  Matrix bernoulli_mask(std::size_t rows, std::size_t cols, double keep_prob);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ocdeepiv
