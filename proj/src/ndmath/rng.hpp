#pragma once

#include <cstdint>
#include <optional>

#include "ndmath/matrix.hpp"

namespace egan::nd {

// Counter-based generator. Draw i (1-based) is splitmix64_mix(seed + i * 0x9E3779B97F4A7C15).
// Uniforms use the top 53 bits, centred in their cell so they never hit 0 or 1.
// Normals use Box-Muller on consecutive uniform pairs (u1, u2):
//   r = sqrt(-2 ln u1), first = r cos(2 pi u2), second = r sin(2 pi u2),
// with the second value returned by the following call.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;
  // Exact uniform integer in [0, n) by rejection.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal() noexcept;

  Matrix normal_matrix(std::size_t rows, std::size_t cols, double stddev = 1.0);

  // Independent stream keyed by (seed, stream id); used for per-seed sweeps.
  static SeededRng derive(std::uint64_t seed, std::uint64_t stream) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace egan::nd
