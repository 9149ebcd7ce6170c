#include "ndmath/rng.hpp"

#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace egan::nd {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SeededRng::next_u64() noexcept {
  ++counter_;
  return splitmix64_mix(seed_ + counter_ * kGolden);
}

double SeededRng::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t SeededRng::uniform_index(std::uint64_t n) {
  require(n > 0, ErrorKind::kContract, "uniform_index: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % n;
  }
}

double SeededRng::normal() noexcept {
  if (spare_) {
    const double s = *spare_;
    spare_.reset();
    return s;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

Matrix SeededRng::normal_matrix(std::size_t rows, std::size_t cols, double stddev) {
  Matrix m(rows, cols);
  for (auto& x : m.values()) x = static_cast<float>(stddev * normal());
  return m;
}

SeededRng SeededRng::derive(std::uint64_t seed, std::uint64_t stream) noexcept {
  return SeededRng(splitmix64_mix(seed ^ splitmix64_mix(stream + kGolden)));
}

}  // namespace egan::nd
