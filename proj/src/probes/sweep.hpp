#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gan/network.hpp"
#include "ganspace/directions.hpp"
#include "probes/probe.hpp"

namespace egan::probes {

struct SweepConfig {
  std::size_t n_seeds = 300;
  double range_lo = -50.0;
  double range_hi = 50.0;
  double step = 5.0;
  std::uint64_t seed = 0;

  // Offsets lo, lo + step, ... up to hi inclusive.
  std::vector<double> offsets() const;
};

inline constexpr double kFlipBinWidth = 5.0;
inline constexpr double kRangeBinWidth = 0.05;

enum class FlipOrientation { kNone, kLowToHigh, kHighToLow };

struct FlipRecord {
  std::size_t seed_index = 0;
  std::optional<double> flip_point;
  FlipOrientation orientation = FlipOrientation::kNone;
  std::size_t flip_count = 0;  // prediction changes along the whole sweep
};

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<std::size_t> counts;

  double edge(std::size_t i) const { return lo + width * static_cast<double>(i); }
  std::size_t total() const;
};

struct FlipSweepReport {
  std::size_t direction = 0;
  SweepConfig config;
  std::vector<FlipRecord> records;  // ascending seed index
  Histogram low_to_high;            // flip points of seeds starting below 0.5
  Histogram high_to_low;
  std::size_t multi_flip_seeds = 0;  // seeds with more than one prediction change

  std::size_t flipped() const;
  double fraction(FlipOrientation o) const;  // share of all seeds
  double flipped_fraction() const;
};

struct RangeRecord {
  std::size_t seed_index = 0;
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;
};

struct RangeSweepReport {
  std::size_t direction = 0;
  SweepConfig config;
  std::vector<RangeRecord> records;
  Histogram min_hist;
  Histogram max_hist;
  Histogram range_hist;

  double mean_range() const;
};

using ProbeFn = std::function<double(std::span<const float>)>;

// Probe scores for one seed along direction k, one per offset.
std::vector<double> sweep_scores(const gan::GeneratorParams& g, const ganspace::DirectionBasis& basis,
                                 std::size_t k, const ProbeFn& probe, const SweepConfig& cfg,
                                 std::size_t seed_index);

FlipSweepReport flip_sweep(const gan::GeneratorParams& g, const ganspace::DirectionBasis& basis,
                           std::size_t k, const BinaryProbe& probe, const SweepConfig& cfg);

RangeSweepReport range_sweep(const gan::GeneratorParams& g, const ganspace::DirectionBasis& basis,
                             std::size_t k, const ScalarProbe& probe, const SweepConfig& cfg);

// Mean per-seed range of `probe` along every direction. Pass an unsquashed
// probe output (logit, unclamped regression) so that strong directions do not
// tie at a saturated range of 1.
std::vector<double> direction_effects(const gan::GeneratorParams& g,
                                      const ganspace::DirectionBasis& basis, const ProbeFn& probe,
                                      const SweepConfig& cfg);

std::size_t strongest_direction(std::span<const double> effects);

}  // namespace egan::probes
