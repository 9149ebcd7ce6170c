#include "probes/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace egan::probes {

namespace {

void check_sweep(const gan::GeneratorParams& g, const ganspace::DirectionBasis& basis,
                 std::size_t k, const SweepConfig& cfg) {
  require(cfg.n_seeds >= 1, ErrorKind::kContract, "sweep: need at least one seed");
  require(k < basis.directions(), ErrorKind::kContract,
          "sweep: direction " + std::to_string(k) + " out of range");
  require(basis.latent_dim() == g.latent_dim(), ErrorKind::kShape,
          "sweep: basis latent dimension does not match generator");
  require(gan::fingerprint(g) == basis.generator_fingerprint, ErrorKind::kContract,
          "sweep: direction basis was fitted on a different generator");
}

Histogram make_hist(double lo, double hi, double width) {
  Histogram h;
  h.lo = lo;
  h.width = width;
  h.counts.assign(static_cast<std::size_t>(std::floor((hi - lo) / width + 1e-9)) + 1, 0);
  return h;
}

void bin(Histogram& h, double v) {
  const double pos = (v - h.lo) / h.width + 1e-9;
  const auto i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0,
                                                     static_cast<double>(h.counts.size() - 1)));
  ++h.counts[i];
}

Histogram unit_hist() {
  Histogram h;
  h.lo = 0.0;
  h.width = kRangeBinWidth;
  h.counts.assign(static_cast<std::size_t>(std::llround(1.0 / kRangeBinWidth)), 0);
  return h;
}

}  // namespace

std::vector<double> SweepConfig::offsets() const {
  require(step > 0.0 && std::isfinite(step), ErrorKind::kContract, "sweep: step must be positive");
  require(std::isfinite(range_lo) && std::isfinite(range_hi) && range_hi >= range_lo,
          ErrorKind::kContract, "sweep: empty sweep range");
  const auto count = static_cast<std::size_t>(std::floor((range_hi - range_lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = range_lo + step * static_cast<double>(i);
  return out;
}

std::size_t Histogram::total() const {
  std::size_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

std::size_t FlipSweepReport::flipped() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(),
                                                [](const FlipRecord& r) { return r.flip_point.has_value(); }));
}

double FlipSweepReport::fraction(FlipOrientation o) const {
  if (records.empty()) return 0.0;
  const auto n = std::count_if(records.begin(), records.end(),
                               [o](const FlipRecord& r) { return r.orientation == o; });
  return static_cast<double>(n) / static_cast<double>(records.size());
}

double FlipSweepReport::flipped_fraction() const {
  return records.empty() ? 0.0
                         : static_cast<double>(flipped()) / static_cast<double>(records.size());
}

double RangeSweepReport::mean_range() const {
  if (records.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : records) s += r.range;
  return s / static_cast<double>(records.size());
}

std::vector<double> sweep_scores(const gan::GeneratorParams& g, const ganspace::DirectionBasis& basis,
                                 std::size_t k, const ProbeFn& probe, const SweepConfig& cfg,
                                 std::size_t seed_index) {
  const auto offsets = cfg.offsets();
  auto rng = nd::SeededRng::derive(cfg.seed, seed_index);
  const gan::LatentVector z = gan::sample_latent(rng, g.latent_dim());
  nd::Matrix zs(offsets.size(), z.values.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const auto edited =
        ganspace::edit_latent(z, basis, ganspace::single_offset(basis, k, static_cast<float>(offsets[i])));
    std::copy(edited.values.begin(), edited.values.end(), zs.row(i).begin());
  }
  const nd::Matrix emb = gan::generate_batch(g, zs);
  std::vector<double> scores(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) scores[i] = probe(emb.row(i));
  return scores;
}

FlipSweepReport flip_sweep(const gan::GeneratorParams& g, const ganspace::DirectionBasis& basis,
                           std::size_t k, const BinaryProbe& probe, const SweepConfig& cfg) {
  check_sweep(g, basis, k, cfg);
  require(probe.weights.size() == gan::kEmbeddingDim, ErrorKind::kShape,
          "flip_sweep: probe dimension does not match embeddings");
  const auto offsets = cfg.offsets();
  FlipSweepReport rep;
  rep.direction = k;
  rep.config = cfg;
  rep.low_to_high = make_hist(cfg.range_lo, cfg.range_hi, kFlipBinWidth);
  rep.high_to_low = rep.low_to_high;
  const ProbeFn fn = [&](std::span<const float> e) { return probe.score(e); };

  for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
    const auto scores = sweep_scores(g, basis, k, fn, cfg, s);
    FlipRecord r;
    r.seed_index = s;
    const bool start = scores.front() >= 0.5;
    bool prev = start;
    for (std::size_t i = 1; i < scores.size(); ++i) {
      const bool cur = scores[i] >= 0.5;
      if (cur != prev) {
        ++r.flip_count;
        if (!r.flip_point) r.flip_point = offsets[i];
      }
      prev = cur;
    }
    if (r.flip_point) {
      r.orientation = start ? FlipOrientation::kHighToLow : FlipOrientation::kLowToHigh;
      bin(start ? rep.high_to_low : rep.low_to_high, *r.flip_point);
    }
    if (r.flip_count > 1) ++rep.multi_flip_seeds;
    rep.records.push_back(r);
  }
  return rep;
}

RangeSweepReport range_sweep(const gan::GeneratorParams& g, const ganspace::DirectionBasis& basis,
                             std::size_t k, const ScalarProbe& probe, const SweepConfig& cfg) {
  check_sweep(g, basis, k, cfg);
  require(probe.weights.size() == gan::kEmbeddingDim, ErrorKind::kShape,
          "range_sweep: probe dimension does not match embeddings");
  cfg.offsets();
  RangeSweepReport rep;
  rep.direction = k;
  rep.config = cfg;
  rep.min_hist = unit_hist();
  rep.max_hist = unit_hist();
  rep.range_hist = unit_hist();
  const ProbeFn fn = [&](std::span<const float> e) { return probe.score(e); };

  for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
    const auto scores = sweep_scores(g, basis, k, fn, cfg, s);
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    RangeRecord r{s, *lo, *hi, *hi - *lo};
    bin(rep.min_hist, r.min);
    bin(rep.max_hist, r.max);
    bin(rep.range_hist, r.range);
    rep.records.push_back(r);
  }
  return rep;
}

std::vector<double> direction_effects(const gan::GeneratorParams& g,
                                      const ganspace::DirectionBasis& basis, const ProbeFn& probe,
                                      const SweepConfig& cfg) {
  std::vector<double> effects(basis.directions(), 0.0);
  for (std::size_t k = 0; k < basis.directions(); ++k) {
    check_sweep(g, basis, k, cfg);
    double total = 0.0;
    for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
      const auto scores = sweep_scores(g, basis, k, probe, cfg, s);
      const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
      total += *hi - *lo;
    }
    effects[k] = total / static_cast<double>(cfg.n_seeds);
  }
  return effects;
}

std::size_t strongest_direction(std::span<const double> effects) {
  require(!effects.empty(), ErrorKind::kContract, "strongest_direction: no directions");
  return static_cast<std::size_t>(std::max_element(effects.begin(), effects.end()) - effects.begin());
}

}  // namespace egan::probes
