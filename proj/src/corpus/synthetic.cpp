#include "corpus/synthetic.hpp"

#include <cmath>
#include <numeric>

#include "common/error.hpp"
#include "gan/network.hpp"
#include "ndmath/rng.hpp"

namespace egan::corpus {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

Vec unit_normal(nd::SeededRng& rng, std::size_t d) {
  Vec v(d);
  for (auto& x : v) x = rng.normal();
  const double n = std::sqrt(dot(v, v));
  for (auto& x : v) x /= n;
  return v;
}

}  // namespace

void SyntheticCorpusSpec::validate() const {
  require(speakers >= 2, ErrorKind::kContract, "synthetic corpus needs at least 2 speakers");
  require(utterances_per_speaker >= 1, ErrorKind::kContract,
          "synthetic corpus needs at least 1 utterance per speaker");
  require(mean_scale > 0.0 && noise_scale > 0.0, ErrorKind::kContract,
          "cluster scales must be positive");
  require(margin >= 0.0 && slope >= 0.0 && std::isfinite(margin) && std::isfinite(slope),
          ErrorKind::kContract, "margin and slope must be finite and non-negative");
}

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  spec.validate();
  constexpr std::size_t d = gan::kEmbeddingDim;
  nd::SeededRng rng(spec.seed);

  const Vec g = unit_normal(rng, d);
  Vec a = unit_normal(rng, d);
  axpy(-dot(a, g), g, a);
  const double an = std::sqrt(dot(a, a));
  for (auto& x : a) x /= an;

  // Balanced binary assignment over a shuffled speaker order.
  std::vector<std::size_t> order(spec.speakers);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  std::vector<float> speaker_class(spec.speakers);
  for (std::size_t i = 0; i < order.size(); ++i) speaker_class[order[i]] = i % 2 == 0 ? 1.0f : 0.0f;

  std::vector<Vec> centres(spec.speakers);
  for (std::size_t s = 0; s < spec.speakers; ++s) {
    Vec c(d);
    for (auto& x : c) x = spec.mean_scale * rng.normal();
    // Speaker identity lives off the planted axes.
    axpy(-dot(c, g), g, c);
    axpy(-dot(c, a), a, c);
    axpy(speaker_class[s] > 0.5f ? spec.margin : -spec.margin, g, c);
    centres[s] = std::move(c);
  }

  const std::size_t n = spec.speakers * spec.utterances_per_speaker;
  nd::Matrix emb(n, d);
  std::vector<std::uint32_t> speaker_ids(n);
  AttributeColumn binary{kBinaryAttribute, AttributeKind::kBinary, std::vector<float>(n)};
  AttributeColumn scalar{kScalarAttribute, AttributeKind::kScalar, std::vector<float>(n)};
  std::size_t row = 0;
  for (std::size_t s = 0; s < spec.speakers; ++s) {
    for (std::size_t u = 0; u < spec.utterances_per_speaker; ++u, ++row) {
      const float value = static_cast<float>(rng.uniform());
      Vec e = centres[s];
      axpy(double{value} * spec.slope, a, e);
      for (auto& x : e) x += spec.noise_scale * rng.normal();
      for (std::size_t j = 0; j < d; ++j) emb(row, j) = static_cast<float>(e[j]);
      speaker_ids[row] = static_cast<std::uint32_t>(s);
      binary.values[row] = speaker_class[s];
      scalar.values[row] = value;
    }
  }

  SyntheticCorpus out;
  out.corpus = EmbeddingCorpus(std::move(emb));
  out.corpus.set_speakers(std::move(speaker_ids));
  out.corpus.add_attribute(std::move(binary));
  out.corpus.add_attribute(std::move(scalar));
  out.binary_axis.assign(g.begin(), g.end());
  out.scalar_axis.assign(a.begin(), a.end());
  return out;
}

}  // namespace egan::corpus
