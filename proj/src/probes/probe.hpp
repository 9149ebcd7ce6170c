#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "corpus/corpus.hpp"

namespace egan::probes {

struct ProbeMetadata {
  std::string attribute;
  std::string corpus_fingerprint;  // hex SHA-256 of the training corpus
  double heldout_accuracy = 0.0;   // binary: fraction correct; scalar: 1 - mean absolute error
  double heldout_r2 = 0.0;         // scalar probes only
  std::size_t train_count = 0;
  std::size_t heldout_count = 0;

  friend bool operator==(const ProbeMetadata&, const ProbeMetadata&) = default;
};

// Logistic score sigmoid(w . e + b).
struct BinaryProbe {
  std::vector<double> weights;
  double bias = 0.0;
  ProbeMetadata meta;

  double logit(std::span<const float> e) const;
  double score(std::span<const float> e) const;
  bool predict(std::span<const float> e) const { return score(e) >= 0.5; }

  friend bool operator==(const BinaryProbe&, const BinaryProbe&) = default;
};

// Linear regression clamped to [0, 1].
struct ScalarProbe {
  std::vector<double> weights;
  double bias = 0.0;
  ProbeMetadata meta;

  double linear(std::span<const float> e) const;  // before clamping
  double score(std::span<const float> e) const;

  friend bool operator==(const ScalarProbe&, const ScalarProbe&) = default;
};

struct ProbeFitOptions {
  double heldout_fraction = 0.2;
  std::uint64_t seed = 0;
  std::size_t iterations = 500;
  double learning_rate = 0.5;
  double l2 = 1e-4;
};

BinaryProbe fit_binary_probe(const corpus::EmbeddingCorpus& c, const std::string& attribute,
                             const ProbeFitOptions& opts = {});
// Same, from explicit 0/1 labels.
BinaryProbe fit_binary_probe(const nd::Matrix& x, std::span<const float> labels,
                             const ProbeFitOptions& opts = {});

ScalarProbe fit_scalar_probe(const corpus::EmbeddingCorpus& c, const std::string& attribute,
                             const ProbeFitOptions& opts = {});
ScalarProbe fit_scalar_probe(const nd::Matrix& x, std::span<const float> labels,
                             const ProbeFitOptions& opts = {});

// JSON probe files: {"kind": "binary"|"scalar", "weights": [...], "bias": ..., "meta": {...}}.
std::string to_json(const BinaryProbe& p);
std::string to_json(const ScalarProbe& p);
BinaryProbe binary_probe_from_json(const std::string& text);
ScalarProbe scalar_probe_from_json(const std::string& text);

}  // namespace egan::probes
