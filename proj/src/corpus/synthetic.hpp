#pragma once

#include <cstdint>
#include <vector>

#include "corpus/corpus.hpp"

namespace egan::corpus {

inline constexpr const char* kBinaryAttribute = "planted_binary";
inline constexpr const char* kScalarAttribute = "planted_scalar";

// Speaker clusters with two planted, mutually orthogonal attribute axes.
struct SyntheticCorpusSpec {
  std::size_t speakers = 10;
  std::size_t utterances_per_speaker = 200;
  double mean_scale = 1.0;   // per-dimension stddev of speaker centres
  double noise_scale = 0.5;  // per-dimension stddev within a speaker
  double margin = 1.5;       // binary classes sit at +-margin along the binary axis
  double slope = 6.0;        // scalar value v in [0,1] contributes v * slope along the scalar axis
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticCorpus {
  EmbeddingCorpus corpus;
  std::vector<float> binary_axis;  // unit 64-vector
  std::vector<float> scalar_axis;  // unit 64-vector orthogonal to binary_axis
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec);

}  // namespace egan::corpus
