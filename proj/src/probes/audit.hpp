#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "corpus/corpus.hpp"
#include "gan/network.hpp"

namespace egan::probes {

struct ThresholdCalibration {
  double threshold = 0.0;
  double equal_error_rate = 0.0;
  double false_positive_rate = 0.0;  // cross-speaker pairs above threshold
  double false_negative_rate = 0.0;  // same-speaker pairs at or below threshold
  std::size_t same_pairs = 0;
  std::size_t cross_pairs = 0;
};

// Equal-error point between same-speaker and cross-speaker cosine similarities
// over all unordered pairs of the labelled corpus.
ThresholdCalibration calibrate_threshold(const corpus::EmbeddingCorpus& c);

struct ThresholdPolicy {
  std::optional<double> fixed;  // calibrate from the corpus when empty
};

struct SimilaritySummary {
  double min = 0.0;
  double p05 = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct AuditRecord {
  std::size_t index = 0;
  std::size_t nearest = 0;         // row of the most similar training embedding
  double max_similarity = 0.0;
  double nearest_l2 = 0.0;         // L2 distance to the closest training embedding
  bool flagged = false;
  bool duplicate = false;
};

inline constexpr double kDuplicateTolerance = 1e-6;
inline constexpr std::size_t kDefaultAuditCount = 1000;

struct PrivacyAuditReport {
  std::size_t generated = 0;
  double threshold = 0.0;
  std::optional<ThresholdCalibration> calibration;
  double error_rate = 0.0;  // percent
  std::size_t flagged = 0;
  std::size_t duplicates = 0;
  SimilaritySummary nearest_neighbor;
  std::vector<AuditRecord> records;
};

// Audits explicit embeddings against the training set.
PrivacyAuditReport audit_embeddings(const nd::Matrix& generated, const corpus::EmbeddingCorpus& train,
                                    const ThresholdPolicy& policy);

// Samples n embeddings from g with latents drawn from derive(seed, i).
PrivacyAuditReport privacy_audit(const gan::GeneratorParams& g, const corpus::EmbeddingCorpus& train,
                                 std::size_t n_generated, const ThresholdPolicy& policy,
                                 std::uint64_t seed);

double cosine_similarity(std::span<const float> a, std::span<const float> b);

}  // namespace egan::probes
