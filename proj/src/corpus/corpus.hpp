#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common/digest.hpp"
#include "ndmath/matrix.hpp"

namespace egan::corpus {

enum class AttributeKind : std::uint8_t { kBinary = 2, kScalar = 3 };

struct AttributeColumn {
  std::string name;
  AttributeKind kind = AttributeKind::kBinary;
  std::vector<float> values;  // {0,1} for binary, [0,1] for scalar

  friend bool operator==(const AttributeColumn&, const AttributeColumn&) = default;
};

class EmbeddingCorpus {
 public:
  EmbeddingCorpus() = default;
  explicit EmbeddingCorpus(nd::Matrix embeddings);

  std::size_t dim() const noexcept { return emb_.cols(); }
  std::size_t count() const noexcept { return emb_.rows(); }
  const nd::Matrix& embeddings() const noexcept { return emb_; }

  const std::optional<std::vector<std::uint32_t>>& speakers() const noexcept { return speakers_; }
  void set_speakers(std::vector<std::uint32_t> ids);

  const std::vector<AttributeColumn>& attributes() const noexcept { return attrs_; }
  const AttributeColumn& attribute(const std::string& name) const;
  void add_attribute(AttributeColumn col);

  // Rows in the given order, labels carried along.
  EmbeddingCorpus subset(std::span<const std::size_t> rows) const;

  // SHA-256 of the canonical serialization (everything before the stored hash).
  Digest content_hash() const;

  friend bool operator==(const EmbeddingCorpus&, const EmbeddingCorpus&) = default;

 private:
  nd::Matrix emb_;
  std::optional<std::vector<std::uint32_t>> speakers_;
  std::vector<AttributeColumn> attrs_;
};

// "EMBC" file: magic, u32 version, u32 dim, u64 count, f32 payload,
// u32 label block count, typed label blocks, 32-byte content hash.
inline constexpr std::uint32_t kCorpusVersion = 1;

std::vector<std::uint8_t> serialize_corpus(const EmbeddingCorpus& c);
EmbeddingCorpus parse_corpus(std::span<const std::uint8_t> bytes);
void save_corpus(const EmbeddingCorpus& c, const std::filesystem::path& path);
EmbeddingCorpus load_corpus(const std::filesystem::path& path);

// Text import: first line "dim,<D>", then one comma-separated row per embedding.
EmbeddingCorpus import_csv(const std::filesystem::path& path);

struct NormSummary {
  double min = 0, max = 0, mean = 0, stddev = 0;
};

struct CorpusStats {
  std::vector<double> mean;      // per dimension
  std::vector<double> variance;  // per dimension, population (divisor N)
  NormSummary norms;
  std::map<std::uint32_t, std::size_t> speaker_counts;
};

CorpusStats corpus_stats(const EmbeddingCorpus& c);

}  // namespace egan::corpus
