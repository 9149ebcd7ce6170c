#include "corpus/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common/binio.hpp"
#include "common/error.hpp"

namespace egan::corpus {

namespace {

constexpr std::uint8_t kSpeakerBlock = 1;
constexpr std::uint32_t kMaxBlocks = 1024;
constexpr std::uint32_t kMaxDim = 1u << 16;

void check_column(const AttributeColumn& col, std::size_t count) {
  require(!col.name.empty(), ErrorKind::kContract, "attribute name must be nonempty");
  require(col.values.size() == count, ErrorKind::kContract,
          "attribute '" + col.name + "' has " + std::to_string(col.values.size()) +
              " values for " + std::to_string(count) + " embeddings");
  for (float v : col.values) {
    if (col.kind == AttributeKind::kBinary) {
      require(v == 0.0f || v == 1.0f, ErrorKind::kContract,
              "binary attribute '" + col.name + "' holds a value other than 0/1");
    } else {
      require(std::isfinite(v) && v >= 0.0f && v <= 1.0f, ErrorKind::kContract,
              "scalar attribute '" + col.name + "' outside [0, 1]");
    }
  }
}

ByteWriter write_content(const EmbeddingCorpus& c) {
  ByteWriter w;
  w.magic("EMBC");
  w.u32(kCorpusVersion);
  w.u32(static_cast<std::uint32_t>(c.dim()));
  w.u64(c.count());
  w.f32s(c.embeddings().values());
  const std::uint32_t blocks =
      static_cast<std::uint32_t>(c.attributes().size() + (c.speakers() ? 1 : 0));
  w.u32(blocks);
  if (c.speakers()) {
    w.u8(kSpeakerBlock);
    w.str("speaker");
    for (auto id : *c.speakers()) w.u32(id);
  }
  for (const auto& a : c.attributes()) {
    w.u8(static_cast<std::uint8_t>(a.kind));
    w.str(a.name);
    if (a.kind == AttributeKind::kBinary) {
      for (float v : a.values) w.u8(v != 0.0f ? 1 : 0);
    } else {
      w.f32s(a.values);
    }
  }
  return w;
}

}  // namespace

EmbeddingCorpus::EmbeddingCorpus(nd::Matrix embeddings) : emb_(std::move(embeddings)) {
  require(emb_.all_finite(), ErrorKind::kContract, "corpus embeddings must be finite");
}

void EmbeddingCorpus::set_speakers(std::vector<std::uint32_t> ids) {
  require(ids.size() == count(), ErrorKind::kContract, "speaker label count != embedding count");
  speakers_ = std::move(ids);
}

const AttributeColumn& EmbeddingCorpus::attribute(const std::string& name) const {
  for (const auto& a : attrs_)
    if (a.name == name) return a;
  fail(ErrorKind::kContract, "corpus has no attribute '" + name + "'");
}

void EmbeddingCorpus::add_attribute(AttributeColumn col) {
  check_column(col, count());
  for (const auto& a : attrs_)
    require(a.name != col.name, ErrorKind::kContract, "duplicate attribute '" + col.name + "'");
  attrs_.push_back(std::move(col));
}

EmbeddingCorpus EmbeddingCorpus::subset(std::span<const std::size_t> rows) const {
  EmbeddingCorpus out(nd::gather_rows(emb_, rows));
  if (speakers_) {
    std::vector<std::uint32_t> ids;
    for (auto r : rows) ids.push_back((*speakers_)[r]);
    out.speakers_ = std::move(ids);
  }
  for (const auto& a : attrs_) {
    AttributeColumn col{a.name, a.kind, {}};
    for (auto r : rows) col.values.push_back(a.values[r]);
    out.attrs_.push_back(std::move(col));
  }
  return out;
}

Digest EmbeddingCorpus::content_hash() const { return sha256(write_content(*this).buffer()); }

std::vector<std::uint8_t> serialize_corpus(const EmbeddingCorpus& c) {
  ByteWriter w = write_content(c);
  w.seal();
  return w.take();
}

EmbeddingCorpus parse_corpus(std::span<const std::uint8_t> bytes) {
  const auto content = unseal(bytes, "corpus");
  ByteReader r(content, "corpus");
  r.expect_magic("EMBC");
  const std::uint32_t version = r.u32();
  if (version != kCorpusVersion) r.bad("unsupported version " + std::to_string(version));
  const std::uint32_t dim = r.u32();
  if (dim == 0 || dim > kMaxDim) r.bad("implausible dimension " + std::to_string(dim));
  const std::uint64_t count = r.u64();
  r.need(count * dim * 4, "embedding payload");
  nd::Matrix emb(count, dim);
  r.f32s(emb.values());
  if (!emb.all_finite()) r.bad("embedding payload contains non-finite values");
  EmbeddingCorpus c(std::move(emb));

  const std::uint32_t blocks = r.u32();
  if (blocks > kMaxBlocks) r.bad("implausible label block count");
  for (std::uint32_t b = 0; b < blocks; ++b) {
    const std::uint8_t kind = r.u8();
    std::string name = r.str(256);
    try {
      if (kind == kSpeakerBlock) {
        if (c.speakers()) r.bad("duplicate speaker block");
        r.need(count * 4, "speaker labels");
        std::vector<std::uint32_t> ids(count);
        for (auto& id : ids) id = r.u32();
        c.set_speakers(std::move(ids));
      } else if (kind == static_cast<std::uint8_t>(AttributeKind::kBinary)) {
        r.need(count, "binary labels");
        AttributeColumn col{std::move(name), AttributeKind::kBinary, {}};
        col.values.resize(count);
        for (auto& v : col.values) {
          const std::uint8_t x = r.u8();
          if (x > 1) r.bad("binary label out of range");
          v = static_cast<float>(x);
        }
        c.add_attribute(std::move(col));
      } else if (kind == static_cast<std::uint8_t>(AttributeKind::kScalar)) {
        r.need(count * 4, "scalar labels");
        AttributeColumn col{std::move(name), AttributeKind::kScalar, std::vector<float>(count)};
        r.f32s(col.values);
        c.add_attribute(std::move(col));
      } else {
        r.bad("unknown label block kind " + std::to_string(kind));
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kFormat) throw;
      r.bad(e.what());
    }
  }
  r.expect_end();
  return c;
}

void save_corpus(const EmbeddingCorpus& c, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_corpus(c));
}

EmbeddingCorpus load_corpus(const std::filesystem::path& path) { return parse_corpus(read_file(path)); }

EmbeddingCorpus import_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& msg) {
    fail(ErrorKind::kFormat, path.string() + ":" + std::to_string(lineno) + ": " + msg);
  };
  auto parse_float = [&](std::string_view tok) {
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\r')) tok.remove_suffix(1);
    float v = 0.0f;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v))
      bad("bad number '" + std::string(tok) + "'");
    return v;
  };

  ++lineno;
  if (!std::getline(in, line)) bad("missing dim header");
  if (line.rfind("dim,", 0) != 0) bad("header must be 'dim,<D>'");
  const float dimf = parse_float(std::string_view(line).substr(4));
  if (dimf < 1 || dimf != std::floor(dimf) || dimf > kMaxDim) bad("invalid dimension");
  const auto dim = static_cast<std::size_t>(dimf);

  std::vector<float> data;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::size_t fields = 0;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      data.push_back(parse_float(rest.substr(0, comma)));
      ++fields;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields != dim) bad("expected " + std::to_string(dim) + " fields, got " + std::to_string(fields));
    ++rows;
  }
  return EmbeddingCorpus(nd::Matrix(rows, dim, std::move(data)));
}

CorpusStats corpus_stats(const EmbeddingCorpus& c) {
  require(c.count() > 0, ErrorKind::kContract, "corpus_stats: empty corpus");
  const std::size_t n = c.count(), d = c.dim();
  const auto& e = c.embeddings();
  CorpusStats s;
  s.mean.assign(d, 0.0);
  s.variance.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += e(i, j);
  for (auto& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double x = e(i, j);
      const double dev = x - s.mean[j];
      s.variance[j] += dev * dev;
      sq += x * x;
    }
    norms[i] = std::sqrt(sq);
  }
  for (auto& v : s.variance) v /= static_cast<double>(n);

  // Sorted so the summary does not depend on row order.
  std::sort(norms.begin(), norms.end());
  double sum = 0.0;
  for (double x : norms) sum += x;
  s.norms.min = norms.front();
  s.norms.max = norms.back();
  s.norms.mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (double x : norms) var += (x - s.norms.mean) * (x - s.norms.mean);
  s.norms.stddev = std::sqrt(var / static_cast<double>(n));
  if (c.speakers())
    for (auto id : *c.speakers()) ++s.speaker_counts[id];
  return s;
}

}  // namespace egan::corpus
