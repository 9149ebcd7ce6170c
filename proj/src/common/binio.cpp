#include "common/binio.hpp"

#include <fstream>
#include <iterator>

#include "common/error.hpp"

namespace egan {

void ByteWriter::magic(std::string_view m) {
  for (char c : m) buf_.push_back(static_cast<std::uint8_t>(c));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f32s(std::span<const float> v) {
  buf_.reserve(buf_.size() + 4 * v.size());
  for (float x : v) f32(x);
}

void ByteWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  for (char c : s) buf_.push_back(static_cast<std::uint8_t>(c));
}

void ByteWriter::seal() {
  const Digest d = sha256(buf_);
  buf_.insert(buf_.end(), d.begin(), d.end());
}

void ByteReader::bad(const std::string& msg) const {
  fail(ErrorKind::kFormat, what_ + ": " + msg + " at offset " + std::to_string(pos_));
}

void ByteReader::need(std::uint64_t n, const char* field) const {
  if (n > remaining()) {
    bad(std::string("truncated ") + field + " (need " + std::to_string(n) + " bytes, have " +
        std::to_string(remaining()) + ")");
  }
}

void ByteReader::expect_magic(std::string_view m) {
  need(m.size(), "magic");
  if (std::memcmp(data_.data() + pos_, m.data(), m.size()) != 0) {
    bad("bad magic, expected \"" + std::string(m) + "\"");
  }
  pos_ += m.size();
}

std::uint8_t ByteReader::u8() {
  need(1, "u8");
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4, "u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{data_[pos_ + i]} << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8, "u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
  pos_ += 8;
  return v;
}

void ByteReader::f32s(std::span<float> out) {
  need(std::uint64_t{4} * out.size(), "float payload");
  for (auto& x : out) x = f32();
}

std::string ByteReader::str(std::size_t max_len) {
  const std::uint32_t n = u32();
  if (n > max_len) bad("string length " + std::to_string(n) + " exceeds limit");
  need(n, "string");
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

Digest ByteReader::digest() {
  need(32, "digest");
  Digest d{};
  std::memcpy(d.data(), data_.data() + pos_, 32);
  pos_ += 32;
  return d;
}

void ByteReader::expect_end() const {
  if (pos_ != data_.size()) bad(std::to_string(remaining()) + " trailing bytes");
}

std::span<const std::uint8_t> unseal(std::span<const std::uint8_t> file, const std::string& what) {
  if (file.size() < 32) {
    fail(ErrorKind::kFormat, what + ": file of " + std::to_string(file.size()) +
                                 " bytes is shorter than its checksum");
  }
  const auto content = file.first(file.size() - 32);
  const Digest actual = sha256(content);
  if (std::memcmp(actual.data(), file.data() + content.size(), 32) != 0) {
    fail(ErrorKind::kFormat, what + ": checksum mismatch (checksum stored at offset " +
                                 std::to_string(content.size()) + ")");
  }
  return content;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

}  // namespace egan
