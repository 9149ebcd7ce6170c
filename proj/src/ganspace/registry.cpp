#include "ganspace/registry.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "common/binio.hpp"
#include "common/error.hpp"

namespace egan::ganspace {

namespace {

void check_field(const std::string& s, const char* what, bool allow_empty) {
  require(allow_empty || !s.empty(), ErrorKind::kContract, std::string(what) + " must be nonempty");
  require(s.find_first_of("\t\n\r") == std::string::npos, ErrorKind::kContract,
          std::string(what) + " may not contain tabs or newlines");
}

}  // namespace

void DirectionRegistry::register_label(std::size_t k, std::string label, std::string provenance) {
  require(k < directions_, ErrorKind::kContract,
          "direction index " + std::to_string(k) + " out of range [0, " +
              std::to_string(directions_) + ")");
  check_field(label, "label", false);
  check_field(provenance, "provenance", true);
  entries_.push_back({k, std::move(label), std::move(provenance)});
}

std::optional<DirectionLabel> DirectionRegistry::lookup(std::size_t k) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->index == k) return *it;
  return std::nullopt;
}

std::vector<DirectionLabel> DirectionRegistry::history(std::size_t k) const {
  std::vector<DirectionLabel> out;
  for (const auto& e : entries_)
    if (e.index == k) out.push_back(e);
  return out;
}

std::string DirectionRegistry::to_text() const {
  std::string s;
  for (const auto& e : entries_)
    s += std::to_string(e.index) + '\t' + e.label + '\t' + e.provenance + '\n';
  return s;
}

DirectionRegistry DirectionRegistry::from_text(const std::string& text, std::size_t directions) {
  DirectionRegistry reg(directions);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      fail(ErrorKind::kFormat, "registry line " + std::to_string(lineno) + ": expected 3 fields");
    std::size_t k = 0;
    auto [p, ec] = std::from_chars(line.data(), line.data() + t1, k);
    if (ec != std::errc() || p != line.data() + t1)
      fail(ErrorKind::kFormat, "registry line " + std::to_string(lineno) + ": bad index");
    try {
      reg.register_label(k, line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1));
    } catch (const Error& e) {
      fail(ErrorKind::kFormat, "registry line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return reg;
}

void DirectionRegistry::save(const std::filesystem::path& path) const {
  write_text_atomic(path, to_text());
}

DirectionRegistry DirectionRegistry::load(const std::filesystem::path& path, std::size_t directions) {
  const auto bytes = read_file(path);
  return from_text(std::string(bytes.begin(), bytes.end()), directions);
}

}  // namespace egan::ganspace
