#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace egan::ganspace {

struct DirectionLabel {
  std::size_t index = 0;
  std::string label;
  std::string provenance;

  friend bool operator==(const DirectionLabel&, const DirectionLabel&) = default;
};

// Human-readable names for principal directions. Every registration is kept;
// the latest one for an index is the current label.
class DirectionRegistry {
 public:
  explicit DirectionRegistry(std::size_t directions) : directions_(directions) {}

  std::size_t directions() const noexcept { return directions_; }

  void register_label(std::size_t k, std::string label, std::string provenance);
  std::optional<DirectionLabel> lookup(std::size_t k) const;
  std::vector<DirectionLabel> history(std::size_t k) const;
  const std::vector<DirectionLabel>& entries() const noexcept { return entries_; }

  // One line per registration: k<TAB>label<TAB>provenance
  std::string to_text() const;
  static DirectionRegistry from_text(const std::string& text, std::size_t directions);

  void save(const std::filesystem::path& path) const;
  static DirectionRegistry load(const std::filesystem::path& path, std::size_t directions);

  friend bool operator==(const DirectionRegistry&, const DirectionRegistry&) = default;

 private:
  std::size_t directions_;
  std::vector<DirectionLabel> entries_;
};

}  // namespace egan::ganspace
