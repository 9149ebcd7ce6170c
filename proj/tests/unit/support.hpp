#pragma once

#include <doctest.h>

#include <filesystem>
#include <string>

#include "common/error.hpp"

// Fails unless `expr` throws egan::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                              \
  do {                                                                     \
    bool thrown_ = false;                                                  \
    try {                                                                  \
      (void)(expr);                                                        \
    } catch (const egan::Error& e_) {                                      \
      thrown_ = true;                                                      \
      CHECK_MESSAGE(e_.kind() == (expected_kind), e_.what());              \
    }                                                                      \
    CHECK_MESSAGE(thrown_, "expected an egan::Error from " #expr);         \
  } while (false)

namespace support {

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("egan_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace support
