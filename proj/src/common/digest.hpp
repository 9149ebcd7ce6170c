#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace egan {

using Digest = std::array<std::uint8_t, 32>;

// SHA-256 over a byte range.
Digest sha256(std::span<const std::uint8_t> bytes);

std::string to_hex(const Digest& d);

}  // namespace egan
