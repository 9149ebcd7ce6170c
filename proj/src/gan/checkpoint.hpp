#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gan/trainer.hpp"

namespace egan::gan {

// "EGAN" file: magic, u32 version, config block, generator and critic
// matrices (u32 rows, u32 cols, little-endian f32 payload), both Adam states,
// u64 step, 32-byte corpus fingerprint, trailing SHA-256 of all prior bytes.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ck);
Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace egan::gan
