#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "common/digest.hpp"
#include "gan/network.hpp"
#include "ndmath/matrix.hpp"
#include "ndmath/rng.hpp"

namespace egan::ganspace {

// PCA of first-layer generator activations plus the latent-space basis U that
// maps PCA coordinates back to latents.
struct DirectionBasis {
  std::vector<float> mean;       // h
  nd::Matrix pca_basis;          // h x p
  std::vector<float> variances;  // p, descending
  nd::Matrix latent_basis;       // d_z x p; column k is principal direction u_k
  std::uint64_t sample_count = 0;
  Digest generator_fingerprint{};

  std::size_t hidden() const { return pca_basis.rows(); }
  std::size_t directions() const { return pca_basis.cols(); }
  std::size_t latent_dim() const { return latent_basis.rows(); }

  friend bool operator==(const DirectionBasis&, const DirectionBasis&) = default;
};

struct EditOffsets {
  std::vector<float> values;  // one offset per principal direction
};

struct ActivationSample {
  nd::Matrix latents;      // N x d_z
  nd::Matrix activations;  // N x h
};

inline constexpr std::size_t kDefaultSampleCount = 10000;
inline constexpr std::size_t kDefaultDirections = 12;

ActivationSample collect_activations(const gan::GeneratorParams& g, std::size_t n_samples,
                                     nd::SeededRng& rng);

// pca_fit -> pca_coords -> least_squares(X, Z). The fingerprint is left zero;
// fit_generator_directions fills it.
DirectionBasis fit_directions(const nd::Matrix& latents, const nd::Matrix& activations,
                              std::size_t p);

DirectionBasis fit_generator_directions(const gan::GeneratorParams& g, std::size_t n_samples,
                                        std::size_t p, std::uint64_t seed);

// z' = z + U x
gan::LatentVector edit_latent(const gan::LatentVector& z, const DirectionBasis& basis,
                              const EditOffsets& x);

// Rejects a basis fitted on a different generator.
gan::EmbeddingVector edit_and_generate(const gan::GeneratorParams& g, const gan::LatentVector& z,
                                       const DirectionBasis& basis, const EditOffsets& x);

// Offset vector with a single nonzero entry.
EditOffsets single_offset(const DirectionBasis& basis, std::size_t k, float value);

// "EDIR" file: magic, u32 version, u32 h, u32 p, u32 d_z, u64 N, then mean,
// PCA basis, variances, U as little-endian f32, the 32-byte generator
// fingerprint, and a trailing SHA-256 of all prior bytes.
inline constexpr std::uint32_t kBasisVersion = 1;

std::vector<std::uint8_t> serialize_basis(const DirectionBasis& b);
DirectionBasis parse_basis(std::span<const std::uint8_t> bytes);
void save_basis(const DirectionBasis& b, const std::filesystem::path& path);
DirectionBasis load_basis(const std::filesystem::path& path);

}  // namespace egan::ganspace
