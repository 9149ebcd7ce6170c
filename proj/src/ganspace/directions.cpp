#include "ganspace/directions.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "common/binio.hpp"
#include "common/error.hpp"
#include "ndmath/linalg.hpp"

namespace egan::ganspace {

ActivationSample collect_activations(const gan::GeneratorParams& g, std::size_t n_samples,
                                     nd::SeededRng& rng) {
  require(n_samples >= 2, ErrorKind::kContract, "collect_activations: need at least 2 samples");
  ActivationSample s;
  s.latents = gan::sample_latents(rng, n_samples, g.latent_dim());
  s.activations = gan::first_layer(g.net, s.latents);
  return s;
}

DirectionBasis fit_directions(const nd::Matrix& latents, const nd::Matrix& activations,
                              std::size_t p) {
  require(latents.rows() == activations.rows(), ErrorKind::kShape,
          "fit_directions: latent and activation sample counts differ");
  const nd::Pca pca = nd::pca_fit(activations, p);
  const nd::Matrix coords = nd::pca_coords(activations, pca.mean, pca.basis);
  DirectionBasis b;
  b.mean = pca.mean;
  b.pca_basis = pca.basis;
  b.variances = pca.variances;
  b.latent_basis = nd::least_squares(coords, latents);
  b.sample_count = latents.rows();
  return b;
}

DirectionBasis fit_generator_directions(const gan::GeneratorParams& g, std::size_t n_samples,
                                        std::size_t p, std::uint64_t seed) {
  nd::SeededRng rng(seed);
  const ActivationSample s = collect_activations(g, n_samples, rng);
  require(s.activations.all_finite(), ErrorKind::kDegenerate,
          "fit_directions: generator produced non-finite activations");
  DirectionBasis b = fit_directions(s.latents, s.activations, p);
  b.generator_fingerprint = gan::fingerprint(g);
  return b;
}

gan::LatentVector edit_latent(const gan::LatentVector& z, const DirectionBasis& basis,
                              const EditOffsets& x) {
  require(z.values.size() == basis.latent_dim(), ErrorKind::kShape,
          "edit_latent: latent length " + std::to_string(z.values.size()) + " != basis d_z " +
              std::to_string(basis.latent_dim()));
  require(x.values.size() == basis.directions(), ErrorKind::kShape,
          "edit_latent: offset length " + std::to_string(x.values.size()) + " != p " +
              std::to_string(basis.directions()));
  gan::LatentVector out = z;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < x.values.size(); ++k)
      acc += double{basis.latent_basis(i, k)} * x.values[k];
    out.values[i] = static_cast<float>(double{z.values[i]} + acc);
  }
  return out;
}

gan::EmbeddingVector edit_and_generate(const gan::GeneratorParams& g, const gan::LatentVector& z,
                                       const DirectionBasis& basis, const EditOffsets& x) {
  require(gan::fingerprint(g) == basis.generator_fingerprint, ErrorKind::kContract,
          "direction basis was fitted on a different generator");
  return gan::generate(g, edit_latent(z, basis, x));
}

EditOffsets single_offset(const DirectionBasis& basis, std::size_t k, float value) {
  require(k < basis.directions(), ErrorKind::kContract,
          "direction index " + std::to_string(k) + " out of range [0, " +
              std::to_string(basis.directions()) + ")");
  EditOffsets x{std::vector<float>(basis.directions(), 0.0f)};
  x.values[k] = value;
  return x;
}

std::vector<std::uint8_t> serialize_basis(const DirectionBasis& b) {
  ByteWriter w;
  w.magic("EDIR");
  w.u32(kBasisVersion);
  w.u32(static_cast<std::uint32_t>(b.hidden()));
  w.u32(static_cast<std::uint32_t>(b.directions()));
  w.u32(static_cast<std::uint32_t>(b.latent_dim()));
  w.u64(b.sample_count);
  w.f32s(b.mean);
  w.f32s(b.pca_basis.values());
  w.f32s(b.variances);
  w.f32s(b.latent_basis.values());
  w.bytes(b.generator_fingerprint);
  w.seal();
  return w.take();
}

DirectionBasis parse_basis(std::span<const std::uint8_t> bytes) {
  const auto content = unseal(bytes, "direction basis");
  ByteReader r(content, "direction basis");
  r.expect_magic("EDIR");
  const std::uint32_t version = r.u32();
  if (version != kBasisVersion) r.bad("unsupported version " + std::to_string(version));
  const std::uint32_t h = r.u32(), p = r.u32(), dz = r.u32();
  const std::uint64_t n = r.u64();
  if (h == 0 || p == 0 || dz == 0 || p > h) r.bad("implausible dimensions");
  r.need((std::uint64_t{h} + std::uint64_t{h} * p + p + std::uint64_t{dz} * p) * 4, "basis payload");
  DirectionBasis b;
  b.sample_count = n;
  b.mean.resize(h);
  r.f32s(b.mean);
  b.pca_basis = nd::Matrix(h, p);
  r.f32s(b.pca_basis.values());
  b.variances.resize(p);
  r.f32s(b.variances);
  b.latent_basis = nd::Matrix(dz, p);
  r.f32s(b.latent_basis.values());
  b.generator_fingerprint = r.digest();
  r.expect_end();
  for (float v : b.mean) if (!std::isfinite(v)) r.bad("non-finite mean");
  if (!b.pca_basis.all_finite() || !b.latent_basis.all_finite()) r.bad("non-finite basis");
  for (std::size_t k = 0; k < p; ++k) {
    if (!std::isfinite(b.variances[k]) || b.variances[k] < 0.0f) r.bad("invalid variance");
    if (k > 0 && b.variances[k] > b.variances[k - 1]) r.bad("variances not descending");
  }
  return b;
}

void save_basis(const DirectionBasis& b, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_basis(b));
}

DirectionBasis load_basis(const std::filesystem::path& path) { return parse_basis(read_file(path)); }

}  // namespace egan::ganspace
