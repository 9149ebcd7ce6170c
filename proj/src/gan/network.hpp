#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "common/digest.hpp"
#include "ndmath/matrix.hpp"
#include "ndmath/rng.hpp"
#include "ndmath/tape.hpp"

namespace egan::gan {

inline constexpr std::size_t kEmbeddingDim = 64;

struct LatentVector {
  std::vector<float> values;
};

struct EmbeddingVector {
  std::vector<float> values;
};

struct Dense {
  nd::Matrix w;  // in x out
  nd::Matrix b;  // 1 x out
  friend bool operator==(const Dense&, const Dense&) = default;
};

// x + A2(lrelu(A1 x))
struct ResBlock {
  Dense first;
  Dense second;
  friend bool operator==(const ResBlock&, const ResBlock&) = default;
};

// lrelu(input) -> residual blocks -> linear output.
struct ResidualMlp {
  Dense input;
  std::vector<ResBlock> blocks;
  Dense output;

  std::size_t in_dim() const { return input.w.rows(); }
  std::size_t hidden() const { return input.w.cols(); }
  std::size_t out_dim() const { return output.w.cols(); }

  std::vector<nd::Matrix*> parameters();
  std::vector<const nd::Matrix*> parameters() const;

  // Checks that every layer chains onto the next.
  void validate() const;

  friend bool operator==(const ResidualMlp&, const ResidualMlp&) = default;
};

ResidualMlp init_residual_mlp(std::size_t in, std::size_t hidden, std::size_t out,
                              std::size_t blocks, nd::SeededRng& rng);

nd::Matrix first_layer(const ResidualMlp& net, const nd::Matrix& x);
nd::Matrix forward_from_first(const ResidualMlp& net, const nd::Matrix& first);
nd::Matrix forward(const ResidualMlp& net, const nd::Matrix& x);

struct TapeForward {
  std::vector<nd::Var> params;  // same order as ResidualMlp::parameters()
  nd::Var out;
};
// Records the same computation as forward() on a tape.
TapeForward forward_on_tape(nd::Tape& tape, const ResidualMlp& net, nd::Var x,
                            bool params_require_grad);

struct GeneratorParams {
  ResidualMlp net;
  std::size_t latent_dim() const { return net.in_dim(); }
  friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

struct CriticParams {
  ResidualMlp net;
  friend bool operator==(const CriticParams&, const CriticParams&) = default;
};

struct Architecture {
  std::size_t latent_dim = 32;
  std::size_t hidden = 256;
  std::size_t blocks = 3;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

GeneratorParams init_generator(const Architecture& arch, nd::SeededRng& rng);
CriticParams init_critic(const Architecture& arch, nd::SeededRng& rng);

LatentVector sample_latent(nd::SeededRng& rng, std::size_t latent_dim);
nd::Matrix sample_latents(nd::SeededRng& rng, std::size_t n, std::size_t latent_dim);

EmbeddingVector generate(const GeneratorParams& g, const LatentVector& z);
nd::Matrix generate_batch(const GeneratorParams& g, const nd::Matrix& z);
std::vector<float> first_layer_activations(const GeneratorParams& g, const LatentVector& z);
EmbeddingVector generate_from_activations(const GeneratorParams& g, std::span<const float> act);
double critic_score(const CriticParams& d, const EmbeddingVector& e);

// SHA-256 over the generator's shapes and weights.
Digest fingerprint(const GeneratorParams& g);

}  // namespace egan::gan
