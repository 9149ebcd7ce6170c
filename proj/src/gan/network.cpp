#include "gan/network.hpp"

#include <cmath>
#include <string>

#include "common/binio.hpp"
#include "common/error.hpp"

namespace egan::gan {

namespace {

Dense init_dense(std::size_t in, std::size_t out, double stddev, nd::SeededRng& rng) {
  return Dense{rng.normal_matrix(in, out, stddev), nd::Matrix(1, out)};
}

void check_dense(const Dense& d, std::size_t in, const char* name) {
  require(d.w.rows() == in && d.b.rows() == 1 && d.b.cols() == d.w.cols(), ErrorKind::kShape,
          std::string("layer ") + name + " does not chain: expected input width " +
              std::to_string(in) + ", got " + std::to_string(d.w.rows()) + "x" +
              std::to_string(d.w.cols()));
}

nd::Matrix row_of(std::span<const float> v) { return nd::Matrix::row_vector(v); }

}  // namespace

std::vector<nd::Matrix*> ResidualMlp::parameters() {
  std::vector<nd::Matrix*> p{&input.w, &input.b};
  for (auto& blk : blocks) {
    p.push_back(&blk.first.w);
    p.push_back(&blk.first.b);
    p.push_back(&blk.second.w);
    p.push_back(&blk.second.b);
  }
  p.push_back(&output.w);
  p.push_back(&output.b);
  return p;
}

std::vector<const nd::Matrix*> ResidualMlp::parameters() const {
  auto p = const_cast<ResidualMlp*>(this)->parameters();
  return {p.begin(), p.end()};
}

void ResidualMlp::validate() const {
  check_dense(input, input.w.rows(), "input");
  const std::size_t h = hidden();
  for (const auto& blk : blocks) {
    check_dense(blk.first, h, "block.first");
    check_dense(blk.second, blk.first.w.cols(), "block.second");
    require(blk.second.w.cols() == h, ErrorKind::kShape, "residual block must map h -> h");
  }
  check_dense(output, h, "output");
}

ResidualMlp init_residual_mlp(std::size_t in, std::size_t hidden, std::size_t out,
                              std::size_t blocks, nd::SeededRng& rng) {
  require(in >= 1 && hidden >= 1 && out >= 1, ErrorKind::kContract,
          "network dimensions must be positive");
  ResidualMlp net;
  net.input = init_dense(in, hidden, std::sqrt(2.0 / static_cast<double>(in)), rng);
  const double block_std = std::sqrt(2.0 / static_cast<double>(hidden));
  // Second layers start small so each block begins near the identity.
  const double branch_scale = 1.0 / std::sqrt(2.0 * static_cast<double>(std::max<std::size_t>(blocks, 1)));
  for (std::size_t i = 0; i < blocks; ++i) {
    ResBlock blk;
    blk.first = init_dense(hidden, hidden, block_std, rng);
    blk.second = init_dense(hidden, hidden, block_std * branch_scale, rng);
    net.blocks.push_back(std::move(blk));
  }
  net.output = init_dense(hidden, out, std::sqrt(1.0 / static_cast<double>(hidden)), rng);
  return net;
}

nd::Matrix first_layer(const ResidualMlp& net, const nd::Matrix& x) {
  require(x.cols() == net.in_dim(), ErrorKind::kShape,
          "network input width " + std::to_string(x.cols()) + " != " +
              std::to_string(net.in_dim()));
  return nd::leaky_relu(nd::add_row(nd::matmul(x, net.input.w), net.input.b), nd::kLeakySlope);
}

nd::Matrix forward_from_first(const ResidualMlp& net, const nd::Matrix& first) {
  require(first.cols() == net.hidden(), ErrorKind::kShape,
          "activation width " + std::to_string(first.cols()) + " != " +
              std::to_string(net.hidden()));
  nd::Matrix h = first;
  for (const auto& blk : net.blocks) {
    nd::Matrix t = nd::leaky_relu(nd::add_row(nd::matmul(h, blk.first.w), blk.first.b),
                                  nd::kLeakySlope);
    h = nd::add(h, nd::add_row(nd::matmul(t, blk.second.w), blk.second.b));
  }
  return nd::add_row(nd::matmul(h, net.output.w), net.output.b);
}

nd::Matrix forward(const ResidualMlp& net, const nd::Matrix& x) {
  return forward_from_first(net, first_layer(net, x));
}

TapeForward forward_on_tape(nd::Tape& tape, const ResidualMlp& net, nd::Var x,
                            bool params_require_grad) {
  require(tape.value(x).cols() == net.in_dim(), ErrorKind::kShape, "network input width mismatch");
  TapeForward f;
  for (const nd::Matrix* p : net.parameters()) f.params.push_back(tape.leaf(*p, params_require_grad));
  std::size_t k = 0;
  auto next = [&] { return f.params[k++]; };
  auto dense = [&](nd::Var in) {
    const nd::Var w = next();
    const nd::Var b = next();
    return tape.add_row(tape.matmul(in, w), b);
  };
  nd::Var h = tape.leaky_relu(dense(x), nd::kLeakySlope);
  for (std::size_t i = 0; i < net.blocks.size(); ++i) {
    const nd::Var t = tape.leaky_relu(dense(h), nd::kLeakySlope);
    h = tape.add(h, dense(t));
  }
  f.out = dense(h);
  return f;
}

GeneratorParams init_generator(const Architecture& arch, nd::SeededRng& rng) {
  return {init_residual_mlp(arch.latent_dim, arch.hidden, kEmbeddingDim, arch.blocks, rng)};
}

CriticParams init_critic(const Architecture& arch, nd::SeededRng& rng) {
  return {init_residual_mlp(kEmbeddingDim, arch.hidden, 1, arch.blocks, rng)};
}

LatentVector sample_latent(nd::SeededRng& rng, std::size_t latent_dim) {
  require(latent_dim >= 1, ErrorKind::kContract, "sample_latent: latent dimension must be >= 1");
  LatentVector z;
  z.values.resize(latent_dim);
  for (auto& x : z.values) x = static_cast<float>(rng.normal());
  return z;
}

nd::Matrix sample_latents(nd::SeededRng& rng, std::size_t n, std::size_t latent_dim) {
  require(latent_dim >= 1, ErrorKind::kContract, "sample_latents: latent dimension must be >= 1");
  return rng.normal_matrix(n, latent_dim);
}

EmbeddingVector generate(const GeneratorParams& g, const LatentVector& z) {
  const nd::Matrix out = forward(g.net, row_of(z.values));
  return {{out.values().begin(), out.values().end()}};
}

nd::Matrix generate_batch(const GeneratorParams& g, const nd::Matrix& z) { return forward(g.net, z); }

std::vector<float> first_layer_activations(const GeneratorParams& g, const LatentVector& z) {
  const nd::Matrix a = first_layer(g.net, row_of(z.values));
  return {a.values().begin(), a.values().end()};
}

EmbeddingVector generate_from_activations(const GeneratorParams& g, std::span<const float> act) {
  const nd::Matrix out = forward_from_first(g.net, row_of(act));
  return {{out.values().begin(), out.values().end()}};
}

double critic_score(const CriticParams& d, const EmbeddingVector& e) {
  require(e.values.size() == d.net.in_dim(), ErrorKind::kShape,
          "critic_score: embedding length " + std::to_string(e.values.size()) + " != " +
              std::to_string(d.net.in_dim()));
  return forward(d.net, row_of(e.values))(0, 0);
}

Digest fingerprint(const GeneratorParams& g) {
  ByteWriter w;
  w.magic("GENFP");
  for (const nd::Matrix* p : g.net.parameters()) {
    w.u32(static_cast<std::uint32_t>(p->rows()));
    w.u32(static_cast<std::uint32_t>(p->cols()));
    w.f32s(p->values());
  }
  return sha256(w.buffer());
}

}  // namespace egan::gan
