#include "gan/checkpoint.hpp"

#include <string>

#include "common/binio.hpp"
#include "common/error.hpp"

namespace egan::gan {

namespace {

constexpr std::uint32_t kMaxWidth = 1u << 16;
constexpr std::uint32_t kMaxBlocks = 64;

void write_matrix(ByteWriter& w, const nd::Matrix& m) {
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  w.f32s(m.values());
}

nd::Matrix read_matrix(ByteReader& r, std::size_t rows, std::size_t cols, const char* what) {
  const std::uint32_t rr = r.u32();
  const std::uint32_t cc = r.u32();
  if (rr != rows || cc != cols) {
    r.bad(std::string(what) + " has shape " + std::to_string(rr) + "x" + std::to_string(cc) +
          ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  nd::Matrix m(rows, cols);
  r.f32s(m.values());
  if (!m.all_finite()) r.bad(std::string(what) + " contains non-finite values");
  return m;
}

void write_net(ByteWriter& w, const ResidualMlp& net) {
  for (const nd::Matrix* p : net.parameters()) write_matrix(w, *p);
}

// Reads into a network of known architecture so every shape is checked.
ResidualMlp read_net(ByteReader& r, std::size_t in, std::size_t hidden, std::size_t out,
                     std::size_t blocks) {
  ResidualMlp net;
  net.input = {nd::Matrix(in, hidden), nd::Matrix(1, hidden)};
  net.blocks.resize(blocks);
  for (auto& b : net.blocks) {
    b.first = {nd::Matrix(hidden, hidden), nd::Matrix(1, hidden)};
    b.second = {nd::Matrix(hidden, hidden), nd::Matrix(1, hidden)};
  }
  net.output = {nd::Matrix(hidden, out), nd::Matrix(1, out)};
  for (nd::Matrix* p : net.parameters()) *p = read_matrix(r, p->rows(), p->cols(), "parameter");
  return net;
}

void write_adam(ByteWriter& w, const nd::AdamState& s) {
  w.f64(s.lr);
  w.f64(s.beta1);
  w.f64(s.beta2);
  w.f64(s.epsilon);
  w.u64(s.step);
  w.u32(static_cast<std::uint32_t>(s.m.size()));
  for (const auto& m : s.m) write_matrix(w, m);
  for (const auto& v : s.v) write_matrix(w, v);
}

nd::AdamState read_adam(ByteReader& r, const ResidualMlp& like) {
  nd::AdamState s;
  s.lr = r.f64();
  s.beta1 = r.f64();
  s.beta2 = r.f64();
  s.epsilon = r.f64();
  s.step = r.u64();
  const auto params = like.parameters();
  if (r.u32() != params.size()) r.bad("optimizer state count does not match parameters");
  for (const auto* p : params) s.m.push_back(read_matrix(r, p->rows(), p->cols(), "adam moment"));
  for (const auto* p : params) s.v.push_back(read_matrix(r, p->rows(), p->cols(), "adam moment"));
  return s;
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ck) {
  const TrainConfig& c = ck.config;
  ByteWriter w;
  w.magic("EGAN");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(c.arch.latent_dim));
  w.u32(static_cast<std::uint32_t>(c.arch.hidden));
  w.u32(static_cast<std::uint32_t>(c.arch.blocks));
  w.u32(static_cast<std::uint32_t>(c.batch_size));
  w.u32(static_cast<std::uint32_t>(c.critic_updates));
  w.u64(c.steps);
  w.u64(c.seed);
  w.u64(c.log_interval);
  w.f64(c.lr_generator);
  w.f64(c.lr_critic);
  w.f64(c.beta1);
  w.f64(c.beta2);
  w.f64(c.cost_scale);
  write_net(w, ck.state.gen.net);
  write_net(w, ck.state.critic.net);
  write_adam(w, ck.state.gen_opt);
  write_adam(w, ck.state.critic_opt);
  w.u64(ck.state.step);
  w.bytes(ck.corpus_fingerprint);
  w.seal();
  return w.take();
}

Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes) {
  const auto content = unseal(bytes, "checkpoint");
  ByteReader r(content, "checkpoint");
  r.expect_magic("EGAN");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) r.bad("unsupported version " + std::to_string(version));

  Checkpoint ck;
  TrainConfig& c = ck.config;
  const std::uint32_t latent = r.u32(), hidden = r.u32(), blocks = r.u32();
  if (latent == 0 || hidden == 0 || latent > kMaxWidth || hidden > kMaxWidth || blocks > kMaxBlocks)
    r.bad("implausible architecture");
  c.arch = {latent, hidden, blocks};
  c.batch_size = r.u32();
  c.critic_updates = r.u32();
  c.steps = r.u64();
  c.seed = r.u64();
  c.log_interval = r.u64();
  c.lr_generator = r.f64();
  c.lr_critic = r.f64();
  c.beta1 = r.f64();
  c.beta2 = r.f64();
  c.cost_scale = r.f64();
  try {
    c.validate();
  } catch (const Error& e) {
    r.bad(std::string("invalid config block: ") + e.what());
  }
  // Parameter payload must fit before anything large is allocated.
  const std::uint64_t per_net =
      std::uint64_t{hidden} * (latent + 1 + kEmbeddingDim + 1 + 2 * blocks * (hidden + 1));
  r.need(per_net * 4, "parameters");

  ck.state.gen.net = read_net(r, latent, hidden, kEmbeddingDim, blocks);
  ck.state.critic.net = read_net(r, kEmbeddingDim, hidden, 1, blocks);
  ck.state.gen_opt = read_adam(r, ck.state.gen.net);
  ck.state.critic_opt = read_adam(r, ck.state.critic.net);
  ck.state.step = r.u64();
  ck.corpus_fingerprint = r.digest();
  r.expect_end();
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(ck));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace egan::gan
