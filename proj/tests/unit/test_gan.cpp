#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "common/digest.hpp"
#include "gan/checkpoint.hpp"
#include "gan/network.hpp"
#include "gan/trainer.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "transport/assignment.hpp"

using egan::ErrorKind;
using egan::nd::Matrix;
using egan::nd::SeededRng;
namespace gan = egan::gan;

namespace {

gan::GeneratorParams small_generator(std::uint64_t seed, std::size_t dz = 4, std::size_t h = 8) {
  SeededRng rng(seed);
  return gan::init_generator({dz, h, 2}, rng);
}

gan::TrainConfig tiny_config() {
  gan::TrainConfig cfg;
  cfg.arch = {8, 32, 2};
  cfg.batch_size = 16;
  cfg.steps = 20;
  cfg.log_interval = 5;
  cfg.seed = 3;
  return cfg;
}

// Two well separated blobs in 64 dims.
Matrix blob_corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Matrix x = oracle::random_matrix(n, 64, gen, 0.3);
  for (std::size_t i = 0; i < n; ++i) x(i, 0) += i % 2 == 0 ? 2.0f : -2.0f;
  return x;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_SUITE("gan.sampling") {
  TEST_CASE("fixed seed reproduces the latent, different seeds differ") {
    SeededRng a(9), b(9), c(10);
    const auto za = gan::sample_latent(a, 32);
    CHECK(za.values == gan::sample_latent(b, 32).values);
    CHECK(za.values != gan::sample_latent(c, 32).values);
  }

  TEST_CASE("components are standard normal") {
    SeededRng rng(1);
    const std::size_t draws = 100000, d = 8;
    std::vector<double> s(d, 0.0), s2(d, 0.0);
    for (std::size_t i = 0; i < draws; ++i) {
      const auto z = gan::sample_latent(rng, d);
      for (std::size_t j = 0; j < d; ++j) {
        s[j] += z.values[j];
        s2[j] += double{z.values[j]} * z.values[j];
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double mean = s[j] / draws, var = s2[j] / draws - mean * mean;
      CHECK(std::abs(mean) < 0.02);
      CHECK((var > 0.95 && var < 1.05));
    }
  }

  TEST_CASE("zero latent dimension is a contract error") {
    SeededRng rng(1);
    CHECK_ERROR_KIND(gan::sample_latent(rng, 0), ErrorKind::kContract);
  }
}

TEST_SUITE("gan.network") {
  TEST_CASE("generate is deterministic") {
    const auto g = small_generator(1);
    SeededRng rng(2);
    const auto z = gan::sample_latent(rng, 4);
    CHECK(gan::generate(g, z).values == gan::generate(g, z).values);
    CHECK(gan::generate(g, z).values.size() == gan::kEmbeddingDim);
  }

  TEST_CASE("zero output layer gives the zero vector") {
    auto g = small_generator(1);
    std::fill(g.net.output.w.values().begin(), g.net.output.w.values().end(), 0.0f);
    std::fill(g.net.output.b.values().begin(), g.net.output.b.values().end(), 0.0f);
    SeededRng rng(3);
    for (int i = 0; i < 5; ++i) {
      const auto e = gan::generate(g, gan::sample_latent(rng, 4));
      for (float v : e.values) CHECK(v == 0.0f);
    }
  }

  TEST_CASE("wrong latent length is a shape error") {
    const auto g = small_generator(1);
    CHECK_ERROR_KIND(gan::generate(g, gan::LatentVector{std::vector<float>(5)}), ErrorKind::kShape);
    CHECK_ERROR_KIND(gan::first_layer_activations(g, gan::LatentVector{std::vector<float>(3)}),
                     ErrorKind::kShape);
  }

  TEST_CASE("generate is a function of the first-layer activation") {
    const auto g = small_generator(4);
    SeededRng rng(5);
    const auto z = gan::sample_latent(rng, 4);
    const auto act = gan::first_layer_activations(g, z);
    CHECK(gan::generate_from_activations(g, act).values == gan::generate(g, z).values);
  }

  TEST_CASE("zero input layer gives zero activation") {
    auto g = small_generator(4);
    std::fill(g.net.input.w.values().begin(), g.net.input.w.values().end(), 0.0f);
    std::fill(g.net.input.b.values().begin(), g.net.input.b.values().end(), 0.0f);
    SeededRng rng(6);
    for (float v : gan::first_layer_activations(g, gan::sample_latent(rng, 4))) CHECK(v == 0.0f);
  }

  TEST_CASE("first-layer activation equals the layer formula") {
    const auto g = small_generator(7);
    SeededRng rng(8);
    const auto z = gan::sample_latent(rng, 4);
    const auto act = gan::first_layer_activations(g, z);
    for (std::size_t j = 0; j < act.size(); ++j) {
      double s = g.net.input.b(0, j);
      for (std::size_t i = 0; i < 4; ++i) s += double{z.values[i]} * g.net.input.w(i, j);
      CHECK(act[j] == doctest::Approx(oracle::leaky(s)).epsilon(1e-5).scale(1.0));
    }
  }

  TEST_CASE("zero block weights make every block the identity") {
    auto g = small_generator(9);
    for (auto& blk : g.net.blocks)
      for (Matrix* m : {&blk.first.w, &blk.first.b, &blk.second.w, &blk.second.b})
        std::fill(m->values().begin(), m->values().end(), 0.0f);
    SeededRng rng(10);
    const auto z = gan::sample_latent(rng, 4);
    const auto act = gan::first_layer_activations(g, z);
    const auto e = gan::generate(g, z);
    for (std::size_t k = 0; k < 64; ++k) {
      double s = g.net.output.b(0, k);
      for (std::size_t j = 0; j < act.size(); ++j) s += double{act[j]} * g.net.output.w(j, k);
      CHECK(e.values[k] == doctest::Approx(s).epsilon(1e-5).scale(1.0));
    }
  }

  TEST_CASE("large finite inputs give finite outputs") {
    const auto g = small_generator(11);
    gan::LatentVector z{{1e4f, -1e4f, 3e3f, -7e3f}};
    for (float v : gan::generate(g, z).values) CHECK(std::isfinite(v));
  }

  TEST_CASE("critic score is deterministic and zero for a zero critic") {
    SeededRng rng(12);
    auto d = gan::init_critic({4, 8, 2}, rng);
    gan::EmbeddingVector e{std::vector<float>(64, 0.5f)};
    CHECK(gan::critic_score(d, e) == gan::critic_score(d, e));
    for (Matrix* m : d.net.parameters()) std::fill(m->values().begin(), m->values().end(), 0.0f);
    CHECK(gan::critic_score(d, e) == 0.0);
    CHECK_ERROR_KIND(gan::critic_score(d, gan::EmbeddingVector{std::vector<float>(63)}), ErrorKind::kShape);
  }

  TEST_CASE("fingerprint tracks the weights") {
    auto g = small_generator(13);
    const auto f = gan::fingerprint(g);
    CHECK(f == gan::fingerprint(small_generator(13)));
    g.net.output.b(0, 0) += 1.0f;
    CHECK(f != gan::fingerprint(g));
  }
}

TEST_SUITE("gan.train_step") {
  TEST_CASE("n = 2 transport cost is the cheaper of the two assignments") {
    auto cfg = tiny_config();
    auto state = gan::init_state(cfg);
    const Matrix real = blob_corpus(2, 1);
    SeededRng rng(21), mirror(21);
    const Matrix fake = gan::generate_batch(state.gen, gan::sample_latents(mirror, 2, cfg.arch.latent_dim));
    auto c = [&](std::size_t i, std::size_t j) {
      double s = 0.0;
      for (std::size_t t = 0; t < 64; ++t) s += (double{real(i, t)} - fake(j, t)) * (double{real(i, t)} - fake(j, t));
      return s / (2.0 * cfg.cost_scale);
    };
    const double want = std::min(c(0, 0) + c(1, 1), c(0, 1) + c(1, 0)) / 2.0;
    const auto m = gan::train_step(state, real, cfg, rng);
    CHECK(m.transport_cost == doctest::Approx(want).epsilon(1e-9));
    CHECK(state.step == 1);
  }

  TEST_CASE("real batch equal to the fakes costs zero") {
    auto cfg = tiny_config();
    auto state = gan::init_state(cfg);
    SeededRng rng(22), mirror(22);
    const Matrix fake = gan::generate_batch(state.gen, gan::sample_latents(mirror, 8, cfg.arch.latent_dim));
    // Shuffled copy: zero cost under some permutation.
    const std::vector<std::size_t> perm{7, 2, 5, 0, 1, 6, 3, 4};
    const auto m = gan::train_step(state, egan::nd::gather_rows(fake, perm), cfg, rng);
    CHECK(m.transport_cost == 0.0);
  }

  TEST_CASE("one critic update shrinks the gap to the dual targets on a frozen batch") {
    auto cfg = tiny_config();
    cfg.lr_critic = 1e-3;
    auto state = gan::init_state(cfg);
    const Matrix real = blob_corpus(16, 2);
    SeededRng rng(23), mirror(23);
    const Matrix fake = gan::generate_batch(state.gen, gan::sample_latents(mirror, 16, cfg.arch.latent_dim));
    const auto targets = egan::transport::critic_targets(
        egan::transport::solve_assignment(egan::transport::cost_matrix(real, fake, cfg.cost_scale)));
    auto loss = [&](const gan::CriticParams& d) {
      const Matrix dr = gan::forward(d.net, real), df = gan::forward(d.net, fake);
      double s = 0.0;
      for (std::size_t i = 0; i < 16; ++i) {
        s += (dr(i, 0) - double{targets.real[i]}) * (dr(i, 0) - double{targets.real[i]}) / 16.0;
        s += (df(i, 0) - double{targets.fake[i]}) * (df(i, 0) - double{targets.fake[i]}) / 16.0;
      }
      return s;
    };
    const double before = loss(state.critic);
    const auto m = gan::train_step(state, real, cfg, rng);
    CHECK(m.critic_loss == doctest::Approx(before).epsilon(1e-5));
    CHECK(loss(state.critic) < before);
  }

  TEST_CASE("non-finite real batch is rejected, divergence carries the step") {
    auto cfg = tiny_config();
    auto state = gan::init_state(cfg);
    Matrix bad = blob_corpus(4, 3);
    bad(1, 1) = NAN;
    SeededRng rng(1);
    CHECK_ERROR_KIND(gan::train_step(state, bad, cfg, rng), ErrorKind::kContract);

    cfg.lr_generator = cfg.lr_critic = 1e30;
    cfg.steps = 50;
    bool diverged = false;
    try {
      gan::train(blob_corpus(64, 4), {}, cfg);
    } catch (const egan::DivergenceError& e) {
      diverged = true;
      CHECK(e.step() >= 1);
      CHECK(std::string(e.what()).find(std::to_string(e.step())) != std::string::npos);
    }
    CHECK(diverged);
  }
}

TEST_SUITE("gan.train") {
  TEST_CASE("same seed gives bit-identical checkpoints") {
    const Matrix corpus = blob_corpus(64, 5);
    const auto a = gan::train(corpus, {}, tiny_config());
    const auto b = gan::train(corpus, {}, tiny_config());
    CHECK(a == b);
    CHECK(gan::serialize_checkpoint(a) == gan::serialize_checkpoint(b));
    auto other = tiny_config();
    other.seed = 4;
    CHECK(!(gan::train(corpus, {}, other) == a));
  }

  TEST_CASE("zero steps returns the initialization") {
    auto cfg = tiny_config();
    cfg.steps = 0;
    const auto ck = gan::train(blob_corpus(64, 6), {}, cfg);
    CHECK(ck.state == gan::init_state(cfg));
  }

  TEST_CASE("metrics arrive once per log interval and at the end") {
    auto cfg = tiny_config();
    cfg.steps = 23;
    std::vector<std::uint64_t> logged;
    std::size_t per_step = 0;
    gan::train(blob_corpus(64, 7), {}, cfg, [&](const gan::StepMetrics& m) { logged.push_back(m.step); },
               [&](const gan::StepMetrics&) { ++per_step; });
    CHECK(logged == std::vector<std::uint64_t>{5, 10, 15, 20, 23});
    CHECK(per_step == 23);
  }

  TEST_CASE("corpus smaller than a batch is a contract error") {
    CHECK_ERROR_KIND(gan::train(blob_corpus(8, 8), {}, tiny_config()), ErrorKind::kContract);
    CHECK_ERROR_KIND(gan::train(Matrix(64, 10), {}, tiny_config()), ErrorKind::kShape);
  }

  TEST_CASE("invalid configs are contract errors") {
    auto cfg = tiny_config();
    cfg.batch_size = 1;
    CHECK_ERROR_KIND(cfg.validate(), ErrorKind::kContract);
    cfg = tiny_config();
    cfg.cost_scale = 0.0;
    CHECK_ERROR_KIND(cfg.validate(), ErrorKind::kContract);
  }

  TEST_CASE("transport cost trends down over a toy run") {
    auto cfg = tiny_config();
    cfg.steps = 600;
    cfg.lr_generator = cfg.lr_critic = 5e-4;
    std::vector<double> tc;
    gan::train(blob_corpus(256, 9), {}, cfg, {}, [&](const gan::StepMetrics& m) { tc.push_back(m.transport_cost); });
    const std::vector<double> first(tc.begin(), tc.begin() + 100), last(tc.end() - 100, tc.end());
    CHECK(median(last) < median(first));
    for (double v : tc) CHECK(v >= 0.0);
  }
}

TEST_SUITE("gan.checkpoint") {
  TEST_CASE("round trip is bit-exact") {
    auto cfg = tiny_config();
    cfg.steps = 3;
    const auto ck = gan::train(blob_corpus(64, 10), egan::sha256(std::vector<std::uint8_t>{1, 2, 3}), cfg);
    const auto bytes = gan::serialize_checkpoint(ck);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "EGAN");
    const auto back = gan::parse_checkpoint(bytes);
    CHECK(back == ck);
    CHECK(gan::serialize_checkpoint(back) == bytes);

    const auto dir = support::temp_dir("ckpt");
    gan::save_checkpoint(ck, dir / "a.egan");
    CHECK(gan::load_checkpoint(dir / "a.egan") == ck);
  }

  TEST_CASE("truncation and corruption are format errors") {
    auto cfg = tiny_config();
    cfg.steps = 1;
    const auto bytes = gan::serialize_checkpoint(gan::train(blob_corpus(64, 11), {}, cfg));
    for (std::size_t cut : {std::size_t{0}, std::size_t{3}, bytes.size() / 2, bytes.size() - 1}) {
      const std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
      CHECK_ERROR_KIND(gan::parse_checkpoint(t), ErrorKind::kFormat);
    }
    auto flipped = bytes;
    flipped[bytes.size() / 3] ^= 0x10;
    CHECK_ERROR_KIND(gan::parse_checkpoint(flipped), ErrorKind::kFormat);
  }

  TEST_CASE("missing file is an io error") {
    CHECK_ERROR_KIND(gan::load_checkpoint("/nonexistent/dir/x.egan"), ErrorKind::kIo);
  }
}
