#include "gan/trainer.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "common/error.hpp"
#include "ndmath/tape.hpp"
#include "transport/assignment.hpp"

namespace egan::gan {

namespace {

enum Stream : std::uint64_t { kGenInit = 1, kCriticInit = 2, kTraining = 3 };

std::vector<nd::Matrix*> ptrs(ResidualMlp& net) { return net.parameters(); }

nd::Matrix column(std::span<const float> v) {
  return nd::Matrix(v.size(), 1, std::vector<float>(v.begin(), v.end()));
}

void check_finite(double x, const char* what, std::uint64_t step) {
  if (!std::isfinite(x)) {
    throw DivergenceError(step, std::string("training diverged at step ") + std::to_string(step) +
                                    ": " + what + " is not finite");
  }
}

}  // namespace

void TrainConfig::validate() const {
  require(batch_size >= 2, ErrorKind::kContract, "batch size must be >= 2");
  require(cost_scale > 0.0, ErrorKind::kContract, "cost scale K must be positive");
  require(critic_updates >= 1, ErrorKind::kContract, "critic updates must be >= 1");
  require(lr_generator > 0.0 && lr_critic > 0.0, ErrorKind::kContract,
          "learning rates must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, ErrorKind::kContract,
          "Adam betas must lie in [0, 1)");
  require(arch.latent_dim >= 1 && arch.hidden >= 1, ErrorKind::kContract,
          "latent and hidden widths must be positive");
  require(log_interval >= 1, ErrorKind::kContract, "log interval must be >= 1");
}

GanState init_state(const TrainConfig& cfg) {
  cfg.validate();
  GanState s;
  auto gen_rng = nd::SeededRng::derive(cfg.seed, kGenInit);
  auto critic_rng = nd::SeededRng::derive(cfg.seed, kCriticInit);
  s.gen = init_generator(cfg.arch, gen_rng);
  s.critic = init_critic(cfg.arch, critic_rng);
  const auto gp = s.gen.net.parameters();
  const auto cp = s.critic.net.parameters();
  s.gen_opt = nd::AdamState::for_params(std::vector<const nd::Matrix*>(gp.begin(), gp.end()),
                                        cfg.lr_generator, cfg.beta1, cfg.beta2);
  s.critic_opt = nd::AdamState::for_params(std::vector<const nd::Matrix*>(cp.begin(), cp.end()),
                                           cfg.lr_critic, cfg.beta1, cfg.beta2);
  return s;
}

StepMetrics train_step(GanState& state, const nd::Matrix& real_batch, const TrainConfig& cfg,
                       nd::SeededRng& rng) {
  const std::size_t n = real_batch.rows();
  require(n >= 2, ErrorKind::kContract, "train_step: batch needs at least 2 rows");
  require(real_batch.cols() == kEmbeddingDim, ErrorKind::kShape,
          "train_step: real batch must have 64 columns");
  require(real_batch.all_finite(), ErrorKind::kContract, "train_step: real batch not finite");
  const std::uint64_t step = state.step + 1;
  StepMetrics m;
  m.step = step;

  // Critic: regress onto the assignment duals.
  for (std::size_t c = 0; c < cfg.critic_updates; ++c) {
    const nd::Matrix z = sample_latents(rng, n, state.gen.latent_dim());
    const nd::Matrix fake = generate_batch(state.gen, z);
    const auto cost = transport::cost_matrix(real_batch, fake, cfg.cost_scale);
    const auto plan = transport::solve_assignment(cost);
    const auto targets = transport::critic_targets(plan);
    m.transport_cost = plan.cost;

    nd::Tape tape;
    const nd::Var xr = tape.leaf(real_batch);
    const nd::Var xf = tape.leaf(fake);
    const auto dr = forward_on_tape(tape, state.critic.net, xr, true);
    // Each pass records its own parameter leaves; gradients are summed below.
    const auto df = forward_on_tape(tape, state.critic.net, xf, true);
    const nd::Var loss_r = tape.mse(dr.out, tape.leaf(column(targets.real)));
    const nd::Var loss_f = tape.mse(df.out, tape.leaf(column(targets.fake)));
    const nd::Var loss = tape.add(loss_r, loss_f);
    m.critic_loss = tape.value(loss)(0, 0);
    check_finite(m.critic_loss, "critic loss", step);
    check_finite(m.transport_cost, "transport cost", step);
    tape.backward(loss);
    std::vector<nd::Matrix> grads;
    for (std::size_t i = 0; i < dr.params.size(); ++i)
      grads.push_back(nd::add(tape.grad(dr.params[i]), tape.grad(df.params[i])));
    nd::adam_step(ptrs(state.critic.net), grads, state.critic_opt);
  }

  // Generator: maximize the critic on fresh fakes.
  {
    const nd::Matrix z = sample_latents(rng, n, state.gen.latent_dim());
    nd::Tape tape;
    const auto g = forward_on_tape(tape, state.gen.net, tape.leaf(z), true);
    const auto d = forward_on_tape(tape, state.critic.net, g.out, false);
    const nd::Var loss = tape.scale(tape.mean(d.out), -1.0f);
    m.generator_loss = tape.value(loss)(0, 0);
    check_finite(m.generator_loss, "generator loss", step);
    tape.backward(loss);
    std::vector<nd::Matrix> grads;
    for (const auto& p : g.params) grads.push_back(tape.grad(p));
    nd::adam_step(ptrs(state.gen.net), grads, state.gen_opt);
  }

  state.step = step;
  return m;
}

Checkpoint train(const nd::Matrix& corpus, const Digest& corpus_fingerprint,
                 const TrainConfig& cfg, const MetricsSink& on_log, const MetricsSink& on_step) {
  cfg.validate();
  require(corpus.cols() == kEmbeddingDim, ErrorKind::kShape, "train: corpus dimension must be 64");
  require(corpus.rows() >= cfg.batch_size, ErrorKind::kContract,
          "train: corpus has " + std::to_string(corpus.rows()) + " rows, fewer than batch size " +
              std::to_string(cfg.batch_size));

  Checkpoint ck;
  ck.config = cfg;
  ck.corpus_fingerprint = corpus_fingerprint;
  ck.state = init_state(cfg);

  auto rng = nd::SeededRng::derive(cfg.seed, kTraining);
  std::vector<std::size_t> order(corpus.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  StepMetrics acc;
  std::uint64_t in_window = 0;

  for (std::uint64_t s = 0; s < cfg.steps; ++s) {
    // Partial Fisher-Yates: the first batch_size slots become a uniform sample
    // without replacement.
    for (std::size_t i = 0; i < cfg.batch_size; ++i) {
      const std::size_t j = i + rng.uniform_index(order.size() - i);
      std::swap(order[i], order[j]);
    }
    const nd::Matrix batch =
        nd::gather_rows(corpus, std::span<const std::size_t>(order.data(), cfg.batch_size));
    const StepMetrics m = train_step(ck.state, batch, cfg, rng);
    if (on_step) on_step(m);
    acc.transport_cost += m.transport_cost;
    acc.critic_loss += m.critic_loss;
    acc.generator_loss += m.generator_loss;
    ++in_window;
    if (m.step % cfg.log_interval == 0 || s + 1 == cfg.steps) {
      const double k = static_cast<double>(in_window);
      if (on_log)
        on_log({m.step, acc.transport_cost / k, acc.critic_loss / k, acc.generator_loss / k});
      acc = {};
      in_window = 0;
    }
  }
  return ck;
}

}  // namespace egan::gan
