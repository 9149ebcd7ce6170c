#pragma once

#include <cstdint>
#include <functional>

#include "common/digest.hpp"
#include "gan/network.hpp"
#include "ndmath/adam.hpp"
#include "ndmath/rng.hpp"

namespace egan::gan {

struct TrainConfig {
  Architecture arch;
  std::size_t batch_size = 64;
  std::uint64_t steps = 2000;
  double lr_generator = 1e-4;
  double lr_critic = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::size_t critic_updates = 1;
  double cost_scale = 64.0;  // K in c_ij = ||x_i - y_j||^2 / (2K)
  std::uint64_t seed = 0;
  std::uint64_t log_interval = 100;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct GanState {
  GeneratorParams gen;
  CriticParams critic;
  nd::AdamState gen_opt;
  nd::AdamState critic_opt;
  std::uint64_t step = 0;

  friend bool operator==(const GanState&, const GanState&) = default;
};

struct Checkpoint {
  TrainConfig config;
  GanState state;
  Digest corpus_fingerprint{};

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct StepMetrics {
  std::uint64_t step = 0;
  double transport_cost = 0.0;
  double critic_loss = 0.0;
  double generator_loss = 0.0;
};

GanState init_state(const TrainConfig& cfg);

// One WGAN-QC update: sample fakes, solve the batch assignment under the
// quadratic cost, regress the critic onto the dual potentials, then move the
// generator up the critic. Throws DivergenceError on a non-finite loss.
StepMetrics train_step(GanState& state, const nd::Matrix& real_batch, const TrainConfig& cfg,
                       nd::SeededRng& rng);

using MetricsSink = std::function<void(const StepMetrics&)>;

// Full training run over the corpus rows. `on_log` receives interval means
// every cfg.log_interval steps; `on_step` (optional) receives every step.
Checkpoint train(const nd::Matrix& corpus, const Digest& corpus_fingerprint,
                 const TrainConfig& cfg, const MetricsSink& on_log = {},
                 const MetricsSink& on_step = {});

}  // namespace egan::gan
