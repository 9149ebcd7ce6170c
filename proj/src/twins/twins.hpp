#pragma once

#include <cstddef>
#include <span>

#include "ndmath/matrix.hpp"
#include "ndmath/rng.hpp"

namespace egan::twins {

inline constexpr double kDefaultLambda = 5e-3;

// T x F sequence of feature frames.
struct FeatureSequence {
  nd::Matrix frames;
};

struct WindowPair {
  nd::Matrix first;  // W x F
  nd::Matrix second;
  std::size_t first_start = 0;
  std::size_t second_start = 0;
};

// Half the sequence, capped at `cap` frames, at least 1.
std::size_t default_window(std::size_t length, std::size_t cap = 64);

// Two independent uniform start positions in [0, T - w]; overlap allowed.
WindowPair sample_window_pair(const FeatureSequence& seq, std::size_t w, nd::SeededRng& rng);

struct TwinsLoss {
  double value = 0.0;
  nd::Matrix grad_a;  // dL/da, n x F
  nd::Matrix grad_b;
};

// Per-dimension standardization over the batch (population variance), then
// C = a^T b / n and L = sum_i (1 - C_ii)^2 + lambda * sum_{i != j} C_ij^2.
double barlow_twins_loss(const nd::Matrix& a, const nd::Matrix& b, double lambda = kDefaultLambda);
TwinsLoss barlow_twins_loss_and_grad(const nd::Matrix& a, const nd::Matrix& b,
                                     double lambda = kDefaultLambda);

double l1_pair_distance(std::span<const float> a, std::span<const float> b);

}  // namespace egan::twins
