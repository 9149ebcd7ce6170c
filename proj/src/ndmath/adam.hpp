#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ndmath/matrix.hpp"

namespace egan::nd {

struct AdamState {
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;

  // Zero moments shaped like the given parameters.
  static AdamState for_params(std::span<const Matrix* const> params, double lr, double beta1,
                              double beta2, double epsilon = 1e-8);

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected Adam update, applied in place.
void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state);

}  // namespace egan::nd
