#include "ndmath/adam.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace egan::nd {

AdamState AdamState::for_params(std::span<const Matrix* const> params, double lr, double beta1,
                                double beta2, double epsilon) {
  AdamState s;
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  for (const Matrix* p : params) {
    s.m.emplace_back(p->rows(), p->cols());
    s.v.emplace_back(p->rows(), p->cols());
  }
  return s;
}

void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state) {
  require(params.size() == grads.size() && params.size() == state.m.size() &&
              params.size() == state.v.size(),
          ErrorKind::kShape, "adam_step: parameter/gradient/state counts differ");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i]->same_shape(grads[i]) && params[i]->same_shape(state.m[i]) &&
                params[i]->same_shape(state.v[i]),
            ErrorKind::kShape, "adam_step: shape mismatch for parameter " + std::to_string(i));
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const auto b1 = static_cast<float>(state.beta1), b2 = static_cast<float>(state.beta2);
  const auto step_size = static_cast<float>(state.lr / c1);
  const auto inv_sqrt_c2 = static_cast<float>(1.0 / std::sqrt(c2));
  const auto eps = static_cast<float>(state.epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    float* __restrict p = params[i]->data();
    const float* __restrict g = grads[i].data();
    float* __restrict m = state.m[i].data();
    float* __restrict v = state.v[i].data();
    const std::size_t len = params[i]->size();
    for (std::size_t j = 0; j < len; ++j) {
      const float gj = g[j];
      m[j] = b1 * m[j] + (1.0f - b1) * gj;
      v[j] = b2 * v[j] + (1.0f - b2) * gj * gj;
      p[j] -= step_size * m[j] / (std::sqrt(v[j]) * inv_sqrt_c2 + eps);
    }
  }
}

}  // namespace egan::nd
