#include "core/adam.hpp"

#include <cmath>

namespace lintm {

AdamState::AdamState(std::vector<std::size_t> shape, double lr_)
    : first_moment(shape), second_moment(std::move(shape)), lr(lr_) {}

void adam_update(DenseArray& param, const DenseArray& grad, AdamState& state) {
  if (!param.same_shape(grad) || !param.same_shape(state.first_moment)) {
    throw DimensionError("adam_update: shape mismatch");
  }
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, state.step_count);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step_count);
  for (std::size_t i = 0; i < param.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    const double g = grad[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g * g;
    param[i] -= state.lr * (m / bc1) / (std::sqrt(v / bc2) + state.eps);
  }
}

}  // namespace lintm
