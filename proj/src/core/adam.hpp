#pragma once

#include "core/array.hpp"

namespace lintm {

// Per-parameter Adam state with the usual bias correction.
struct AdamState {
  DenseArray first_moment;
  DenseArray second_moment;
  long step_count = 0;
  double lr = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::vector<std::size_t> shape, double lr);
};

// One Adam step in place; `state` must have been built for `param`'s shape.
void adam_update(DenseArray& param, const DenseArray& grad, AdamState& state);

}  // namespace lintm
