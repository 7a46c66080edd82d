#pragma once

#include <functional>

#include "core/array.hpp"

namespace lintm {

// Central-difference gradient of a scalar function, coordinate by
// coordinate. The independent oracle for every analytic gradient in the
// models.
inline DenseArray finite_diff_grad(const std::function<double(const DenseArray&)>& f,
                                   const DenseArray& x, double h = 1e-5) {
  DenseArray g(x.shape());
  DenseArray xp = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = xp[i];
    xp[i] = orig + h;
    const double fp = f(xp);
    xp[i] = orig - h;
    const double fm = f(xp);
    xp[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Relative error with the denominator floored, as used by the gradient
// acceptance suite.
inline double grad_rel_err(double analytic, double numeric) {
  const double denom = std::max(1e-8, std::abs(analytic) + std::abs(numeric));
  return std::abs(analytic - numeric) / denom;
}

}  // namespace lintm
