#include "core/array.hpp"

#include <algorithm>
#include <numeric>

namespace lintm {

namespace {
std::size_t checked_product(const std::vector<std::size_t>& shape) {
  if (shape.empty() || shape.size() > 3) {
    throw DimensionError("DenseArray supports 1 to 3 dimensions");
  }
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}
}  // namespace

DenseArray::DenseArray(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(checked_product(shape_), 0.0) {}

DenseArray::DenseArray(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (checked_product(shape_) != data_.size()) {
    throw DimensionError("DenseArray: shape does not match data length");
  }
}

void DenseArray::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool DenseArray::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

DenseArray matmul(const DenseArray& a, const DenseArray& b) {
  if (a.ndim() != 2 || b.ndim() != 2) {
    throw DimensionError("matmul: operands must be 2-D");
  }
  if (a.extent(1) != b.extent(0)) {
    throw DimensionError("matmul: inner extents differ");
  }
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
  DenseArray out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a.at2(i, p);
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        out.at2(i, j) += aip * b.at2(p, j);
      }
    }
  }
  return out;
}

void softmax_inplace(double* v, std::size_t n) {
  if (n == 0) throw DimensionError("softmax: empty input");
  double mx = v[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, v[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::exp(v[i] - mx);
    sum += v[i];
  }
  for (std::size_t i = 0; i < n; ++i) v[i] /= sum;
}

DenseArray softmax(const DenseArray& v) {
  if (v.ndim() != 1) throw DimensionError("softmax: expected 1-D input");
  DenseArray out = v;
  softmax_inplace(out.data(), out.size());
  return out;
}

double log_sum_exp(const double* v, std::size_t n) {
  if (n == 0) throw DimensionError("log_sum_exp: empty input");
  double mx = v[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, v[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(v[i] - mx);
  return mx + std::log(sum);
}

double log_sum_exp(const DenseArray& v) {
  if (v.ndim() != 1) throw DimensionError("log_sum_exp: expected 1-D input");
  return log_sum_exp(v.data(), v.size());
}

void require_finite(const DenseArray& a, const char* what) {
  if (!a.all_finite()) {
    throw NumericError(std::string("non-finite values in ") + what);
  }
}

}  // namespace lintm
