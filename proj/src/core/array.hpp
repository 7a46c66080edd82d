#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "core/errors.hpp"

namespace lintm {

// Row-major dense array of doubles, 1-D to 3-D. All model math lives on
// this type; 64-bit precision is required for the finite-difference
// gradient checks to be meaningful.
class DenseArray {
 public:
  DenseArray() = default;
  explicit DenseArray(std::vector<std::size_t> shape);
  DenseArray(std::vector<std::size_t> shape, std::vector<double> data);
  static DenseArray zeros(std::vector<std::size_t> shape) {
    return DenseArray(std::move(shape));
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t ndim() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t d) const { return shape_.at(d); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& flat() { return data_; }
  const std::vector<double>& flat() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at2(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double at2(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& at3(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double at3(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  void fill(double v);
  bool all_finite() const;
  bool same_shape(const DenseArray& other) const { return shape_ == other.shape_; }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Standard matrix product; both operands must be 2-D with inner extents equal.
DenseArray matmul(const DenseArray& a, const DenseArray& b);

// Max-shifted softmax of a 1-D array. Output is a probability vector.
DenseArray softmax(const DenseArray& v);
void softmax_inplace(double* v, std::size_t n);

// log(sum_i exp(v_i)), max-shifted.
double log_sum_exp(const DenseArray& v);
double log_sum_exp(const double* v, std::size_t n);

// Throws NumericError naming `what` if any entry is non-finite.
void require_finite(const DenseArray& a, const char* what);

}  // namespace lintm
