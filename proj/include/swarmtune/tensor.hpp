#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "swarmtune/errors.hpp"

namespace swarmtune {

inline std::size_t shape_product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

// Dense row-major array of doubles with an explicit shape. A default-constructed
// tensor is empty; assign a shaped one over it before use.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape)
      : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

  Tensor(std::vector<std::size_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_product(shape_)) {
      throw DimensionError("tensor data length does not match shape product");
    }
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Debug-build guard: every element produced by a forward/backward pass must be
// finite. Compiled out under NDEBUG.
inline void debug_check_finite([[maybe_unused]] const Tensor& t,
                               [[maybe_unused]] const char* context) {
#ifndef NDEBUG
  for (double v : t.values()) {
    assert(std::isfinite(v) && context);
  }
#endif
}

}  // namespace swarmtune
