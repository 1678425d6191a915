#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "audiossl/error.hpp"

namespace audiossl {

// Dense row-major tensor of up to 4 dimensions. Hot loops operate on the raw
// data() pointer; the indexing operators are for setup and tests.
template <class T>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::initializer_list<std::size_t> shape) { reset(shape); }

  explicit Tensor(const std::vector<std::size_t>& shape) {
    reset(shape.begin(), shape.end());
  }

  void reset(std::initializer_list<std::size_t> shape) {
    reset(shape.begin(), shape.end());
  }

  template <class It>
  void reset(It first, It last) {
    ndim_ = 0;
    std::size_t n = 1;
    for (It it = first; it != last; ++it) {
      if (ndim_ >= 4) throw ShapeError("Tensor supports at most 4 dimensions");
      dims_[ndim_++] = *it;
      n *= *it;
    }
    for (int i = ndim_; i < 4; ++i) dims_[i] = 1;
    data_.assign(n, T(0));
  }

  int ndim() const { return ndim_; }
  std::size_t dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& operator()(std::size_t i) { return data_[i]; }
  const T& operator()(std::size_t i) const { return data_[i]; }
  T& operator()(std::size_t i, std::size_t j) {
    return data_[i * dims_[1] + j];
  }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * dims_[1] + j];
  }
  T& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  T& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return data_[((i * dims_[1] + j) * dims_[2] + k) * dims_[3] + l];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k,
                      std::size_t l) const {
    return data_[((i * dims_[1] + j) * dims_[2] + k) * dims_[3] + l];
  }

  void zero() { std::fill(data_.begin(), data_.end(), T(0)); }
  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& o) const {
    return ndim_ == o.ndim_ && dims_ == o.dims_;
  }

  std::vector<std::size_t> shape() const {
    return std::vector<std::size_t>(dims_.begin(), dims_.begin() + ndim_);
  }

  template <class U>
  Tensor<U> cast() const {
    Tensor<U> out(shape());
    for (std::size_t i = 0; i < size(); ++i)
      out[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  std::array<std::size_t, 4> dims_{1, 1, 1, 1};
  int ndim_ = 0;
  std::vector<T> data_;
};

// Row-major 2-D matrix; the workhorse for spectrograms and embedding tables.
template <class T>
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<T> v;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, T init = T(0)) : rows(r), cols(c), v(r * c, init) {}

  T& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return v[r * cols + c];
  }
  T* row(std::size_t r) { return v.data() + r * cols; }
  const T* row(std::size_t r) const { return v.data() + r * cols; }
  std::size_t size() const { return v.size(); }

  template <class U>
  Mat<U> cast() const {
    Mat<U> out(rows, cols);
    for (std::size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
    return out;
  }
};

}  // namespace audiossl
