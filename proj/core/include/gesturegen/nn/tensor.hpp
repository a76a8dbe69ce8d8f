#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace gesturegen::nn {

// Dense row-major rank-2 tensor. Scalars are 1x1, row vectors 1xN. Rank 2 is
// all the models here need; batches are handled by looping over items.
template <typename T>
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c, T fill = T(0))
      : rows(r), cols(c), data(r * c, fill) {}

  static Tensor scalar(T v) {
    Tensor t(1, 1);
    t.data[0] = v;
    return t;
  }

  std::size_t size() const { return rows * cols; }

  T& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  T at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  T* row(std::size_t r) { return data.data() + r * cols; }
  const T* row(std::size_t r) const { return data.data() + r * cols; }

  bool same_shape(const Tensor& o) const {
    return rows == o.rows && cols == o.cols;
  }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  bool all_finite() const {
    for (T x : data)
      if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(rows, cols);
    for (std::size_t i = 0; i < data.size(); ++i)
      out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

}  // namespace gesturegen::nn
