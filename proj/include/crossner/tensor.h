#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace crossner {

// Dense row-major matrix. Row vectors are 1 x d; scalars are 1 x 1.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, T fill = T(0));
  Tensor(std::size_t rows, std::size_t cols, std::vector<T> values);
  Tensor(std::initializer_list<std::initializer_list<T>> rows);

  static Tensor scalar(T v) { return Tensor(1, 1, v); }
  static Tensor row(std::vector<T> values) {
    const std::size_t n = values.size();
    return Tensor(1, n, std::move(values));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool same_shape(const Tensor& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  std::span<const T> row_span(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<T> row_span(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  T item() const;
  void fill(T v);
  bool all_finite() const;

  std::string shape_string() const;

  bool operator==(const Tensor& o) const = default;

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

std::string shape_string(std::size_t rows, std::size_t cols);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace crossner
