#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace torivec {

// Dense row-major array of reals. float carries training and inference;
// double is reserved for finite-difference gradient checking.
template <typename S>
class TensorT {
 public:
  TensorT() = default;

  explicit TensorT(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(element_count(shape_), S(0));
  }

  TensorT(std::vector<int> shape, std::vector<S> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (element_count(shape_) != static_cast<std::int64_t>(data_.size())) {
      throw std::invalid_argument("tensor: shape does not match data length");
    }
  }

  static TensorT full(std::vector<int> shape, S value) {
    TensorT t(std::move(shape));
    for (S& v : t.data_) v = value;
    return t;
  }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  S* data() { return data_.data(); }
  const S* data() const { return data_.data(); }

  S& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  S operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  // Unchecked row-major accessors for the common ranks.
  S& at(int i, int j) { return data_[static_cast<std::size_t>(i) * shape_[1] + j]; }
  const S& at(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * shape_[1] + j];
  }
  S& at(int i, int j, int k) {
    return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  const S& at(int i, int j, int k) const {
    return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }

  void fill(S value) {
    for (S& v : data_) v = value;
  }

  bool same_shape(const TensorT& other) const { return shape_ == other.shape_; }

  bool all_finite() const {
    for (S v : data_) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }

  template <typename T>
  TensorT<T> cast() const {
    TensorT<T> out(shape_);
    for (std::int64_t i = 0; i < size(); ++i) out[i] = static_cast<T>(data_[i]);
    return out;
  }

  static std::int64_t element_count(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw std::invalid_argument("tensor: non-positive dimension");
      n *= d;
    }
    return n;
  }

 private:
  std::vector<int> shape_;
  std::vector<S> data_;
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

std::string shape_to_string(const std::vector<int>& shape);

}  // namespace torivec
