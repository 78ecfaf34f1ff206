#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace pforge {

/// Dense 2D array stored row-major: x (column index i) is contiguous,
/// y (row index j) is the slow axis.
template <typename T>
class Array2D {
 public:
  Array2D() = default;
  Array2D(int nx, int ny, T fill = T{})
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), fill) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }

  T& operator()(int i, int j) noexcept { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const noexcept { return data_[index(i, j)]; }

  T* row(int j) noexcept { return data_.data() + index(0, j); }
  const T* row(int j) const noexcept { return data_.data() + index(0, j); }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool operator==(const Array2D&) const = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<T> data_;
};

}  // namespace pforge
