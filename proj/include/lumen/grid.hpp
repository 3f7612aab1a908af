// Copyright 2026 The Lumen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lumen/errors.hpp"

namespace lumen {

/// Dense row-major 2D grid. x indexes columns, y indexes rows.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw ContractError("grid dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

  /// Access with half-sample symmetric extension: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
  [[nodiscard]] const T& mirrored(int x, int y) const noexcept {
    return data_[index(reflect(x, width_), reflect(y, height_))];
  }

  [[nodiscard]] std::span<T> values() & noexcept { return data_; }
  [[nodiscard]] std::span<const T> values() const& noexcept { return data_; }
  /// On a temporary grid the storage is handed over, so range-for over
  /// `make_grid().values()` stays valid.
  [[nodiscard]] std::vector<T> values() && noexcept { return std::move(data_); }

  [[nodiscard]] std::span<T> row(int y) noexcept {
    return std::span<T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }
  [[nodiscard]] std::span<const T> row(int y) const noexcept {
    return std::span<const T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  [[nodiscard]] bool same_shape(const Grid& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }
  template <typename U>
  [[nodiscard]] bool same_shape(const Grid<U>& o) const noexcept {
    return width_ == o.width() && height_ == o.height();
  }

  bool operator==(const Grid&) const = default;

  /// Maps any integer onto [0, n) by mirror reflection with period 2n.
  static int reflect(int i, int n) noexcept {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
  }

 private:
  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Image = Grid<double>;
using Mask = Grid<std::uint8_t>;

template <typename T, typename U>
void require_same_shape(const Grid<T>& a, const Grid<U>& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ContractError(std::string(what) + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                        std::to_string(b.height()) + ")");
  }
}

}  // namespace lumen
