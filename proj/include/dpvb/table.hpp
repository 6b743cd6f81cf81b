//
// Copyright 2026 The dpvb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dpvb {

/// Dense row-major matrix. The contingency tables in this library are tiny
/// (classes x levels), so a flat vector is all we need.
template <typename T>
class Table {
 public:
  Table() = default;

  Table(int rows, int cols, T init = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, init) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Table: negative dimensions");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const T& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  T row_sum(int i) const {
    T s{};
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j);
    return s;
  }

  T total() const { return std::accumulate(data_.begin(), data_.end(), T{}); }

  bool same_shape(const Table& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using RealTable = Table<double>;
using CountTable = Table<std::int64_t>;

}  // namespace dpvb
