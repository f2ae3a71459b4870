// Copyright 2026 The MRP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MRP_NUMCORE_MATRIX_H_
#define MRP_NUMCORE_MATRIX_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "mrp/errors.h"

namespace mrp::numcore {

// Dense row-major matrix. Production code uses the float instantiation;
// the double one exists so gradient checks can run the same kernels at a
// precision where finite differences are meaningful.
template <typename T>
class BasicMatrix {
 public:
  using value_type = T;

  BasicMatrix() = default;
  BasicMatrix(int rows, int cols, T fill = T(0))
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw InputError("negative matrix dimension");
  }
  BasicMatrix(int rows, int cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(rows) * cols) {
      throw InputError("matrix data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(rows) + "x" +
                       std::to_string(cols));
    }
  }

  static BasicMatrix FromRows(
      std::initializer_list<std::initializer_list<T>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
    std::vector<T> data;
    data.reserve(static_cast<std::size_t>(r) * c);
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != c) throw InputError("ragged rows");
      data.insert(data.end(), row.begin(), row.end());
    }
    return BasicMatrix(r, c, std::move(data));
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int r, int c) {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  const T& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::span<T> row(int r) {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const T> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  void set_zero() { fill(T(0)); }

  bool all_finite() const {
    for (T v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  // Copies rows [begin, begin + count).
  BasicMatrix slice_rows(int begin, int count) const {
    BasicMatrix out(count, cols_);
    std::copy(data_.begin() + static_cast<std::size_t>(begin) * cols_,
              data_.begin() + static_cast<std::size_t>(begin + count) * cols_,
              out.data_.begin());
    return out;
  }

  template <typename U>
  BasicMatrix<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return BasicMatrix<U>(rows_, cols_, std::move(out));
  }

  bool same_shape(const BasicMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using Matrix = BasicMatrix<float>;

inline std::string shape_string(int rows, int cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

template <typename T>
std::string shape_string(const BasicMatrix<T>& m) {
  return shape_string(m.rows(), m.cols());
}

// Throws NumericError naming `what` when any entry is NaN or Inf.
template <typename T>
void check_finite(const BasicMatrix<T>& m, const std::string& what) {
  if (!m.all_finite()) throw NumericError("non-finite values in " + what);
}

}  // namespace mrp::numcore

#endif  // MRP_NUMCORE_MATRIX_H_
