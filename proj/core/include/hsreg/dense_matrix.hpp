// Copyright 2026 The hsreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HSREG_DENSE_MATRIX_HPP_
#define HSREG_DENSE_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace hsreg {

// Row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  void fill(double value);
  bool all_finite() const noexcept;

  // Copies the given rows (in order) into a new matrix.
  DenseMatrix gather_rows(std::span<const std::size_t> indices) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// out = a(n x k) * b(k x m). Zero entries of `a` are
// skipped, which makes one-hot heavy inputs cheap.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

// out = a^T * b with a(n x k), b(n x m) -> (k x m). Zero entries of `a` skipped.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);

// out = a * b^T with a(n x m), b(k x m) -> (n x k).
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

// Adds `bias` to every row.
void add_row_vector(DenseMatrix& m, std::span<const double> bias);

// Column sums.
std::vector<double> column_sums(const DenseMatrix& m);

}  // namespace hsreg

#endif  // HSREG_DENSE_MATRIX_HPP_
