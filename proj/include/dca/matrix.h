// Copyright (c) 2026 DCA Verification Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DCA_MATRIX_H_
#define DCA_MATRIX_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dca {

// Dense row-major matrix of doubles. Entries are checked to be finite
// whenever a matrix is produced by one of the kernels below; a default
// constructed matrix is the 0x0 "unset" value.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix Identity(std::size_t n);
  static Matrix Column(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  bool SameShape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  // Throws numeric-domain if any entry is NaN or infinite.
  const Matrix& CheckFinite(const char* where) const;
  std::string ShapeString() const;

  // Bitwise equality of shape and entries.
  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::string ShapeString(std::size_t rows, std::size_t cols);

Matrix MatMul(const Matrix& a, const Matrix& b);
Matrix Transpose(const Matrix& m);
Matrix Add(const Matrix& a, const Matrix& b);
Matrix Subtract(const Matrix& a, const Matrix& b);
Matrix Scale(const Matrix& m, double factor);
Matrix Hadamard(const Matrix& a, const Matrix& b);
Matrix Tanh(const Matrix& m);
Matrix Relu(const Matrix& m);

// Column-wise exp(m/T) normalized over each column, stabilized by
// subtracting the column maximum. Throws invalid-parameter for T <= 0.
Matrix SoftmaxCols(const Matrix& m, double temperature = 1.0);
// Same normalization applied along each row.
Matrix SoftmaxRows(const Matrix& m, double temperature = 1.0);

// [a; b] stacked vertically (a's rows first).
Matrix ConcatRows(const Matrix& a, const Matrix& b);
// [a, b] side by side (a's columns first).
Matrix ConcatCols(const Matrix& a, const Matrix& b);
// Rows [begin, begin + count) of m.
Matrix SliceRows(const Matrix& m, std::size_t begin, std::size_t count);

double Sum(const Matrix& m);
double MaxAbs(const Matrix& m);
double MaxAbsDiff(const Matrix& a, const Matrix& b);

}  // namespace dca

#endif  // DCA_MATRIX_H_
