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

#include "dca/matrix.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "dca/error.h"

namespace dca {

namespace {

void RequireShape(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok) {
    Fail(ErrorCode::kInvalidShape, std::string(op) + ": incompatible shapes " +
                                       a.ShapeString() + " and " +
                                       b.ShapeString());
  }
}

void RequireTemperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    std::ostringstream os;
    os << "softmax temperature must be positive, got " << temperature;
    Fail(ErrorCode::kInvalidParameter, os.str());
  }
}

template <typename F>
Matrix Map(const Matrix& m, F f, const char* where) {
  Matrix out(m.rows(), m.cols());
  auto src = m.data();
  auto dst = out.mutable_data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  out.CheckFinite(where);
  return out;
}

template <typename F>
Matrix ZipWith(const Matrix& a, const Matrix& b, F f, const char* where) {
  RequireShape(a.SameShape(b), where, a, b);
  Matrix out(a.rows(), a.cols());
  auto x = a.data();
  auto y = b.data();
  auto dst = out.mutable_data();
  for (std::size_t i = 0; i < x.size(); ++i) dst[i] = f(x[i], y[i]);
  out.CheckFinite(where);
  return out;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    Fail(ErrorCode::kInvalidShape,
         "matrix dimensions must be positive, got " + ShapeString());
  }
  CheckFinite("Matrix");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0 || data_.size() != rows * cols) {
    Fail(ErrorCode::kInvalidShape,
         "matrix data of length " + std::to_string(data_.size()) +
             " does not match shape " + ShapeString());
  }
  CheckFinite("Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  if (rows_ == 0 || cols_ == 0) {
    Fail(ErrorCode::kInvalidShape, "matrix literal must be non-empty");
  }
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      Fail(ErrorCode::kInvalidShape, "ragged matrix literal");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
  CheckFinite("Matrix");
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::Column(std::span<const double> values) {
  return Matrix(values.size(), 1,
                std::vector<double>(values.begin(), values.end()));
}

const Matrix& Matrix::CheckFinite(const char* where) const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      Fail(ErrorCode::kNumericDomain,
           std::string(where) + ": non-finite entry in " + ShapeString() +
               " matrix");
    }
  }
  return *this;
}

std::string Matrix::ShapeString() const {
  return dca::ShapeString(rows_, cols_);
}

std::string ShapeString(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

Matrix MatMul(const Matrix& a, const Matrix& b) {
  RequireShape(a.cols() == b.rows() && !a.empty(), "matmul", a, b);
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Matrix out(n, m);
  auto x = a.data();
  auto y = b.data();
  auto dst = out.mutable_data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = x[i * k + p];
      if (aip == 0.0) continue;
      const double* yrow = y.data() + p * m;
      double* orow = dst.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aip * yrow[j];
    }
  }
  out.CheckFinite("matmul");
  return out;
}

Matrix Transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
  return out;
}

Matrix Add(const Matrix& a, const Matrix& b) {
  return ZipWith(a, b, [](double x, double y) { return x + y; }, "add");
}

Matrix Subtract(const Matrix& a, const Matrix& b) {
  return ZipWith(a, b, [](double x, double y) { return x - y; }, "subtract");
}

Matrix Scale(const Matrix& m, double factor) {
  return Map(m, [factor](double x) { return x * factor; }, "scale");
}

Matrix Hadamard(const Matrix& a, const Matrix& b) {
  return ZipWith(a, b, [](double x, double y) { return x * y; }, "hadamard");
}

Matrix Tanh(const Matrix& m) {
  return Map(m, [](double x) { return std::tanh(x); }, "tanh");
}

Matrix Relu(const Matrix& m) {
  return Map(m, [](double x) { return x > 0.0 ? x : 0.0; }, "relu");
}

Matrix SoftmaxCols(const Matrix& m, double temperature) {
  RequireTemperature(temperature);
  Matrix out(m.rows(), m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double max_v = m(0, c);
    for (std::size_t r = 1; r < m.rows(); ++r) max_v = std::max(max_v, m(r, c));
    double total = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double e = std::exp((m(r, c) - max_v) / temperature);
      out(r, c) = e;
      total += e;
    }
    for (std::size_t r = 0; r < m.rows(); ++r) out(r, c) /= total;
  }
  out.CheckFinite("softmax");
  return out;
}

Matrix SoftmaxRows(const Matrix& m, double temperature) {
  RequireTemperature(temperature);
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double max_v = m(r, 0);
    for (std::size_t c = 1; c < m.cols(); ++c) max_v = std::max(max_v, m(r, c));
    double total = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double e = std::exp((m(r, c) - max_v) / temperature);
      out(r, c) = e;
      total += e;
    }
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) /= total;
  }
  out.CheckFinite("softmax");
  return out;
}

Matrix ConcatRows(const Matrix& a, const Matrix& b) {
  RequireShape(a.cols() == b.cols(), "concat_rows", a, b);
  std::vector<double> data(a.data().begin(), a.data().end());
  data.insert(data.end(), b.data().begin(), b.data().end());
  return Matrix(a.rows() + b.rows(), a.cols(), std::move(data));
}

Matrix ConcatCols(const Matrix& a, const Matrix& b) {
  RequireShape(a.rows() == b.rows(), "concat_cols", a, b);
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
    for (std::size_t c = 0; c < b.cols(); ++c) out(r, a.cols() + c) = b(r, c);
  }
  return out;
}

Matrix SliceRows(const Matrix& m, std::size_t begin, std::size_t count) {
  if (count == 0 || begin + count > m.rows()) {
    Fail(ErrorCode::kInvalidShape,
         "row slice [" + std::to_string(begin) + ", " +
             std::to_string(begin + count) + ") out of range for " +
             m.ShapeString());
  }
  auto d = m.data();
  return Matrix(count, m.cols(),
                std::vector<double>(d.begin() + begin * m.cols(),
                                    d.begin() + (begin + count) * m.cols()));
}

double Sum(const Matrix& m) {
  double total = 0.0;
  for (double v : m.data()) total += v;
  return total;
}

double MaxAbs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.data()) best = std::max(best, std::fabs(v));
  return best;
}

double MaxAbsDiff(const Matrix& a, const Matrix& b) {
  RequireShape(a.SameShape(b), "max_abs_diff", a, b);
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, std::fabs(a.data()[i] - b.data()[i]));
  return best;
}

}  // namespace dca
