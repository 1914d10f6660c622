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

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dca/error.h"
#include "dca/grad_check.h"
#include "dca/matrix.h"
#include "dca/random.h"
#include "dca/tape.h"
#include "test_util.h"

namespace dca {
namespace {

using testing::NaiveMul;
using testing::NaiveSoftmaxCols;
using testing::RandomMatrix;
using testing::ToGrid;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no dca::Error thrown";
  return ErrorCode::kIo;
}

TEST(MatrixTest, IdentityTimesMatrix) {
  const Matrix b{{1, 2}, {3, 4}};
  EXPECT_EQ(MatMul(Matrix::Identity(2), b), b);
}

TEST(MatrixTest, RowTimesColumn) {
  const Matrix out = MatMul(Matrix{{1, 2}}, Matrix{{3}, {4}});
  ASSERT_EQ(out.rows(), 1u);
  ASSERT_EQ(out.cols(), 1u);
  EXPECT_EQ(out(0, 0), 11.0);
}

TEST(MatrixTest, MatMulShapeMismatch) {
  EXPECT_EQ(CodeOf([] { MatMul(Matrix(2, 3), Matrix(2, 2)); }),
            ErrorCode::kInvalidShape);
}

TEST(MatrixTest, MatMulMatchesLoops) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = RandomMatrix(rng, 1 + trial % 4, 3 + trial % 5);
    const Matrix b = RandomMatrix(rng, a.cols(), 2 + trial % 3);
    EXPECT_LT(testing::MaxDiff(NaiveMul(ToGrid(a), ToGrid(b)), MatMul(a, b)),
              1e-13);
  }
}

TEST(MatrixTest, SoftmaxOfZerosIsUniform) {
  const Matrix s = SoftmaxCols(Matrix(2, 2, 0.0));
  for (double v : s.data()) EXPECT_EQ(v, 0.5);
}

TEST(MatrixTest, SoftmaxLn2) {
  const Matrix s = SoftmaxCols(Matrix{{std::log(2.0)}, {0.0}});
  EXPECT_NEAR(s(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s(1, 0), 1.0 / 3.0, 1e-15);
}

TEST(MatrixTest, SoftmaxSmallTemperature) {
  const Matrix s = SoftmaxCols(Matrix{{1.0}, {0.0}}, 0.1);
  const double e = std::exp(-10.0);
  EXPECT_NEAR(s(0, 0), 1.0 / (1.0 + e), 1e-15);
  EXPECT_NEAR(s(1, 0), e / (1.0 + e), 1e-18);
  EXPECT_NEAR(s(0, 0), 0.9999546, 1e-7);
}

TEST(MatrixTest, SoftmaxRejectsNonPositiveTemperature) {
  EXPECT_EQ(CodeOf([] { SoftmaxCols(Matrix(2, 2), 0.0); }),
            ErrorCode::kInvalidParameter);
  EXPECT_EQ(CodeOf([] { SoftmaxRows(Matrix(2, 2), -1.0); }),
            ErrorCode::kInvalidParameter);
}

TEST(MatrixTest, SoftmaxHugeLogitsStayFinite) {
  const Matrix s = SoftmaxCols(Matrix{{1000.0}, {999.0}}, 0.1);
  EXPECT_TRUE(std::isfinite(s(0, 0)));
  EXPECT_NEAR(s(0, 0) + s(1, 0), 1.0, 1e-15);
}

TEST(MatrixTest, Elementwise) {
  EXPECT_EQ(Tanh(Matrix(2, 3, 0.0)), Matrix(2, 3, 0.0));
  EXPECT_EQ(Relu(Matrix{{-1, 2}}), (Matrix{{0, 2}}));
  EXPECT_EQ(Hadamard(Matrix{{1, 2}}, Matrix{{3, 4}}), (Matrix{{3, 8}}));
  EXPECT_EQ(CodeOf([] { Add(Matrix(1, 2), Matrix(2, 1)); }),
            ErrorCode::kInvalidShape);
}

TEST(MatrixTest, ConcatAndSlice) {
  const Matrix a{{1, 2}};
  const Matrix b{{3, 4}, {5, 6}};
  const Matrix c = ConcatRows(a, b);
  EXPECT_EQ(c, (Matrix{{1, 2}, {3, 4}, {5, 6}}));
  EXPECT_EQ(SliceRows(c, 1, 2), b);
  EXPECT_EQ(ConcatCols(a, Matrix{{7}}), (Matrix{{1, 2, 7}}));
  EXPECT_EQ(CodeOf([&] { SliceRows(c, 2, 2); }), ErrorCode::kInvalidShape);
}

TEST(MatrixTest, CheckFinite) {
  Matrix m(1, 2);
  m(0, 1) = NAN;
  EXPECT_EQ(CodeOf([&] { m.CheckFinite("test"); }), ErrorCode::kNumericDomain);
}

// Property: columns sum to one for T in [1e-3, 10].
TEST(SoftmaxProperty, ColumnsSumToOne) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double t = std::exp(rng.Uniform(std::log(1e-3), std::log(10.0)));
    const Matrix m = RandomMatrix(rng, 1 + rng.UniformInt(6),
                                  1 + rng.UniformInt(6), 5.0);
    const Matrix s = SoftmaxCols(m, t);
    for (std::size_t c = 0; c < s.cols(); ++c) {
      double sum = 0.0;
      for (std::size_t r = 0; r < s.rows(); ++r) sum += s(r, c);
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(SoftmaxProperty, ShiftInvariance) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix m = RandomMatrix(rng, 4, 3, 3.0);
    const Matrix before = SoftmaxCols(m);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double shift = rng.Uniform(-50.0, 50.0);
      for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) += shift;
    }
    const Matrix after = SoftmaxCols(m);
    for (std::size_t i = 0; i < before.size(); ++i) {
      EXPECT_LT(std::abs(after.data()[i] - before.data()[i]) /
                    before.data()[i],
                1e-12);
    }
  }
}

TEST(SoftmaxProperty, ZeroTemperatureLimitIsOneHot) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix m = RandomMatrix(rng, 5, 1);
    const std::size_t top = rng.UniformInt(5);
    double mx = -INFINITY;
    for (std::size_t r = 0; r < 5; ++r)
      if (r != top) mx = std::max(mx, m(r, 0));
    m(top, 0) = mx + 1.0 + rng.Uniform();
    const Matrix s = SoftmaxCols(m, 1e-3);
    for (std::size_t r = 0; r < 5; ++r) {
      if (r == top) {
        EXPECT_EQ(s(r, 0), 1.0);
      } else {
        EXPECT_LT(s(r, 0), 1e-300);
      }
    }
  }
}

TEST(SoftmaxProperty, MatchesLoopReference) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = RandomMatrix(rng, 3, 4, 2.0);
    EXPECT_LT(testing::MaxDiff(NaiveSoftmaxCols(ToGrid(m), 0.5),
                               SoftmaxCols(m, 0.5)),
              1e-15);
    EXPECT_LT(testing::MaxDiff(testing::NaiveSoftmaxRows(ToGrid(m), 0.5),
                               SoftmaxRows(m, 0.5)),
              1e-15);
  }
}

TEST(DeterminismTest, ForwardIsBitIdentical) {
  Rng r1(21), r2(21);
  const Matrix a = RandomMatrix(r1, 6, 5), b = RandomMatrix(r2, 6, 5);
  ASSERT_EQ(a, b);
  EXPECT_EQ(Tanh(MatMul(Transpose(a), SoftmaxCols(a, 0.1))),
            Tanh(MatMul(Transpose(b), SoftmaxCols(b, 0.1))));
}

// --- Tape ------------------------------------------------------------------

TEST(TapeTest, SumGradientIsOnes) {
  Rng rng(1);
  const Matrix x = RandomMatrix(rng, 3, 4);
  EXPECT_LT(GradCheck([](Tape&, Var v) { return Sum(v); }, x), 1e-10);
  Tape tape;
  Var v = tape.Leaf(x);
  tape.Backward(Sum(v));
  EXPECT_EQ(tape.grad(v), Matrix(3, 4, 1.0));
}

TEST(TapeTest, SumTanhGradCheck) {
  Rng rng(2);
  EXPECT_LT(GradCheck([](Tape&, Var v) { return Sum(Tanh(v)); },
                      RandomMatrix(rng, 3, 3)),
            1e-6);
}

TEST(TapeTest, BackwardVisitsInExactReverseOrder) {
  Tape tape;
  Var x = tape.Leaf(Matrix{{1.0, -2.0}});
  Var y = Tanh(x);
  Var z = Hadamard(y, x);
  Var s = Sum(z);
  tape.Backward(s);
  const std::vector<std::size_t> expected{s.id, z.id, y.id, x.id};
  EXPECT_EQ(tape.last_backward_order(), expected);
}

TEST(TapeTest, ReplayReproducesEveryValue) {
  Rng rng(3);
  Tape tape;
  Var x = tape.Leaf(RandomMatrix(rng, 4, 3));
  Var w = tape.Constant(RandomMatrix(rng, 3, 4));
  Var out = Sum(Tanh(SoftmaxCols(MatMul(x, w), 0.1)));
  tape.Backward(out);
  EXPECT_TRUE(tape.Replay());
}

TEST(TapeTest, ConstantsGetNoGradient) {
  Tape tape;
  Var c = tape.Constant(Matrix{{2.0}});
  Var x = tape.Leaf(Matrix{{3.0}});
  tape.Backward(Sum(Hadamard(c, x)));
  EXPECT_FALSE(tape.requires_grad(c));
  EXPECT_EQ(tape.grad(x)(0, 0), 2.0);
  EXPECT_EQ(tape.grad(c)(0, 0), 0.0);
}

TEST(TapeTest, UnreachedNodeHasZeroGradient) {
  Tape tape;
  Var x = tape.Leaf(Matrix{{1.0}});
  Var unused = tape.Leaf(Matrix{{5.0, 6.0}});
  tape.Backward(Sum(Tanh(x)));
  EXPECT_EQ(tape.grad(unused), Matrix(1, 2, 0.0));
}

TEST(TapeTest, BackwardNeedsScalar) {
  Tape tape;
  Var x = tape.Leaf(Matrix(2, 2, 1.0));
  EXPECT_EQ(CodeOf([&] { tape.Backward(x); }), ErrorCode::kInvalidShape);
}

TEST(TapeTest, MixingTapesFails) {
  Tape a, b;
  Var x = a.Leaf(Matrix{{1.0}});
  Var y = b.Leaf(Matrix{{1.0}});
  EXPECT_EQ(CodeOf([&] { Add(x, y); }), ErrorCode::kInvalidParameter);
}

TEST(TapeTest, NormalizeZeroVectorFails) {
  Tape tape;
  Var x = tape.Leaf(Matrix(1, 3, 0.0));
  EXPECT_EQ(CodeOf([&] { NormalizeRows(x); }), ErrorCode::kNumericDomain);
}

TEST(GradCheckTest, RejectsBadStep) {
  EXPECT_EQ(CodeOf([] {
              GradCheck([](Tape&, Var v) { return Sum(v); }, Matrix{{1.0}},
                        0.0);
            }),
            ErrorCode::kInvalidParameter);
}

TEST(GradCheckTest, DetectsWrongGradient) {
  // A primitive whose backward rule is deliberately off by a factor of two.
  auto broken = [](Tape& tape, Var v) {
    Var y = tape.Record(
        "broken_double", {v},
        [](Tape::Inputs in) { return Scale(*in[0], 2.0); },
        [](Tape::Inputs, const Matrix&, const Matrix& g,
           std::span<Matrix* const> grads) {
          if (grads[0]) *grads[0] = Add(*grads[0], Scale(g, 4.0));
        });
    return Sum(y);
  };
  EXPECT_GT(GradCheck(broken, Matrix{{1.0, 2.0}}), 0.5);
}

TEST(GradCheckTest, NonFiniteFunctionFails) {
  auto f = [](Tape&, Var v) { return Sum(Scale(v, INFINITY)); };
  EXPECT_EQ(CodeOf([&] { GradCheck(f, Matrix{{1.0}}); }),
            ErrorCode::kNumericDomain);
}

// Every primitive, composed with a random linear read-out, at 100 random
// points.
struct Primitive {
  std::string name;
  std::size_t rows, cols;
  std::function<Var(Tape&, Var, Rng&)> apply;
  bool positive = false;
};

std::vector<Primitive> Primitives() {
  auto c = [](Tape& t, Rng& r, std::size_t rows, std::size_t cols) {
    return t.Constant(r.NormalMatrix(rows, cols));
  };
  return {
      {"matmul_left", 3, 4,
       [=](Tape& t, Var x, Rng& r) { return MatMul(x, c(t, r, 4, 2)); }},
      {"matmul_right", 4, 2,
       [=](Tape& t, Var x, Rng& r) { return MatMul(c(t, r, 3, 4), x); }},
      {"matmul_self", 3, 3, [](Tape&, Var x, Rng&) { return MatMul(x, x); }},
      {"transpose", 2, 5, [](Tape&, Var x, Rng&) { return Transpose(x); }},
      {"add", 3, 3,
       [=](Tape& t, Var x, Rng& r) { return Add(x, c(t, r, 3, 3)); }},
      {"subtract", 3, 3,
       [=](Tape& t, Var x, Rng& r) { return Subtract(c(t, r, 3, 3), x); }},
      {"scale", 2, 3, [](Tape&, Var x, Rng&) { return Scale(x, -1.7); }},
      {"hadamard", 3, 2,
       [=](Tape& t, Var x, Rng& r) { return Hadamard(x, c(t, r, 3, 2)); }},
      {"hadamard_self", 3, 2, [](Tape&, Var x, Rng&) { return Hadamard(x, x); }},
      {"tanh", 4, 3, [](Tape&, Var x, Rng&) { return Tanh(x); }},
      {"relu", 4, 3, [](Tape&, Var x, Rng&) { return Relu(x); }},
      {"softmax_cols", 4, 3, [](Tape&, Var x, Rng&) { return SoftmaxCols(x); }},
      {"softmax_cols_t", 4, 3,
       [](Tape&, Var x, Rng&) { return SoftmaxCols(x, 0.5); }},
      {"softmax_rows", 3, 4, [](Tape&, Var x, Rng&) { return SoftmaxRows(x); }},
      {"softmax_rows_t", 3, 2,
       [](Tape&, Var x, Rng&) { return SoftmaxRows(x, 0.3); }},
      {"concat_rows", 2, 3,
       [=](Tape& t, Var x, Rng& r) { return ConcatRows(c(t, r, 1, 3), x); }},
      {"concat_cols", 2, 3,
       [=](Tape& t, Var x, Rng& r) { return ConcatCols(x, c(t, r, 2, 2)); }},
      {"slice_rows", 5, 2, [](Tape&, Var x, Rng&) { return SliceRows(x, 1, 3); }},
      {"sum", 3, 3, [](Tape&, Var x, Rng&) { return Sum(x); }},
      {"add_column_broadcast", 3, 4,
       [=](Tape& t, Var x, Rng& r) {
         return AddColumnBroadcast(x, c(t, r, 3, 1));
       }},
      {"add_column_broadcast_col", 3, 1,
       [=](Tape& t, Var x, Rng& r) {
         return AddColumnBroadcast(c(t, r, 3, 4), x);
       }},
      {"replicate_column", 4, 2,
       [](Tape&, Var x, Rng&) { return ReplicateColumn(x, 1, 3); }},
      {"safe_sqrt", 3, 3, [](Tape&, Var x, Rng&) { return SafeSqrt(x); }, true},
      {"normalize_rows", 3, 4,
       [](Tape&, Var x, Rng&) { return NormalizeRows(x); }},
      {"normalize_cols", 3, 4,
       [](Tape&, Var x, Rng&) { return NormalizeCols(x); }},
  };
}

TEST(GradCheckTest, EveryPrimitiveAtHundredSeeds) {
  for (const Primitive& p : Primitives()) {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      Matrix x = rng.NormalMatrix(p.rows, p.cols);
      if (p.positive) {
        for (double& v : x.mutable_data()) v = 0.5 + std::abs(v);
      }
      // Keep ReLU away from its kink so the central difference is valid.
      for (double& v : x.mutable_data())
        if (std::abs(v) < 1e-3) v = 0.1;
      const std::uint64_t const_seed = 1000 + seed;
      auto f = [&](Tape& tape, Var v) {
        Rng consts(const_seed);
        Var y = p.apply(tape, v, consts);
        Var readout = tape.Constant(consts.NormalMatrix(y.rows(), y.cols()));
        return Sum(Hadamard(y, readout));
      };
      worst = std::max(worst, GradCheck(f, x));
    }
    EXPECT_LT(worst, 1e-6) << p.name;
  }
}

}  // namespace
}  // namespace dca
