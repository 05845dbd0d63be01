/*
 *   Copyright 2026 The tabkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TABKIT_NUMKIT_HPP_
#define TABKIT_NUMKIT_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace tabkit {

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

/// SplitMix64 stream. Identical seed and call sequence give identical output
/// on every platform. Child streams from split() never share state for
/// distinct indices.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0)
      : state_(seed), stream_id_(stream_id) {}

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform();

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal();

  /// Unbiased integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Independent child stream; does not advance this stream.
  Rng split(std::uint64_t index) const;

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

  std::uint64_t state() const { return state_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t state_;
  std::uint64_t stream_id_;
};

std::uint64_t mix64(std::uint64_t z);

/// 0..n-1 in random order.
std::vector<std::size_t> permutation(std::size_t n, Rng& rng);

// ---------------------------------------------------------------------------
// Dense values
// ---------------------------------------------------------------------------

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  Matrix select_rows(std::span<const std::size_t> index) const;
  Matrix select_cols(std::span<const std::size_t> index) const;
  /// [this | other]; row counts must match.
  Matrix hconcat(const Matrix& other) const;
  /// Rows of this followed by rows of other; column counts must match.
  Matrix vconcat(const Matrix& other) const;

  void append_row(std::span<const double> values);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

enum class OptimizerKind { sgd, adam };

struct BatchStrategy {
  enum class Kind { batch, mini_batch, online };
  Kind kind = Kind::batch;
  std::size_t size = 0;  // mini_batch only

  static BatchStrategy full() { return {Kind::batch, 0}; }
  static BatchStrategy mini_batch(std::size_t k) { return {Kind::mini_batch, k}; }
  static BatchStrategy online() { return {Kind::online, 1}; }

  bool operator==(const BatchStrategy&) const = default;
};

namespace adam {
inline constexpr double beta1 = 0.9;
inline constexpr double beta2 = 0.999;
inline constexpr double epsilon = 1e-8;
}  // namespace adam

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::sgd;
  double learning_rate = 0.01;
  BatchStrategy batch;
  std::vector<double> first_moment;   // adam only, same length as params
  std::vector<double> second_moment;  // adam only
  std::uint64_t step_count = 0;
};

OptimizerState make_optimizer(OptimizerKind kind, double learning_rate,
                              std::size_t n_params,
                              BatchStrategy batch = BatchStrategy::full());

/// In-place parameter update. Throws ModelError on shape mismatch or a
/// non-positive learning rate.
void optimizer_step(OptimizerState& state, std::span<double> params,
                    std::span<const double> grads);

/// Index batches for one epoch. The result always partitions 0..n-1.
std::vector<std::vector<std::size_t>> epoch_schedule(std::size_t n_samples,
                                                     BatchStrategy strategy,
                                                     Rng& rng);

// ---------------------------------------------------------------------------
// Verification and small linear algebra
// ---------------------------------------------------------------------------

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central differences (f(x+h e_i) - f(x-h e_i)) / 2h per coordinate.
std::vector<double> finite_diff_grad(const ScalarFn& f, std::span<const double> x,
                                     double h = 1e-6);

/// Solves A x = b for symmetric positive definite A (Cholesky).
std::vector<double> solve_spd(Matrix a, std::vector<double> b);

/// Ordinary least squares with an intercept. Returns {intercept, coef...}.
std::vector<double> least_squares(const Matrix& x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Summary statistics
// ---------------------------------------------------------------------------

double mean(std::span<const double> v);
/// Population standard deviation (divides by n).
double population_std(std::span<const double> v);
/// Empirical quantile with linear interpolation between order statistics,
/// position q * (n - 1) in the sorted sample.
double quantile(std::vector<double> v, double q);
double median(std::vector<double> v);
/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace tabkit

#endif  // TABKIT_NUMKIT_HPP_
