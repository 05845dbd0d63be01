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

#include "tabkit/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "tabkit/error.hpp"

namespace tabkit {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplitSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw UsageError("uniform_index: empty range");
  const std::uint64_t bound = n;
  const std::uint64_t limit = -bound % bound;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = next_u64();
    // Reject the low tail so every residue is equally likely.
    if (r >= limit) return static_cast<std::size_t>(r % bound);
  }
}

Rng Rng::split(std::uint64_t index) const {
  // mix64 is a bijection, so distinct indices give distinct child states.
  const std::uint64_t base = mix64(state_ ^ kSplitSalt);
  return Rng(mix64(base + kGolden * (index + 1)), index);
}

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(idx));
  return idx;
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DataError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  if (values.size() != rows_) throw DataError("set_column: length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::select_rows(std::span<const std::size_t> index) const {
  Matrix out(index.size(), cols_);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto src = row(index[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> index) const {
  Matrix out(rows_, index.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < index.size(); ++j) out(r, j) = (*this)(r, index[j]);
  }
  return out;
}

Matrix Matrix::hconcat(const Matrix& other) const {
  if (other.rows_ != rows_) throw DataError("hconcat: row count mismatch");
  Matrix out(rows_, cols_ + other.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto dst = out.row(r);
    std::copy(row(r).begin(), row(r).end(), dst.begin());
    std::copy(other.row(r).begin(), other.row(r).end(), dst.begin() + cols_);
  }
  return out;
}

Matrix Matrix::vconcat(const Matrix& other) const {
  if (rows_ == 0) return other;
  if (other.rows_ == 0) return *this;
  if (other.cols_ != cols_) throw DataError("vconcat: column count mismatch");
  Matrix out = *this;
  out.data_.insert(out.data_.end(), other.data_.begin(), other.data_.end());
  out.rows_ += other.rows_;
  return out;
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw DataError("append_row: width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

OptimizerState make_optimizer(OptimizerKind kind, double learning_rate,
                              std::size_t n_params, BatchStrategy batch) {
  OptimizerState s;
  s.kind = kind;
  s.learning_rate = learning_rate;
  s.batch = batch;
  if (kind == OptimizerKind::adam) {
    s.first_moment.assign(n_params, 0.0);
    s.second_moment.assign(n_params, 0.0);
  }
  return s;
}

void optimizer_step(OptimizerState& state, std::span<double> params,
                    std::span<const double> grads) {
  if (params.size() != grads.size()) {
    throw ModelError("optimizer_step: params/grads length mismatch (" +
                     std::to_string(params.size()) + " vs " +
                     std::to_string(grads.size()) + ")");
  }
  if (!(state.learning_rate > 0.0)) {
    throw ModelError("optimizer_step: learning rate must be positive");
  }
  const double lr = state.learning_rate;
  ++state.step_count;
  if (state.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
    return;
  }
  if (state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ModelError("optimizer_step: adam moments do not match parameter shape");
  }
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(adam::beta1, t);
  const double c2 = 1.0 - std::pow(adam::beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = adam::beta1 * m + (1.0 - adam::beta1) * grads[i];
    v = adam::beta2 * v + (1.0 - adam::beta2) * grads[i] * grads[i];
    const double m_hat = m / c1;
    const double v_hat = v / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + adam::epsilon);
  }
}

std::vector<std::vector<std::size_t>> epoch_schedule(std::size_t n_samples,
                                                     BatchStrategy strategy,
                                                     Rng& rng) {
  if (n_samples == 0) throw ModelError("epoch_schedule: no samples");
  std::vector<std::vector<std::size_t>> batches;
  switch (strategy.kind) {
    case BatchStrategy::Kind::batch: {
      std::vector<std::size_t> all(n_samples);
      std::iota(all.begin(), all.end(), std::size_t{0});
      batches.push_back(std::move(all));
      break;
    }
    case BatchStrategy::Kind::mini_batch:
    case BatchStrategy::Kind::online: {
      const std::size_t k =
          strategy.kind == BatchStrategy::Kind::online ? 1 : strategy.size;
      if (k == 0) throw ModelError("epoch_schedule: mini-batch size must be >= 1");
      const auto order = permutation(n_samples, rng);
      for (std::size_t start = 0; start < n_samples; start += k) {
        const std::size_t stop = std::min(n_samples, start + k);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(stop));
      }
      break;
    }
  }
  return batches;
}

std::vector<double> finite_diff_grad(const ScalarFn& f, std::span<const double> x,
                                     double h) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = f(point);
    point[i] = saved - h;
    const double down = f(point);
    point[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw ModelError("finite_diff_grad: non-finite function value at coordinate " +
                       std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

std::vector<double> solve_spd(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw ModelError("solve_spd: shape mismatch");
  // In-place Cholesky, lower triangle.
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
    if (!(diag > 0.0)) throw ModelError("solve_spd: matrix is not positive definite");
    const double l = std::sqrt(diag);
    a(j, j) = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / l;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
    b[i] = s / a(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a(k, i) * b[k];
    b[i] = s / a(i, i);
  }
  return b;
}

std::vector<double> least_squares(const Matrix& x, std::span<const double> y) {
  if (x.rows() != y.size()) throw ModelError("least_squares: length mismatch");
  const std::size_t p = x.cols() + 1;
  Matrix gram(p, p);
  std::vector<double> rhs(p, 0.0);
  std::vector<double> z(p);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    z[0] = 1.0;
    for (std::size_t j = 0; j < x.cols(); ++j) z[j + 1] = x(r, j);
    for (std::size_t i = 0; i < p; ++i) {
      rhs[i] += z[i] * y[r];
      for (std::size_t j = 0; j < p; ++j) gram(i, j) += z[i] * z[j];
    }
  }
  return solve_spd(std::move(gram), std::move(rhs));
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_std(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw DataError("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace tabkit
