/* Copyright 2026 The SEMCo Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Forward and backward rules for the fixed op set used by the encoder.
// Backward functions take the saved forward inputs/outputs and the upstream
// gradient, accumulate parameter gradients in place and return the input
// gradient.

#ifndef SEMCO_OPS_HPP_
#define SEMCO_OPS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "semco/params.hpp"
#include "semco/tensor.hpp"

namespace semco {

enum class Mode { train, eval };

// ---- linear -----------------------------------------------------------------

/// y = x W + b with W stored as in x out.
template <class T>
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore<T>& store, const std::string& name, std::size_t in, std::size_t out,
         Rng& rng)
      : weight_(&store.add(name + ".weight", in, out, true, true)),
        bias_(&store.add(name + ".bias", 1, out, true, false)) {
    kaiming_uniform(weight_->value, in, rng);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (T& v : bias_->value.values()) v = static_cast<T>(rng.uniform(-bound, bound));
  }

  std::size_t in_dim() const { return weight_->value.rows(); }
  std::size_t out_dim() const { return weight_->value.cols(); }

  Matrix<T> forward(const Matrix<T>& x) const {
    if (x.cols() != in_dim()) throw std::invalid_argument("shape mismatch in linear");
    Matrix<T> y = matmul(x, weight_->value);
    const auto b = bias_->value.row(0);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      auto r = y.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) r[j] += b[j];
    }
    return y;
  }

  Matrix<T> backward(const Matrix<T>& x, const Matrix<T>& dy) {
    weight_->grad += matmul_tn(x, dy);
    auto db = bias_->grad.row(0);
    for (std::size_t i = 0; i < dy.rows(); ++i) {
      const auto r = dy.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) db[j] += r[j];
    }
    return matmul_nt(dy, weight_->value);
  }

 private:
  Param<T>* weight_ = nullptr;
  Param<T>* bias_ = nullptr;
};

// ---- relu -------------------------------------------------------------------

template <class T>
Matrix<T> relu(Matrix<T> x) {
  for (T& v : x.values()) v = v > T{0} ? v : T{0};
  return x;
}

/// Passes the upstream gradient where the forward input was positive.
template <class T>
Matrix<T> relu_backward(const Matrix<T>& x, Matrix<T> dy) {
  for (std::size_t i = 0; i < dy.size(); ++i) {
    if (!(x.values()[i] > T{0})) dy.values()[i] = T{0};
  }
  return dy;
}

// ---- batch norm -------------------------------------------------------------

inline constexpr double kBatchNormMomentum = 0.1;
inline constexpr double kBatchNormEps = 1e-5;

template <class T>
class BatchNorm {
 public:
  struct Cache {
    Matrix<T> x_hat;
    std::vector<T> inv_std;
  };

  BatchNorm() = default;
  BatchNorm(ParamStore<T>& store, const std::string& name, std::size_t dim)
      : gamma_(&store.add(name + ".gamma", 1, dim, true, false)),
        beta_(&store.add(name + ".beta", 1, dim, true, false)),
        running_mean_(&store.add(name + ".running_mean", 1, dim, false, false)),
        running_var_(&store.add(name + ".running_var", 1, dim, false, false)) {
    gamma_->value.fill(T{1});
    running_var_->value.fill(T{1});
  }

  /// Batch statistics; updates the running estimates.
  Matrix<T> forward_train(const Matrix<T>& x, Cache& cache) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n < 2) throw std::invalid_argument("batch_norm: train mode needs batch size >= 2");
    if (d != gamma_->value.cols()) throw std::invalid_argument("shape mismatch in batch_norm");
    std::vector<double> mean(d, 0.0);
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j);
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const double c = x(i, j) - mean[j];
        var[j] += c * c;
      }
    for (double& v : var) v /= static_cast<double>(n);

    cache.x_hat = Matrix<T>(n, d);
    cache.inv_std.assign(d, T{0});
    Matrix<T> y(n, d);
    for (std::size_t j = 0; j < d; ++j) {
      cache.inv_std[j] = static_cast<T>(1.0 / std::sqrt(var[j] + kBatchNormEps));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const T xh = static_cast<T>((x(i, j) - mean[j])) * cache.inv_std[j];
        cache.x_hat(i, j) = xh;
        y(i, j) = gamma_->value(0, j) * xh + beta_->value(0, j);
      }

    const double unbias = static_cast<double>(n) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < d; ++j) {
      auto& rm = running_mean_->value(0, j);
      auto& rv = running_var_->value(0, j);
      rm = static_cast<T>((1.0 - kBatchNormMomentum) * rm + kBatchNormMomentum * mean[j]);
      rv = static_cast<T>((1.0 - kBatchNormMomentum) * rv +
                          kBatchNormMomentum * var[j] * unbias);
    }
    return y;
  }

  /// Frozen running statistics: a fixed affine map.
  Matrix<T> forward_eval(const Matrix<T>& x) const {
    if (x.cols() != gamma_->value.cols()) throw std::invalid_argument("shape mismatch in batch_norm");
    Matrix<T> y(x.rows(), x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double inv = 1.0 / std::sqrt(static_cast<double>(running_var_->value(0, j)) +
                                         kBatchNormEps);
      const double scale = gamma_->value(0, j) * inv;
      const double shift = beta_->value(0, j) - running_mean_->value(0, j) * scale;
      for (std::size_t i = 0; i < x.rows(); ++i) {
        y(i, j) = static_cast<T>(x(i, j) * scale + shift);
      }
    }
    return y;
  }

  Matrix<T> backward(const Cache& cache, const Matrix<T>& dy) {
    const std::size_t n = dy.rows();
    const std::size_t d = dy.cols();
    Matrix<T> dx(n, d);
    for (std::size_t j = 0; j < d; ++j) {
      double sum_dy = 0.0;
      double sum_dy_xh = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sum_dy += dy(i, j);
        sum_dy_xh += static_cast<double>(dy(i, j)) * cache.x_hat(i, j);
      }
      gamma_->grad(0, j) += static_cast<T>(sum_dy_xh);
      beta_->grad(0, j) += static_cast<T>(sum_dy);
      const double g = gamma_->value(0, j);
      const double k = g * cache.inv_std[j] / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        dx(i, j) = static_cast<T>(k * (static_cast<double>(n) * dy(i, j) - sum_dy -
                                       cache.x_hat(i, j) * sum_dy_xh));
      }
    }
    return dx;
  }

 private:
  Param<T>* gamma_ = nullptr;
  Param<T>* beta_ = nullptr;
  Param<T>* running_mean_ = nullptr;
  Param<T>* running_var_ = nullptr;
};

// ---- softmax over each row -----------------------------------------------------

template <class T>
Matrix<T> softmax_rowwise(const Matrix<T>& x) {
  Matrix<T> y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    const T m = *std::max_element(r.begin(), r.end());
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      y(i, j) = static_cast<T>(std::exp(static_cast<double>(r[j] - m)));
      s += y(i, j);
    }
    for (std::size_t j = 0; j < r.size(); ++j) y(i, j) = static_cast<T>(y(i, j) / s);
  }
  return y;
}

template <class T>
Matrix<T> softmax_rowwise_backward(const Matrix<T>& y, const Matrix<T>& dy) {
  Matrix<T> dx(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const T c = dot(y.row(i), dy.row(i));
    for (std::size_t j = 0; j < y.cols(); ++j) dx(i, j) = y(i, j) * (dy(i, j) - c);
  }
  return dx;
}

// ---- l2 normalize rows -------------------------------------------------------

inline constexpr double kNormFloor = 1e-12;

template <class T>
Matrix<T> l2_normalize_rowwise(const Matrix<T>& x) {
  Matrix<T> y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double n = std::max(static_cast<double>(norm(x.row(i))), kNormFloor);
    for (std::size_t j = 0; j < x.cols(); ++j) y(i, j) = static_cast<T>(x(i, j) / n);
  }
  return y;
}

/// g / |x| - x (x^T g) / |x|^3, per row.
template <class T>
Matrix<T> l2_normalize_rowwise_backward(const Matrix<T>& x, const Matrix<T>& dy) {
  Matrix<T> dx(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double n = std::max(static_cast<double>(norm(x.row(i))), kNormFloor);
    const double xg = dot(x.row(i), dy.row(i));
    for (std::size_t j = 0; j < x.cols(); ++j) {
      dx(i, j) = static_cast<T>(dy(i, j) / n - x(i, j) * xg / (n * n * n));
    }
  }
  return dx;
}

// ---- concat / split columns ----------------------------------------------------

template <class T>
Matrix<T> concat_columns(std::span<const Matrix<T>> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_columns: no inputs");
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != parts[0].rows()) throw std::invalid_argument("shape mismatch in concat_columns");
    cols += p.cols();
  }
  Matrix<T> out(parts[0].rows(), cols);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    std::size_t off = 0;
    for (const auto& p : parts) {
      const auto r = p.row(i);
      std::copy(r.begin(), r.end(), out.row(i).begin() + static_cast<std::ptrdiff_t>(off));
      off += p.cols();
    }
  }
  return out;
}

/// Inverse of concat_columns for the gradient: splits dy into column blocks.
template <class T>
std::vector<Matrix<T>> concat_columns_backward(const Matrix<T>& dy,
                                               std::span<const std::size_t> widths) {
  std::vector<Matrix<T>> out;
  std::size_t off = 0;
  for (std::size_t w : widths) {
    Matrix<T> part(dy.rows(), w);
    for (std::size_t i = 0; i < dy.rows(); ++i)
      for (std::size_t j = 0; j < w; ++j) part(i, j) = dy(i, off + j);
    out.push_back(std::move(part));
    off += w;
  }
  if (off != dy.cols()) throw std::invalid_argument("shape mismatch in concat_columns_backward");
  return out;
}

// ---- attention-weighted sum ----------------------------------------------------

/// out_i = sum_m weights(i, m) * rows[m]_i
template <class T>
Matrix<T> weighted_sum(std::span<const Matrix<T>> rows, const Matrix<T>& weights) {
  if (rows.empty() || weights.cols() != rows.size()) {
    throw std::invalid_argument("shape mismatch in weighted_sum");
  }
  Matrix<T> out(rows[0].rows(), rows[0].cols());
  for (std::size_t m = 0; m < rows.size(); ++m) {
    if (rows[m].rows() != out.rows() || rows[m].cols() != out.cols() ||
        weights.rows() != out.rows()) {
      throw std::invalid_argument("shape mismatch in weighted_sum");
    }
    for (std::size_t i = 0; i < out.rows(); ++i) {
      const T a = weights(i, m);
      for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += a * rows[m](i, j);
    }
  }
  return out;
}

template <class T>
struct WeightedSumGrad {
  std::vector<Matrix<T>> d_rows;
  Matrix<T> d_weights;
};

template <class T>
WeightedSumGrad<T> weighted_sum_backward(std::span<const Matrix<T>> rows,
                                         const Matrix<T>& weights, const Matrix<T>& dy) {
  WeightedSumGrad<T> g;
  g.d_weights = Matrix<T>(weights.rows(), weights.cols());
  for (std::size_t m = 0; m < rows.size(); ++m) {
    Matrix<T> dr(dy.rows(), dy.cols());
    for (std::size_t i = 0; i < dy.rows(); ++i) {
      const T a = weights(i, m);
      for (std::size_t j = 0; j < dy.cols(); ++j) dr(i, j) = a * dy(i, j);
      g.d_weights(i, m) = dot(rows[m].row(i), dy.row(i));
    }
    g.d_rows.push_back(std::move(dr));
  }
  return g;
}

// ---- cosine similarity ---------------------------------------------------------

/// S(i, j) = cos(a_i, b_j).
template <class T>
Matrix<T> cosine_similarity_matrix(const Matrix<T>& a, const Matrix<T>& b) {
  return matmul_nt(l2_normalize_rowwise(a), l2_normalize_rowwise(b));
}

template <class T>
struct CosineGrad {
  Matrix<T> da;
  Matrix<T> db;
};

template <class T>
CosineGrad<T> cosine_similarity_matrix_backward(const Matrix<T>& a, const Matrix<T>& b,
                                                const Matrix<T>& ds) {
  const Matrix<T> an = l2_normalize_rowwise(a);
  const Matrix<T> bn = l2_normalize_rowwise(b);
  return {l2_normalize_rowwise_backward(a, matmul(ds, bn)),
          l2_normalize_rowwise_backward(b, matmul_tn(ds, an))};
}

}  // namespace semco

#endif  // SEMCO_OPS_HPP_
