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

// Alpha-entmax mappings onto the probability simplex, Tsallis entropies and
// the Fenchel-Young losses they induce.
//
// All kernels work in double precision regardless of the model's weight type;
// the threshold search is sensitive near support boundaries.

#ifndef SEMCO_ENTMAX_HPP_
#define SEMCO_ENTMAX_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace semco {

/// Entmax exponent. 1 is softmax, 2 is sparsemax.
class Alpha {
 public:
  constexpr explicit Alpha(double value) : value_(value) {
    if (!(value >= 1.0 && value <= 2.0)) {
      throw std::invalid_argument("alpha must lie in [1, 2]");
    }
  }

  static constexpr Alpha softmax() { return Alpha(1.0); }
  static constexpr Alpha entmax15() { return Alpha(1.5); }
  static constexpr Alpha sparsemax() { return Alpha(2.0); }

  constexpr double value() const { return value_; }
  constexpr bool is_softmax() const { return value_ == 1.0; }
  constexpr bool is_sparse() const { return value_ > 1.0; }

  friend constexpr bool operator==(Alpha a, Alpha b) = default;

 private:
  double value_;
};

/// Threshold eta of the closed form [(alpha - 1) z - eta]_+^(1 / (alpha - 1)).
/// For softmax, eta holds log-sum-exp(z) and the support is everything.
struct Threshold {
  double eta = 0.0;
  std::size_t support_size = 0;
};

namespace detail {

inline void require_finite(std::span<const double> z) {
  if (z.empty()) throw std::invalid_argument("entmax: empty input");
  for (double v : z) {
    if (!std::isfinite(v)) throw std::invalid_argument("entmax: non-finite logit");
  }
}

inline double max_of(std::span<const double> z) {
  return *std::max_element(z.begin(), z.end());
}

// Values that can possibly land in the support, sorted descending. Every
// support entry satisfies x_i > x_max - 1 because p_max <= 1, so the sort
// only touches candidates. Input is shifted so that max(x) == 0.
inline void support_candidates(std::span<const double> shifted,
                               std::vector<double>& out) {
  out.clear();
  for (double v : shifted) {
    if (v > -1.0) out.push_back(v);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
}

inline Threshold softmax_into(std::span<const double> z, std::span<double> out) {
  const double m = max_of(z);
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return {m + std::log(sum), z.size()};
}

// Sparsemax: Euclidean projection onto the simplex by sorting.
inline Threshold sparsemax_into(std::span<const double> z, std::span<double> out) {
  const double m = max_of(z);
  std::vector<double> shifted(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) shifted[i] = z[i] - m;
  std::vector<double> sorted;
  support_candidates(shifted, sorted);

  double cumsum = 0.0;
  double tau = -1.0;
  for (std::size_t k = 1; k <= sorted.size(); ++k) {
    cumsum += sorted[k - 1];
    const double tau_k = (cumsum - 1.0) / static_cast<double>(k);
    if (sorted[k - 1] > tau_k) {
      tau = tau_k;
    }
  }
  std::size_t support = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = shifted[i] - tau;
    out[i] = v > 0.0 ? v : 0.0;
    support += out[i] > 0.0;
  }
  return {tau + m, support};
}

// 1.5-entmax: p_i = [x_i - tau]_+^2 with x = z / 2, exact sort-based solve.
inline Threshold entmax15_into(std::span<const double> z, std::span<double> out) {
  const double m = max_of(z) / 2.0;
  std::vector<double> shifted(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) shifted[i] = z[i] / 2.0 - m;
  std::vector<double> sorted;
  support_candidates(shifted, sorted);

  double s1 = 0.0;
  double s2 = 0.0;
  double tau_star = -1.0;
  for (std::size_t k = 1; k <= sorted.size(); ++k) {
    const double kd = static_cast<double>(k);
    s1 += sorted[k - 1];
    s2 += sorted[k - 1] * sorted[k - 1];
    const double mean = s1 / kd;
    const double ss = s2 - s1 * mean;  // k * (E[x^2] - E[x]^2)
    const double delta = std::max((1.0 - ss) / kd, 0.0);
    const double tau_k = mean - std::sqrt(delta);
    if (tau_k <= sorted[k - 1]) tau_star = tau_k;
  }
  std::size_t support = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = shifted[i] - tau_star;
    out[i] = v > 0.0 ? v * v : 0.0;
    support += out[i] > 0.0;
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return {tau_star + m, support};
}

// Generic alpha in (1, 2): bisection on eta.
inline Threshold entmax_bisect_into(std::span<const double> z, double alpha,
                                    std::span<double> out) {
  const double am1 = alpha - 1.0;
  const double inv = 1.0 / am1;
  const double m = max_of(z) * am1;
  const double n = static_cast<double>(z.size());
  std::vector<double> x(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] * am1 - m;

  auto mass = [&](double eta) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = x[i] - eta;
      out[i] = v > 0.0 ? std::pow(v, inv) : 0.0;
      s += out[i];
    }
    return s;
  };

  double lo = -1.0;                       // mass(lo) >= 1
  double hi = -std::pow(1.0 / n, am1);    // mass(hi) <= 1
  double eta = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    eta = 0.5 * (lo + hi);
    const double f = mass(eta) - 1.0;
    if (std::abs(f) < 1e-12) break;
    if (f > 0.0) {
      lo = eta;
    } else {
      hi = eta;
    }
  }
  const double sum = mass(eta);
  std::size_t support = 0;
  for (double& v : out) {
    v /= sum;
    support += v > 0.0;
  }
  return {eta + m, support};
}

}  // namespace detail

/// Writes alpha-entmax(z) into `out` and returns the threshold. `out` must
/// have the same length as `z`.
inline Threshold entmax_into(std::span<const double> z, Alpha alpha,
                             std::span<double> out) {
  detail::require_finite(z);
  if (out.size() != z.size()) throw std::invalid_argument("entmax: output length mismatch");
  if (z.size() == 1) {
    out[0] = 1.0;
    return {alpha.is_softmax() ? z[0] : (alpha.value() - 1.0) * z[0] - 1.0, 1};
  }
  const double a = alpha.value();
  if (a == 1.0) return detail::softmax_into(z, out);
  if (a == 2.0) return detail::sparsemax_into(z, out);
  if (a == 1.5) return detail::entmax15_into(z, out);
  return detail::entmax_bisect_into(z, a, out);
}

inline std::vector<double> entmax(std::span<const double> z, Alpha alpha) {
  std::vector<double> p(z.size());
  entmax_into(z, alpha, p);
  return p;
}

inline Threshold entmax_threshold(std::span<const double> z, Alpha alpha) {
  std::vector<double> p(z.size());
  return entmax_into(z, alpha, p);
}

/// Tsallis alpha-entropy; Shannon entropy (natural log) at alpha = 1.
inline double tsallis_entropy(std::span<const double> p, Alpha alpha) {
  const double a = alpha.value();
  double h = 0.0;
  if (alpha.is_softmax()) {
    for (double v : p) {
      if (v > 0.0) h -= v * std::log(v);
    }
    return h;
  }
  for (double v : p) {
    if (v > 0.0) h += v - std::pow(v, a);
  }
  return h / (a * (a - 1.0));
}

namespace detail {

inline void check_loss_args(std::span<const double> z, std::span<const double> p,
                            double tau) {
  if (z.size() != p.size()) throw std::invalid_argument("fy_loss: length mismatch");
  if (!(tau > 0.0)) throw std::invalid_argument("fy_loss: tau must be positive");
}

}  // namespace detail

/// Fenchel-Young loss of the scaled logits z / tau against target p:
///   (p_hat - p)^T w + H(p_hat) - H(p),  w = z / tau,  p_hat = entmax(w).
/// Nonnegative, and zero iff p == entmax(z / tau).
/// If `p_hat_out` is non-empty it receives entmax(z / tau).
inline double fy_loss(std::span<const double> z, std::span<const double> p, Alpha alpha,
                      double tau, std::span<double> p_hat_out = {}) {
  detail::check_loss_args(z, p, tau);
  std::vector<double> w(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) w[i] = z[i] / tau;
  std::vector<double> local;
  if (p_hat_out.empty()) {
    local.resize(z.size());
    p_hat_out = local;
  }
  const Threshold th = entmax_into(w, alpha, p_hat_out);

  double pw = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) pw += p[i] * w[i];
  const double h_target = tsallis_entropy(p, alpha);
  if (alpha.is_softmax()) {
    // p_hat^T w + H(p_hat) collapses to log-sum-exp(w).
    return std::max(th.eta - pw - h_target, 0.0);
  }
  double phw = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) phw += p_hat_out[i] * w[i];
  return std::max(phw + tsallis_entropy(p_hat_out, alpha) - pw - h_target, 0.0);
}

/// Gradient of fy_loss with respect to z: (entmax(z / tau) - p) / tau.
inline std::vector<double> fy_loss_grad(std::span<const double> z, std::span<const double> p,
                                        Alpha alpha, double tau) {
  detail::check_loss_args(z, p, tau);
  std::vector<double> w(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) w[i] = z[i] / tau;
  std::vector<double> g = entmax(w, alpha);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (g[i] - p[i]) / tau;
  return g;
}

/// Jacobian-vector product of entmax at its output p:
///   J v = s * v - s (s^T v) / (1^T s),  s_i = p_i^(2 - alpha) on the support.
/// J is symmetric, so this is also J^T v.
inline std::vector<double> entmax_jacobian_vector_product(std::span<const double> p, Alpha alpha,
                                                          std::span<const double> v) {
  if (p.size() != v.size()) throw std::invalid_argument("entmax jvp: length mismatch");
  const double e = 2.0 - alpha.value();
  std::vector<double> s(p.size(), 0.0);
  double s_sum = 0.0;
  double sv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s[i] = e == 1.0 ? p[i] : std::pow(p[i], e);
    s_sum += s[i];
    sv += s[i] * v[i];
  }
  std::vector<double> out(p.size());
  const double c = s_sum > 0.0 ? sv / s_sum : 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = s[i] * v[i] - s[i] * c;
  return out;
}

/// Parses "softmax", "entmax15" or "sparsemax".
inline Alpha parse_alpha(const std::string& name) {
  if (name == "softmax") return Alpha::softmax();
  if (name == "entmax15") return Alpha::entmax15();
  if (name == "sparsemax") return Alpha::sparsemax();
  throw std::invalid_argument("unknown alpha '" + name +
                              "' (expected softmax, entmax15 or sparsemax)");
}

inline std::string alpha_name(Alpha alpha) {
  if (alpha.value() == 1.0) return "softmax";
  if (alpha.value() == 1.5) return "entmax15";
  if (alpha.value() == 2.0) return "sparsemax";
  return "entmax" + std::to_string(alpha.value());
}

}  // namespace semco

#endif  // SEMCO_ENTMAX_HPP_
