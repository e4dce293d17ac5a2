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

// Test-only reference implementations. Nothing here includes or calls the
// library code paths they are used to check.

#ifndef SEMCO_TESTS_ORACLES_HPP_
#define SEMCO_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace semco::oracle {

/// Entmax by bisection on the threshold in long double, or a direct
/// softmax at alpha = 1.
inline std::vector<double> entmax(const std::vector<double>& z, double alpha) {
  const std::size_t n = z.size();
  std::vector<double> out(n);
  if (alpha == 1.0) {
    long double m = z[0];
    for (double v : z) m = std::max<long double>(m, v);
    long double s = 0;
    for (double v : z) s += std::exp(static_cast<long double>(v) - m);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(std::exp(z[i] - m) / s);
    return out;
  }
  const long double am1 = alpha - 1.0L;
  std::vector<long double> x(n);
  long double xmax = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = am1 * z[i];
    xmax = std::max(xmax, x[i]);
  }
  auto mass = [&](long double eta, std::vector<long double>* p) {
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long double v = x[i] - eta;
      const long double q = v > 0 ? std::pow(v, 1.0L / am1) : 0.0L;
      if (p) (*p)[i] = q;
      s += q;
    }
    return s;
  };
  long double lo = xmax - 1.0L;
  long double hi = xmax;
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    if (mass(mid, nullptr) >= 1.0L) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::vector<long double> p(n);
  const long double s = mass(0.5L * (lo + hi), &p);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(p[i] / s);
  return out;
}

/// Euclidean projection onto the simplex by enumerating every candidate
/// support set and keeping the one satisfying the KKT conditions.
inline std::vector<double> simplex_projection_exhaustive(const std::vector<double>& z) {
  const std::size_t n = z.size();
  std::vector<double> best(n, 0.0);
  for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
    double sum = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1UL << i)) {
        sum += z[i];
        ++k;
      }
    }
    const double eta = (sum - 1.0) / static_cast<double>(k);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const bool in = mask & (1UL << i);
      ok = in ? z[i] > eta : z[i] <= eta;
    }
    if (ok) {
      for (std::size_t i = 0; i < n; ++i) best[i] = (mask & (1UL << i)) ? z[i] - eta : 0.0;
      return best;
    }
  }
  return best;
}

/// Cross-entropy of softmax(z) against one-hot target j.
inline double softmax_cross_entropy(const std::vector<double>& z, std::size_t j) {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s) - z[j];
}

/// Central finite-difference gradient of f at x.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = f(x);
    x[i] = x0 - h;
    const double fm = f(x);
    x[i] = x0;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// |a - b| / max(|a|, |b|) over whole vectors (0 when both vanish).
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(std::max(na, nb));
  return denom == 0.0 ? std::sqrt(diff) : std::sqrt(diff) / denom;
}

}  // namespace semco::oracle

#endif  // SEMCO_TESTS_ORACLES_HPP_
