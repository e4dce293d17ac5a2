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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "semco/entmax.hpp"
#include "semco/random.hpp"

namespace semco {
namespace {

std::vector<double> random_logits(Rng& rng, std::size_t n, double scale) {
  std::vector<double> z(n);
  for (double& v : z) v = scale * rng.normal();
  return z;
}

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  for (double& v : p) v = rng.uniform() + 1e-3;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= s;
  return p;
}

const double kAlphas[] = {1.0, 1.25, 1.5, 1.75, 2.0};

TEST(AlphaTest, RejectsOutOfRange) {
  EXPECT_THROW(Alpha(0.99), std::invalid_argument);
  EXPECT_THROW(Alpha(2.01), std::invalid_argument);
  EXPECT_THROW(Alpha(std::nan("")), std::invalid_argument);
  EXPECT_NO_THROW(Alpha(1.0));
  EXPECT_NO_THROW(Alpha(2.0));
  EXPECT_THROW(parse_alpha("entmax2"), std::invalid_argument);
  EXPECT_EQ(parse_alpha("entmax15").value(), 1.5);
}

TEST(EntmaxTest, SoftmaxOfEqualLogitsIsUniform) {
  const auto p = entmax(std::vector<double>{0.0, 0.0}, Alpha::softmax());
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(EntmaxTest, SparsemaxSaturates) {
  const std::vector<double> z{1.0, 0.0, -1.0};
  const auto p = entmax(z, Alpha::sparsemax());
  const auto ref = oracle::simplex_projection_exhaustive(z);
  EXPECT_EQ(p, (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_EQ(ref, (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_EQ(entmax(std::vector<double>{10.0, 0.0}, Alpha::sparsemax()), (std::vector<double>{1.0, 0.0}));
}

TEST(EntmaxTest, Entmax15TwoLogits) {
  // Frozen from a 200-step bisection on the threshold at 30 digits.
  const auto p = entmax(std::vector<double>{0.5, -0.5}, Alpha::entmax15());
  EXPECT_NEAR(p[0], 0.830718913883073823812701969204788, 1e-10);
  EXPECT_NEAR(p[1], 0.169281086116926176187298030795065, 1e-10);
  const auto th = entmax_threshold(std::vector<double>{0.5, -0.5}, Alpha::entmax15());
  EXPECT_NEAR(th.eta, -0.66143782776614764762540393841, 1e-10);
  EXPECT_EQ(th.support_size, 2u);
}

TEST(EntmaxTest, UniformForEqualLogitsAllAlphas) {
  for (double a : kAlphas) {
    const auto p = entmax(std::vector<double>{0.0, 0.0, 0.0}, Alpha(a));
    for (double v : p) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12) << "alpha " << a;
  }
}

TEST(EntmaxTest, SingleLogitIsOne) {
  for (double a : kAlphas) {
    EXPECT_EQ(entmax(std::vector<double>{-7.5}, Alpha(a)), std::vector<double>{1.0});
  }
}

TEST(EntmaxTest, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(entmax(std::vector<double>{}, Alpha::softmax()), std::invalid_argument);
  EXPECT_THROW(entmax(std::vector<double>{0.0, NAN}, Alpha::sparsemax()), std::invalid_argument);
  EXPECT_THROW(entmax(std::vector<double>{INFINITY, 0.0}, Alpha::entmax15()), std::invalid_argument);
}

TEST(EntmaxTest, AgreesWithOracle) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.index(16);
    const auto z = random_logits(rng, n, 3.0);
    for (double a : kAlphas) {
      const auto p = entmax(z, Alpha(a));
      const auto q = oracle::entmax(z, a);
      for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(p[i], q[i], 1e-8) << "alpha " << a;
    }
    const auto s = entmax(z, Alpha::sparsemax());
    const auto proj = oracle::simplex_projection_exhaustive(z);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(s[i], proj[i], 1e-10);
  }
}

// Simplex validity, translation invariance, permutation equivariance and
// order preservation over random inputs.
TEST(EntmaxProperties, RandomSweep) {
  Rng rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + rng.index(64);
    const auto z = random_logits(rng, n, 1.0 + 4.0 * rng.uniform());
    const double a = 1.0 + rng.uniform();
    const Alpha alpha(trial % 5 == 0 ? 2.0 : trial % 5 == 1 ? 1.5 : a);
    const auto p = entmax(z, alpha);
    double sum = 0.0;
    for (double v : p) {
      ASSERT_GE(v, 0.0);
      sum += v;
    }
    ASSERT_NEAR(sum, 1.0, 1e-9);

    const double c = 10.0 * rng.normal();
    auto shifted = z;
    for (double& v : shifted) v += c;
    const auto ps = entmax(shifted, alpha);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(p[i], ps[i], 1e-12);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<double> zp(n);
    for (std::size_t i = 0; i < n; ++i) zp[i] = z[perm[i]];
    const auto pp = entmax(zp, alpha);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(pp[i], p[perm[i]], 1e-14);

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (z[i] >= z[j]) ASSERT_GE(p[i], p[j]);
  }
}

TEST(EntmaxProperties, SoftmaxHasFullSupport) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto z = random_logits(rng, 20, 5.0);
    for (double v : entmax(z, Alpha::softmax())) EXPECT_GT(v, 0.0);
  }
}

TEST(TsallisTest, KnownValues) {
  for (double a : kAlphas) EXPECT_EQ(tsallis_entropy(std::vector<double>{1.0, 0.0}, Alpha(a)), 0.0);
  EXPECT_DOUBLE_EQ(tsallis_entropy(std::vector<double>{0.5, 0.5}, Alpha(2.0)), 0.25);
  EXPECT_NEAR(tsallis_entropy(std::vector<double>{0.5, 0.5}, Alpha(1.0)), std::log(2.0), 1e-15);
}

TEST(TsallisTest, Nonnegative) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_simplex(rng, 1 + rng.index(10));
    for (double a : kAlphas) EXPECT_GE(tsallis_entropy(p, Alpha(a)), 0.0);
  }
}

TEST(FyLossTest, ZeroAtOptimum) {
  for (double a : kAlphas) {
    EXPECT_NEAR(fy_loss(std::vector<double>{0.0, 0.0}, std::vector<double>{0.5, 0.5}, Alpha(a), 1.0), 0.0,
                1e-15);
  }
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto z = random_logits(rng, 1 + rng.index(12), 2.0);
    const double tau = 0.1 + rng.uniform();
    std::vector<double> w(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) w[i] = z[i] / tau;
    for (double a : kAlphas) {
      const auto p = entmax(w, Alpha(a));
      EXPECT_NEAR(fy_loss(z, p, Alpha(a), tau), 0.0, 1e-10);
    }
  }
}

TEST(FyLossTest, CrossEntropyOfUniformPrediction) {
  EXPECT_NEAR(fy_loss(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.0}, Alpha(1.0), 1.0),
              std::log(2.0), 1e-15);
}

TEST(FyLossTest, Nonnegative) {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.index(12);
    const auto z = random_logits(rng, n, 3.0);
    const auto p = random_simplex(rng, n);
    for (double a : kAlphas) EXPECT_GE(fy_loss(z, p, Alpha(a), 0.5), 0.0);
  }
}

TEST(FyLossTest, Errors) {
  EXPECT_THROW(fy_loss(std::vector<double>{0.0}, std::vector<double>{0.5, 0.5}, Alpha(1.0), 1.0),
               std::invalid_argument);
  EXPECT_THROW(fy_loss(std::vector<double>{0.0, 1.0}, std::vector<double>{0.5, 0.5}, Alpha(1.0), 0.0),
               std::invalid_argument);
  EXPECT_THROW(fy_loss_grad(std::vector<double>{0.0, 1.0}, std::vector<double>{0.5, 0.5}, Alpha(1.0), -1.0),
               std::invalid_argument);
}

TEST(FyLossGradTest, VanishesAtOptimum) {
  const auto g = fy_loss_grad(std::vector<double>{0.0, 0.0}, std::vector<double>{0.5, 0.5}, Alpha(1.5), 1.0);
  EXPECT_EQ(g, (std::vector<double>{0.0, 0.0}));
}

TEST(FyLossGradTest, MatchesFiniteDifferences) {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto z = random_logits(rng, 8, 1.0);
    const auto p = random_simplex(rng, 8);
    for (double a : {1.0, 1.5, 2.0}) {
      for (double tau : {0.1, 1.0}) {
        const auto g = fy_loss_grad(z, p, Alpha(a), tau);
        const auto fd = oracle::finite_difference(
            [&](const std::vector<double>& x) { return fy_loss(x, p, Alpha(a), tau); }, z, 1e-6);
        EXPECT_LT(oracle::relative_error(g, fd), 1e-6) << "alpha " << a << " tau " << tau;
      }
    }
  }
}

TEST(FyLossGradTest, SoftmaxIsCrossEntropyGradient) {
  Rng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const auto z = random_logits(rng, 6, 2.0);
    const auto p = random_simplex(rng, 6);
    const auto g = fy_loss_grad(z, p, Alpha(1.0), 1.0);
    const auto s = oracle::entmax(z, 1.0);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(g[i], s[i] - p[i], 1e-14);
  }
}

TEST(FyLossGradTest, ZeroOutsideSupportForZeroTargets) {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 12;
    const auto z = random_logits(rng, n, 3.0);
    std::vector<double> p(n, 0.0);
    p[rng.index(n)] = 1.0;
    for (double a : {1.25, 1.5, 2.0}) {
      const double tau = 0.5;
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = z[i] / tau;
      const auto p_hat = entmax(w, Alpha(a));
      const auto g = fy_loss_grad(z, p, Alpha(a), tau);
      for (std::size_t i = 0; i < n; ++i) {
        if (p_hat[i] == 0.0) EXPECT_EQ(g[i], -p[i] / tau);
      }
    }
  }
}

TEST(JacobianTest, SoftmaxMatchesDirectJacobian) {
  Rng rng(29);
  const auto z = random_logits(rng, 5, 1.0);
  const auto p = entmax(z, Alpha(1.0));
  const auto v = random_logits(rng, 5, 1.0);
  const auto jv = entmax_jacobian_vector_product(p, Alpha(1.0), v);
  for (std::size_t i = 0; i < 5; ++i) {
    double ref = 0.0;
    for (std::size_t j = 0; j < 5; ++j) ref += (i == j ? p[i] : 0.0) * v[j] - p[i] * p[j] * v[j];
    EXPECT_NEAR(jv[i], ref, 1e-15);
  }
}

TEST(JacobianTest, SparsemaxOnSupport) {
  const std::vector<double> p{0.5, 0.5, 0.0};
  const std::vector<double> v{1.0, 3.0, 7.0};
  const auto jv = entmax_jacobian_vector_product(p, Alpha(2.0), v);
  EXPECT_DOUBLE_EQ(jv[0], 1.0 - 2.0);
  EXPECT_DOUBLE_EQ(jv[1], 3.0 - 2.0);
  EXPECT_DOUBLE_EQ(jv[2], 0.0);
}

TEST(JacobianTest, ConservesProbability) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto z = random_logits(rng, 10, 2.0);
    for (double a : kAlphas) {
      const auto p = entmax(z, Alpha(a));
      const auto jv = entmax_jacobian_vector_product(p, Alpha(a), std::vector<double>(10, 1.0));
      for (double x : jv) EXPECT_NEAR(x, 0.0, 1e-14);
    }
  }
}

TEST(JacobianTest, MatchesFiniteDifferencesOfEntmax) {
  Rng rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const auto z = random_logits(rng, 7, 1.0);
    const auto v = random_logits(rng, 7, 1.0);
    for (double a : {1.0, 1.25, 1.5, 1.75, 2.0}) {
      const auto p = entmax(z, Alpha(a));
      const auto jv = entmax_jacobian_vector_product(p, Alpha(a), v);
      // Directional derivative of entmax along v.
      const double h = 1e-6;
      auto zp = z;
      auto zm = z;
      for (std::size_t i = 0; i < 7; ++i) {
        zp[i] += h * v[i];
        zm[i] -= h * v[i];
      }
      const auto pp = oracle::entmax(zp, a);
      const auto pm = oracle::entmax(zm, a);
      std::vector<double> fd(7);
      for (std::size_t i = 0; i < 7; ++i) fd[i] = (pp[i] - pm[i]) / (2 * h);
      EXPECT_LT(oracle::relative_error(jv, fd), 1e-5) << "alpha " << a;
    }
  }
}

TEST(EntmaxTest, SupportSizeReported) {
  const std::vector<double> z{3.0, 2.9, 0.0, -1.0};
  EXPECT_EQ(entmax_threshold(z, Alpha(2.0)).support_size, 2u);
  EXPECT_EQ(entmax_threshold(z, Alpha(1.0)).support_size, 4u);
}

}  // namespace
}  // namespace semco
