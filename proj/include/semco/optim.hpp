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

#ifndef SEMCO_OPTIM_HPP_
#define SEMCO_OPTIM_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

#include "semco/params.hpp"

namespace semco {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // L2 coefficient, applied to decay-flagged params only
};

/// One bias-corrected Adam update over every trainable parameter. The L2 term
/// weight_decay * param is added to the gradient before the moment update.
template <class T>
void adam_step(ParamStore<T>& store, double lr, const AdamOptions& opt = {}) {
  if (!(lr > 0.0)) throw std::invalid_argument("adam_step: learning rate must be positive");
  store.advance_step();
  const double t = static_cast<double>(store.step());
  const double c1 = 1.0 - std::pow(opt.beta1, t);
  const double c2 = 1.0 - std::pow(opt.beta2, t);
  for (auto& [_, p] : store) {
    if (!p.trainable) continue;
    const double wd = p.decay ? opt.weight_decay : 0.0;
    auto& w = p.value.values();
    const auto& g = p.grad.values();
    auto& m = p.m.values();
    auto& v = p.v.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = static_cast<double>(g[i]) + wd * static_cast<double>(w[i]);
      const double mi = opt.beta1 * m[i] + (1.0 - opt.beta1) * gi;
      const double vi = opt.beta2 * v[i] + (1.0 - opt.beta2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      w[i] = static_cast<T>(w[i] - lr * (mi / c1) / (std::sqrt(vi / c2) + opt.eps));
    }
  }
}

enum class ScheduleKind { cosine_decay, linear_warmup_then_cosine };

struct LrSchedule {
  ScheduleKind kind = ScheduleKind::cosine_decay;
  double base_lr = 1e-3;
  std::size_t total_epochs = 15;
  std::size_t warmup_steps = 0;
};

/// Learning rate at a global step. Cosine decays base_lr to zero over
/// total_epochs * steps_per_epoch steps; the warmup variant ramps linearly
/// from zero first and runs the cosine over the remaining steps.
inline double lr_at(const LrSchedule& s, std::size_t global_step, std::size_t steps_per_epoch) {
  if (!(s.base_lr > 0.0)) throw std::invalid_argument("lr schedule: base_lr must be positive");
  const double total = static_cast<double>(s.total_epochs * steps_per_epoch);
  const double t = static_cast<double>(global_step);
  if (t >= total) return 0.0;
  double start = 0.0;
  if (s.kind == ScheduleKind::linear_warmup_then_cosine && s.warmup_steps > 0) {
    const double w = static_cast<double>(s.warmup_steps);
    if (t < w) return s.base_lr * t / w;
    start = w;
  }
  const double span = total - start;
  if (span <= 0.0) return 0.0;
  return s.base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * (t - start) / span));
}

}  // namespace semco

#endif  // SEMCO_OPTIM_HPP_
