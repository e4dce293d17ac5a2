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

#ifndef SEMCO_PARAMS_HPP_
#define SEMCO_PARAMS_HPP_

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semco/random.hpp"
#include "semco/tensor.hpp"

namespace semco {

/// A named tensor with its gradient and Adam moments. Buffers (for example
/// batch-norm running statistics) are stored alongside but never updated by
/// the optimizer.
template <class T>
struct Param {
  Matrix<T> value;
  Matrix<T> grad;
  Matrix<T> m;
  Matrix<T> v;
  bool trainable = true;
  bool decay = false;  // receives L2 weight decay
};

/// Owns the parameters of one model. Node-based storage keeps references
/// handed out by add() stable across moves of the store.
template <class T>
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) noexcept = default;
  ParamStore& operator=(ParamStore&&) noexcept = default;

  Param<T>& add(const std::string& name, std::size_t rows, std::size_t cols, bool trainable,
                bool decay) {
    auto [it, inserted] = params_.try_emplace(name);
    if (!inserted) throw std::invalid_argument("duplicate parameter '" + name + "'");
    Param<T>& p = it->second;
    p.value = Matrix<T>(rows, cols);
    p.grad = Matrix<T>(rows, cols);
    p.m = Matrix<T>(rows, cols);
    p.v = Matrix<T>(rows, cols);
    p.trainable = trainable;
    p.decay = decay;
    return p;
  }

  Param<T>& at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw std::out_of_range("no parameter '" + name + "'");
    return it->second;
  }
  const Param<T>& at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw std::out_of_range("no parameter '" + name + "'");
    return it->second;
  }
  bool contains(const std::string& name) const { return params_.count(name) != 0; }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  std::size_t size() const { return params_.size(); }

  void zero_grad() {
    for (auto& [_, p] : params_) p.grad.fill(T{0});
  }

  std::size_t step() const { return step_; }
  void advance_step() { ++step_; }

  /// Copies of every tensor value, keyed by name.
  std::map<std::string, Matrix<T>> snapshot() const {
    std::map<std::string, Matrix<T>> out;
    for (const auto& [name, p] : params_) out.emplace(name, p.value);
    return out;
  }

  template <class U>
  void restore(const std::map<std::string, Matrix<U>>& values) {
    for (auto& [name, p] : params_) {
      auto it = values.find(name);
      if (it == values.end()) throw std::out_of_range("missing tensor '" + name + "'");
      if (it->second.rows() != p.value.rows() || it->second.cols() != p.value.cols()) {
        throw std::invalid_argument("tensor '" + name + "' has the wrong shape");
      }
      p.value = it->second.template cast<T>();
    }
  }

 private:
  std::map<std::string, Param<T>> params_;
  std::size_t step_ = 0;
};

/// Uniform fan-in initialization, U(-sqrt(6 / fan_in), sqrt(6 / fan_in)).
template <class T>
void kaiming_uniform(Matrix<T>& w, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (T& v : w.values()) v = static_cast<T>(rng.uniform(-bound, bound));
}

}  // namespace semco

#endif  // SEMCO_PARAMS_HPP_
