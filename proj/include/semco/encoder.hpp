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

// Multimodal content encoder and the teacher-to-student projection head.
//
// Encoder, per item:
//   h_m   = relu(batch_norm(W_m x_m + b_m))          for each content mode m
//   a     = softmax(W_2 relu(W_1 [h_1; ...; h_M] + b_1) + b_2)
//   y     = l2_normalize(W_o (sum_m a_m h_m) + b_o)

#ifndef SEMCO_ENCODER_HPP_
#define SEMCO_ENCODER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "semco/ops.hpp"
#include "semco/params.hpp"
#include "semco/random.hpp"

namespace semco {

struct EncoderConfig {
  std::vector<std::size_t> mode_dims;
  std::size_t hidden_dim = 192;
  std::size_t output_dim = 64;
  std::uint64_t seed = 0;

  void validate() const {
    if (mode_dims.empty()) throw std::invalid_argument("encoder: at least one mode required");
    for (std::size_t d : mode_dims) {
      if (d == 0) throw std::invalid_argument("encoder: mode dims must be positive");
    }
    if (hidden_dim == 0 || output_dim == 0) {
      throw std::invalid_argument("encoder: hidden/output dims must be positive");
    }
  }
};

inline void to_json(nlohmann::json& j, const EncoderConfig& c) {
  j = {{"mode_dims", c.mode_dims},
       {"hidden_dim", c.hidden_dim},
       {"output_dim", c.output_dim},
       {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, EncoderConfig& c) {
  j.at("mode_dims").get_to(c.mode_dims);
  j.at("hidden_dim").get_to(c.hidden_dim);
  j.at("output_dim").get_to(c.output_dim);
  j.at("seed").get_to(c.seed);
}

template <class T>
struct EncodeResult {
  Matrix<T> embeddings;  // items x output_dim, unit rows
  Matrix<T> attention;   // items x modes, rows on the simplex
};

template <class T>
class Encoder {
 public:
  /// Saved activations from a train-mode forward pass.
  struct Tape {
    std::vector<Matrix<T>> inputs;
    std::vector<typename BatchNorm<T>::Cache> bn;
    std::vector<Matrix<T>> normed;  // batch-norm output, pre-relu
    std::vector<Matrix<T>> hidden;  // h_m
    Matrix<T> concat;
    Matrix<T> att_pre;
    Matrix<T> att_hidden;
    Matrix<T> attention;
    Matrix<T> fused;
    Matrix<T> out_pre;
  };

  explicit Encoder(EncoderConfig config) : config_(std::move(config)) {
    config_.validate();
    Rng rng(config_.seed);
    const std::size_t h = config_.hidden_dim;
    for (std::size_t m = 0; m < config_.mode_dims.size(); ++m) {
      const std::string base = "mode" + std::to_string(m);
      mode_linear_.emplace_back(store_, base + ".linear", config_.mode_dims[m], h, rng);
      mode_bn_.emplace_back(store_, base + ".bn", h);
    }
    const std::size_t modes = config_.mode_dims.size();
    att_fc1_ = Linear<T>(store_, "attention.fc1", modes * h, h, rng);
    att_fc2_ = Linear<T>(store_, "attention.fc2", h, modes, rng);
    output_ = Linear<T>(store_, "output", h, config_.output_dim, rng);
  }

  Encoder(Encoder&&) noexcept = default;
  Encoder& operator=(Encoder&&) noexcept = default;

  const EncoderConfig& config() const { return config_; }
  std::size_t num_modes() const { return config_.mode_dims.size(); }
  ParamStore<T>& params() { return store_; }
  const ParamStore<T>& params() const { return store_; }

  /// Train mode: batch statistics, running stats updated, activations saved.
  EncodeResult<T> forward_train(std::span<const Matrix<T>> features, Tape& tape) {
    check_inputs(features);
    tape = Tape{};
    tape.inputs.assign(features.begin(), features.end());
    for (std::size_t m = 0; m < num_modes(); ++m) {
      const Matrix<T> pre = mode_linear_[m].forward(features[m]);
      typename BatchNorm<T>::Cache cache;
      Matrix<T> normed = mode_bn_[m].forward_train(pre, cache);
      tape.hidden.push_back(relu(normed));
      tape.normed.push_back(std::move(normed));
      tape.bn.push_back(std::move(cache));
    }
    return fuse(tape);
  }

  /// Eval mode: frozen running stats; a pure function of inputs and weights.
  EncodeResult<T> forward_eval(std::span<const Matrix<T>> features) const {
    check_inputs(features);
    Tape tape;
    for (std::size_t m = 0; m < num_modes(); ++m) {
      tape.hidden.push_back(relu(mode_bn_[m].forward_eval(mode_linear_[m].forward(features[m]))));
    }
    return fuse(tape);
  }

  EncodeResult<T> encode(std::span<const Matrix<T>> features, Mode mode, Tape* tape = nullptr) {
    if (mode == Mode::eval) return forward_eval(features);
    Tape local;
    return forward_train(features, tape ? *tape : local);
  }

  /// Accumulates parameter gradients given dLoss/dY.
  void backward(const Tape& tape, const Matrix<T>& d_embeddings) {
    const Matrix<T> d_out_pre = l2_normalize_rowwise_backward(tape.out_pre, d_embeddings);
    const Matrix<T> d_fused = output_.backward(tape.fused, d_out_pre);
    auto ws = weighted_sum_backward<T>(tape.hidden, tape.attention, d_fused);
    const Matrix<T> d_logits = softmax_rowwise_backward(tape.attention, ws.d_weights);
    const Matrix<T> d_att_hidden = att_fc2_.backward(tape.att_hidden, d_logits);
    const Matrix<T> d_att_pre = relu_backward(tape.att_pre, d_att_hidden);
    const Matrix<T> d_concat = att_fc1_.backward(tape.concat, d_att_pre);
    const std::vector<std::size_t> widths(num_modes(), config_.hidden_dim);
    auto d_parts = concat_columns_backward(d_concat, widths);
    for (std::size_t m = 0; m < num_modes(); ++m) {
      Matrix<T> d_h = std::move(ws.d_rows[m]);
      d_h += d_parts[m];
      const Matrix<T> d_normed = relu_backward(tape.normed[m], std::move(d_h));
      const Matrix<T> d_pre = mode_bn_[m].backward(tape.bn[m], d_normed);
      mode_linear_[m].backward(tape.inputs[m], d_pre);
    }
  }

 private:
  void check_inputs(std::span<const Matrix<T>> features) const {
    if (features.size() != num_modes()) {
      throw std::invalid_argument("encoder: expected " + std::to_string(num_modes()) +
                                  " modes, got " + std::to_string(features.size()));
    }
    for (std::size_t m = 0; m < features.size(); ++m) {
      if (features[m].rows() != features[0].rows()) {
        throw std::invalid_argument("encoder: row-count mismatch across modes");
      }
      if (features[m].cols() != config_.mode_dims[m]) {
        throw std::invalid_argument("encoder: mode " + std::to_string(m) + " has dim " +
                                    std::to_string(features[m].cols()) + ", expected " +
                                    std::to_string(config_.mode_dims[m]));
      }
    }
  }

  EncodeResult<T> fuse(Tape& tape) const {
    tape.concat = concat_columns<T>(tape.hidden);
    tape.att_pre = att_fc1_.forward(tape.concat);
    tape.att_hidden = relu(tape.att_pre);
    tape.attention = softmax_rowwise(att_fc2_.forward(tape.att_hidden));
    tape.fused = weighted_sum<T>(tape.hidden, tape.attention);
    tape.out_pre = output_.forward(tape.fused);
    return {l2_normalize_rowwise(tape.out_pre), tape.attention};
  }

  EncoderConfig config_;
  ParamStore<T> store_;
  std::vector<Linear<T>> mode_linear_;
  std::vector<BatchNorm<T>> mode_bn_;
  Linear<T> att_fc1_;
  Linear<T> att_fc2_;
  Linear<T> output_;
};

struct ProjectionConfig {
  std::size_t input_dim = 384;
  std::size_t hidden_dim = 192;
  std::size_t output_dim = 64;
  std::uint64_t seed = 0;
};

inline void to_json(nlohmann::json& j, const ProjectionConfig& c) {
  j = {{"input_dim", c.input_dim},
       {"hidden_dim", c.hidden_dim},
       {"output_dim", c.output_dim},
       {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, ProjectionConfig& c) {
  j.at("input_dim").get_to(c.input_dim);
  j.at("hidden_dim").get_to(c.hidden_dim);
  j.at("output_dim").get_to(c.output_dim);
  j.at("seed").get_to(c.seed);
}

/// Two-layer perceptron mapping teacher embeddings to unit-norm student
/// embeddings: l2_normalize(W_2 relu(W_1 y_T + b_1) + b_2).
template <class T>
class ProjectionHead {
 public:
  struct Tape {
    Matrix<T> input;
    Matrix<T> pre1;
    Matrix<T> hidden;
    Matrix<T> pre2;
  };

  explicit ProjectionHead(ProjectionConfig config) : config_(config) {
    if (config_.output_dim >= config_.input_dim) {
      throw std::invalid_argument("projection: output dim must be smaller than teacher dim");
    }
    if (config_.hidden_dim == 0 || config_.output_dim == 0) {
      throw std::invalid_argument("projection: dims must be positive");
    }
    Rng rng(config_.seed);
    fc1_ = Linear<T>(store_, "fc1", config_.input_dim, config_.hidden_dim, rng);
    fc2_ = Linear<T>(store_, "fc2", config_.hidden_dim, config_.output_dim, rng);
  }

  ProjectionHead(ProjectionHead&&) noexcept = default;
  ProjectionHead& operator=(ProjectionHead&&) noexcept = default;

  const ProjectionConfig& config() const { return config_; }
  ParamStore<T>& params() { return store_; }
  const ParamStore<T>& params() const { return store_; }

  Matrix<T> forward(const Matrix<T>& teacher, Tape* tape = nullptr) const {
    if (teacher.cols() != config_.input_dim) {
      throw std::invalid_argument("projection: expected input dim " +
                                  std::to_string(config_.input_dim));
    }
    Tape local;
    Tape& t = tape ? *tape : local;
    t.input = teacher;
    t.pre1 = fc1_.forward(teacher);
    t.hidden = relu(t.pre1);
    t.pre2 = fc2_.forward(t.hidden);
    return l2_normalize_rowwise(t.pre2);
  }

  /// Accumulates parameter gradients; returns dLoss/d(teacher input).
  Matrix<T> backward(const Tape& tape, const Matrix<T>& d_out) {
    const Matrix<T> d_pre2 = l2_normalize_rowwise_backward(tape.pre2, d_out);
    const Matrix<T> d_hidden = fc2_.backward(tape.hidden, d_pre2);
    return fc1_.backward(tape.input, relu_backward(tape.pre1, d_hidden));
  }

 private:
  ProjectionConfig config_;
  ParamStore<T> store_;
  Linear<T> fc1_;
  Linear<T> fc2_;
};

}  // namespace semco

#endif  // SEMCO_ENCODER_HPP_
