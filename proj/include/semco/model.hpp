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

// Preference scoring through encoded content: user embeddings are the
// normalized sums of their items' encodings, and any item (cold or warm) is
// scored by a dot product with its encoding.

#ifndef SEMCO_MODEL_HPP_
#define SEMCO_MODEL_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "semco/checkpoint.hpp"
#include "semco/data.hpp"
#include "semco/encoder.hpp"
#include "semco/interactions.hpp"
#include "semco/tensor.hpp"

namespace semco {

template <class T>
struct UserEmbeddingMatrix {
  Matrix<T> embeddings;     // users x d; unit rows, zero rows for empty users
  std::vector<bool> empty;  // user had no interactions
};

/// Row u = l2_normalize(sum of y_i over the user's items).
template <class T>
UserEmbeddingMatrix<T> build_user_embeddings(const InteractionMatrix& r, const Matrix<T>& items) {
  if (r.n_items() != items.rows()) {
    throw std::invalid_argument("build_user_embeddings: interaction columns != item rows");
  }
  UserEmbeddingMatrix<T> out{Matrix<T>(r.n_users(), items.cols()),
                             std::vector<bool>(r.n_users(), false)};
  for (std::size_t u = 0; u < r.n_users(); ++u) {
    const auto row = r.items_of(u);
    if (row.empty()) {
      out.empty[u] = true;
      continue;
    }
    auto dst = out.embeddings.row(u);
    for (int i : row) {
      const auto y = items.row(static_cast<std::size_t>(i));
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += y[k];
    }
    if (row.size() == 1) {
      const auto y = items.row(static_cast<std::size_t>(row[0]));
      std::copy(y.begin(), y.end(), dst.begin());
      continue;
    }
    const double n = norm(std::span<const T>(dst));
    if (n > 0.0) {
      for (T& v : dst) v = static_cast<T>(v / n);
    } else {
      out.empty[u] = true;
    }
  }
  return out;
}

/// score(u, i) = <U_u, y_i>.
template <class T>
Matrix<T> score_items(const Matrix<T>& users, const Matrix<T>& items) {
  if (users.cols() != items.cols()) throw std::invalid_argument("score_items: dimension mismatch");
  return matmul_nt(users, items);
}

struct ScoredItem {
  int item = 0;
  double score = 0.0;
  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

/// The k best entries of `scores` (column index = item), ties broken by the
/// smaller index, skipping excluded items.
template <class T>
std::vector<ScoredItem> top_k(std::span<const T> scores, std::size_t k,
                              const std::unordered_set<int>& exclude = {}) {
  if (k == 0) throw std::invalid_argument("top_k: k must be positive");
  std::vector<ScoredItem> cand;
  cand.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!exclude.count(static_cast<int>(i))) {
      cand.push_back({static_cast<int>(i), static_cast<double>(scores[i])});
    }
  }
  k = std::min(k, cand.size());
  auto better = [](const ScoredItem& a, const ScoredItem& b) {
    return a.score > b.score || (a.score == b.score && a.item < b.item);
  };
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), better);
  cand.resize(k);
  return cand;
}

/// A trained content model: either a plain encoder, or a (teacher) encoder
/// followed by a projection head.
template <class T = float>
class ColdStartModel {
 public:
  explicit ColdStartModel(Encoder<T> encoder) : encoder_(std::move(encoder)) {}
  ColdStartModel(Encoder<T> encoder, ProjectionHead<T> head)
      : encoder_(std::move(encoder)), head_(std::move(head)) {}

  bool distilled() const { return head_.has_value(); }
  Encoder<T>& encoder() { return encoder_; }
  const Encoder<T>& encoder() const { return encoder_; }
  ProjectionHead<T>& head() { return *head_; }
  const ProjectionHead<T>& head() const { return *head_; }

  std::size_t output_dim() const {
    return head_ ? head_->config().output_dim : encoder_.config().output_dim;
  }

  /// Eval-mode embeddings for the given item indices.
  Matrix<T> embed_items(const Dataset& ds, std::span<const int> items) const {
    std::vector<Matrix<T>> feats;
    for (const auto& f : ds.features) feats.push_back(gather_rows(f, items).template cast<T>());
    Matrix<T> y = encoder_.forward_eval(feats).embeddings;
    return head_ ? head_->forward(y) : y;
  }

  Matrix<T> embed_all(const Dataset& ds) const {
    std::vector<int> all(ds.n_items());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return embed_items(ds, all);
  }

  Checkpoint to_checkpoint() const {
    Checkpoint ck;
    ck.meta["kind"] = head_ ? "distilled" : "base";
    ck.meta["encoder"] = encoder_.config();
    ck.add("encoder", encoder_.params());
    if (head_) {
      ck.meta["projection"] = head_->config();
      ck.add("projection", head_->params());
    }
    return ck;
  }

  static ColdStartModel from_checkpoint(const Checkpoint& ck) {
    try {
      Encoder<T> enc(ck.meta.at("encoder").get<EncoderConfig>());
      ck.load_into("encoder", enc.params());
      if (ck.meta.at("kind").get<std::string>() == "distilled") {
        ProjectionHead<T> head(ck.meta.at("projection").get<ProjectionConfig>());
        ck.load_into("projection", head.params());
        return ColdStartModel(std::move(enc), std::move(head));
      }
      return ColdStartModel(std::move(enc));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("checkpoint metadata: ") + e.what());
    }
  }

  void save(const std::string& path) const { save_checkpoint(path, to_checkpoint()); }
  static ColdStartModel load(const std::string& path) { return from_checkpoint(load_checkpoint(path)); }

 private:
  Encoder<T> encoder_;
  std::optional<ProjectionHead<T>> head_;
};

}  // namespace semco

#endif  // SEMCO_MODEL_HPP_
