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

// Training: in-batch sampled entmax loss, item-item similarity distillation
// (offline and online) and the fitting loops.

#ifndef SEMCO_TRAINING_HPP_
#define SEMCO_TRAINING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semco/data.hpp"
#include "semco/encoder.hpp"
#include "semco/entmax.hpp"
#include "semco/errors.hpp"
#include "semco/eval.hpp"
#include "semco/model.hpp"
#include "semco/optim.hpp"
#include "semco/random.hpp"

namespace semco {

enum class Variant { base, offline, online };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::base: return "base";
    case Variant::offline: return "offline";
    case Variant::online: return "online";
  }
  return "base";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "base") return Variant::base;
  if (s == "offline") return Variant::offline;
  if (s == "online") return Variant::online;
  throw std::invalid_argument("unknown variant '" + s + "' (expected base, offline or online)");
}

struct DistillConfig {
  double omega = 1.0;                       // distillation temperature
  double lambda = 1.0;                      // weight of the SEM term
  std::size_t positives_per_user = 4;
  std::size_t users_per_distill_batch = 0;  // 0: batch_size / 8
  double ema_decay = 0.99;                  // online only
  std::size_t teacher_hidden = 384;
  std::size_t teacher_output = 384;
  double teacher_tau = 0.2;
  double teacher_weight_decay = 0.0;
  std::size_t warmup_steps = 0;             // online student; 0: one epoch

  void validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("distill: omega must be positive");
    if (!(lambda >= 0.0)) throw std::invalid_argument("distill: lambda must be nonnegative");
    if (positives_per_user < 2) throw std::invalid_argument("distill: positives_per_user must be >= 2");
    if (!(ema_decay >= 0.0 && ema_decay <= 1.0)) throw std::invalid_argument("distill: ema_decay must be in [0, 1]");
    if (!(teacher_tau > 0.0)) throw std::invalid_argument("distill: teacher_tau must be positive");
    if (teacher_hidden == 0 || teacher_output == 0) throw std::invalid_argument("distill: teacher dims must be positive");
  }
};

struct TrainConfig {
  Variant variant = Variant::base;
  Alpha alpha = Alpha::sparsemax();
  double tau = 0.2;
  std::size_t batch_size = 2048;
  std::size_t epochs = 15;
  double base_lr = 1e-3;
  double weight_decay = 0.0;
  std::size_t hidden_dim = 192;
  std::size_t output_dim = 64;
  std::size_t history_cap = 50;
  std::size_t eval_k = 20;
  std::uint64_t seed = 0;
  DistillConfig distill;

  /// Logit scale for the SEM loss: 1 for softmax, tau otherwise.
  double tau0() const { return alpha.is_softmax() ? 1.0 : tau; }

  void validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("train: tau must be positive");
    if (batch_size < 2) throw std::invalid_argument("train: batch_size must be >= 2");
    if (epochs == 0) throw std::invalid_argument("train: epochs must be positive");
    if (!(base_lr > 0.0)) throw std::invalid_argument("train: base_lr must be positive");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("train: weight_decay must be nonnegative");
    if (hidden_dim == 0 || output_dim == 0) throw std::invalid_argument("train: dims must be positive");
    if (history_cap == 0) throw std::invalid_argument("train: history_cap must be positive");
    if (eval_k == 0) throw std::invalid_argument("train: eval_k must be positive");
    if (variant != Variant::base) distill.validate();
  }
};

/// Distillation logit scale, mirroring tau0: 1 for softmax, omega otherwise.
inline double omega0(Alpha alpha, double omega) { return alpha.is_softmax() ? 1.0 : omega; }

// ---- batches ---------------------------------------------------------------------------

/// Positive (user, item) pairs plus, per pair, a sample of the user's other
/// training items used to build the user vector.
struct PositivePairBatch {
  std::vector<Interaction> pairs;
  std::vector<std::vector<int>> histories;

  std::size_t size() const { return pairs.size(); }
};

/// Up to `cap` of the user's items, excluding `target`, sorted.
inline std::vector<int> sample_history(std::span<const int> items, int target, std::size_t cap,
                                       Rng& rng) {
  std::vector<int> pool;
  pool.reserve(items.size());
  for (int i : items) {
    if (i != target) pool.push_back(i);
  }
  if (pool.size() > cap) pool = rng.sample(std::move(pool), cap);
  std::sort(pool.begin(), pool.end());
  return pool;
}

inline std::size_t batches_per_epoch(std::size_t n_pairs, std::size_t batch_size) {
  return n_pairs / batch_size + (n_pairs % batch_size >= 2 ? 1 : 0);
}

/// One epoch of shuffled batches. A short final batch is kept if it has at
/// least two pairs.
inline std::vector<PositivePairBatch> make_batches(const InteractionMatrix& train, std::size_t batch_size,
                                                   std::size_t history_cap, Rng& rng) {
  if (batch_size < 2) throw std::invalid_argument("make_batches: batch_size must be >= 2");
  std::vector<Interaction> pairs = train.pairs();
  if (pairs.empty()) throw std::invalid_argument("make_batches: empty training set");
  rng.shuffle(pairs);
  std::vector<PositivePairBatch> out;
  for (std::size_t start = 0; start < pairs.size(); start += batch_size) {
    const std::size_t end = std::min(pairs.size(), start + batch_size);
    if (end - start < 2) break;
    PositivePairBatch b;
    b.pairs.assign(pairs.begin() + static_cast<std::ptrdiff_t>(start),
                   pairs.begin() + static_cast<std::ptrdiff_t>(end));
    for (const auto& p : b.pairs) {
      b.histories.push_back(
          sample_history(train.items_of(static_cast<std::size_t>(p.user)), p.item, history_cap, rng));
    }
    out.push_back(std::move(b));
  }
  return out;
}

/// Sorted distinct item ids with row lookup.
class ItemRows {
 public:
  ItemRows() = default;
  explicit ItemRows(std::vector<int> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  }

  static ItemRows of(const PositivePairBatch& b) {
    std::vector<int> all;
    for (const auto& p : b.pairs) all.push_back(p.item);
    for (const auto& h : b.histories) all.insert(all.end(), h.begin(), h.end());
    return ItemRows(std::move(all));
  }

  const std::vector<int>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

  int row(int item) const {
    const auto it = std::lower_bound(items_.begin(), items_.end(), item);
    if (it == items_.end() || *it != item) throw std::out_of_range("item not in batch");
    return static_cast<int>(it - items_.begin());
  }

 private:
  std::vector<int> items_;
};

template <class T>
std::vector<Matrix<T>> gather_features(const Dataset& ds, std::span<const int> items) {
  std::vector<Matrix<T>> out;
  for (const auto& f : ds.features) out.push_back(gather_rows(f, items).template cast<T>());
  return out;
}

// ---- sampled entmax loss ---------------------------------------------------------------

template <class T>
struct SemLossResult {
  double loss = 0.0;      // mean over scored users
  Matrix<T> d_items;      // gradient w.r.t. the rows of the item matrix
  std::size_t users = 0;  // pairs scored
  std::size_t skipped = 0;
  SparsityStats sparsity;  // of the predicted probabilities
};

/// Sampled entmax loss over a batch. `items` holds unit-norm embeddings for
/// every item referenced by the batch, located through `rows`.
///
/// For the pair (u, i) at index j, the user vector is the normalized sum of
/// the history embeddings, z_u holds its cosine with every batch item and the
/// loss is fy_loss(z_u / tau0, e_j, alpha, tau). Pairs with an empty history
/// are skipped.
template <class T>
SemLossResult<T> sem_loss(const PositivePairBatch& batch, const ItemRows& rows, const Matrix<T>& items,
                          Alpha alpha, double tau) {
  const std::size_t b = batch.size();
  if (b < 2) throw std::invalid_argument("sem_loss: batch must hold at least two pairs");
  if (batch.histories.size() != b) throw std::invalid_argument("sem_loss: missing histories");
  if (!(tau > 0.0)) throw std::invalid_argument("sem_loss: tau must be positive");
  const std::size_t d = items.cols();
  const double tau0 = alpha.is_softmax() ? 1.0 : tau;

  SemLossResult<T> res;
  res.d_items = Matrix<T>(items.rows(), d);

  std::vector<int> target_rows(b);
  for (std::size_t j = 0; j < b; ++j) target_rows[j] = rows.row(batch.pairs[j].item);
  const Matrix<T> targets = gather_rows(items, target_rows);

  // User vectors: s_u = sum of history rows, u = s_u / |s_u|.
  std::vector<std::size_t> scored;
  for (std::size_t j = 0; j < b; ++j) {
    if (batch.histories[j].empty()) {
      ++res.skipped;
    } else {
      scored.push_back(j);
    }
  }
  res.users = scored.size();
  if (scored.empty()) return res;

  Matrix<T> sums(scored.size(), d);
  Matrix<T> users(scored.size(), d);
  std::vector<double> norms(scored.size());
  for (std::size_t r = 0; r < scored.size(); ++r) {
    auto s = sums.row(r);
    for (int h : batch.histories[scored[r]]) {
      const auto y = items.row(static_cast<std::size_t>(rows.row(h)));
      for (std::size_t k = 0; k < d; ++k) s[k] += y[k];
    }
    norms[r] = std::max(static_cast<double>(norm(std::span<const T>(s))), 1e-12);
    for (std::size_t k = 0; k < d; ++k) users(r, k) = static_cast<T>(s[k] / norms[r]);
  }

  const Matrix<T> logits = matmul_nt(users, targets);  // scored x b
  Matrix<T> d_logits(scored.size(), b);
  std::vector<double> z(b);
  std::vector<double> e(b);
  std::vector<double> p_hat(b);
  const double inv_users = 1.0 / static_cast<double>(scored.size());
  double total = 0.0;
  for (std::size_t r = 0; r < scored.size(); ++r) {
    const std::size_t j = scored[r];
    for (std::size_t c = 0; c < b; ++c) z[c] = static_cast<double>(logits(r, c)) / tau0;
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    total += fy_loss(z, e, alpha, tau, p_hat);
    res.sparsity.add(p_hat);
    const double scale = inv_users / (tau * tau0);
    for (std::size_t c = 0; c < b; ++c) d_logits(r, c) = static_cast<T>((p_hat[c] - e[c]) * scale);
  }
  res.loss = total * inv_users;

  // Back through z = users * targets^T.
  const Matrix<T> d_users = matmul(d_logits, targets);
  const Matrix<T> d_targets = matmul_tn(d_logits, users);
  scatter_add_rows(res.d_items, target_rows, d_targets);
  // Back through the normalization of each user sum into the history rows.
  for (std::size_t r = 0; r < scored.size(); ++r) {
    const auto du = d_users.row(r);
    const auto u = users.row(r);
    const double proj = dot<T>(u, du);
    std::vector<T> ds(d);
    for (std::size_t k = 0; k < d; ++k) ds[k] = static_cast<T>((du[k] - u[k] * proj) / norms[r]);
    for (int h : batch.histories[scored[r]]) {
      auto g = res.d_items.row(static_cast<std::size_t>(rows.row(h)));
      for (std::size_t k = 0; k < d; ++k) g[k] += ds[k];
    }
  }
  return res;
}

/// Encodes the batch's items in train mode, evaluates sem_loss and
/// accumulates the encoder's parameter gradients (scaled by `weight`).
template <class T>
SemLossResult<T> sem_encoder_step(Encoder<T>& encoder, const Dataset& ds, const PositivePairBatch& batch,
                                  Alpha alpha, double tau, double weight = 1.0) {
  const ItemRows rows = ItemRows::of(batch);
  typename Encoder<T>::Tape tape;
  const auto feats = gather_features<T>(ds, rows.items());
  const Matrix<T> y = encoder.forward_train(feats, tape).embeddings;
  SemLossResult<T> res = sem_loss(batch, rows, y, alpha, tau);
  if (res.users > 0) {
    Matrix<T> g = res.d_items;
    g *= static_cast<T>(weight);
    encoder.backward(tape, g);
  }
  return res;
}

// ---- distillation ----------------------------------------------------------------------

/// Item set for distillation and which sampled user contributed which items.
struct DistillBatch {
  std::vector<int> items;  // sorted, distinct
  std::vector<std::pair<int, std::vector<int>>> provenance;
};

/// Sub-samples users of the batch and draws `positives_per_user` distinct
/// training items for each; the union forms the item set.
inline DistillBatch build_distill_batch(const PositivePairBatch& batch, const InteractionMatrix& train,
                                        std::size_t users_per_batch, std::size_t positives_per_user,
                                        Rng& rng) {
  if (positives_per_user < 2) throw std::invalid_argument("distill batch: positives_per_user must be >= 2");
  std::vector<int> eligible;
  for (const auto& p : batch.pairs) {
    if (train.items_of(static_cast<std::size_t>(p.user)).size() >= positives_per_user) {
      eligible.push_back(p.user);
    }
  }
  std::sort(eligible.begin(), eligible.end());
  eligible.erase(std::unique(eligible.begin(), eligible.end()), eligible.end());
  if (eligible.empty()) throw TrainingError("distill batch: no user with enough positives");
  const std::vector<int> users = rng.sample(eligible, std::max<std::size_t>(users_per_batch, 1));
  DistillBatch out;
  for (int u : users) {
    const auto own = train.items_of(static_cast<std::size_t>(u));
    std::vector<int> picked = rng.sample(std::vector<int>(own.begin(), own.end()), positives_per_user);
    out.items.insert(out.items.end(), picked.begin(), picked.end());
    out.provenance.emplace_back(u, std::move(picked));
  }
  std::sort(out.items.begin(), out.items.end());
  out.items.erase(std::unique(out.items.begin(), out.items.end()), out.items.end());
  return out;
}

template <class T>
struct DistillLossResult {
  double loss = 0.0;
  Matrix<T> d_student;
  SparsityStats target_sparsity;
  SparsityStats student_sparsity;
};

/// Item-item similarity distillation over an item set. Row c of `student`
/// and `teacher` embed the same item (unit rows; dims may differ). For each c
/// the logits are cosines to every other item in the set; the target is
/// entmax(z_T / omega0) with no gradient to the teacher and the loss is
/// fy_loss(z_S / omega0, target, alpha, omega), averaged over the set.
template <class T>
DistillLossResult<T> distill_loss(const Matrix<T>& student, const Matrix<T>& teacher, Alpha alpha,
                                  double omega) {
  const std::size_t n = student.rows();
  if (n < 2) throw std::invalid_argument("distill_loss: need at least two items");
  if (teacher.rows() != n) throw std::invalid_argument("distill_loss: student/teacher row mismatch");
  if (!(omega > 0.0)) throw std::invalid_argument("distill_loss: omega must be positive");
  const double w0 = omega0(alpha, omega);

  const Matrix<T> zs = matmul_nt(student, student);
  const Matrix<T> zt = matmul_nt(teacher, teacher);
  DistillLossResult<T> res;
  Matrix<T> d_z(n, n);
  std::vector<double> s(n - 1);
  std::vector<double> t(n - 1);
  std::vector<double> target(n - 1);
  std::vector<double> p_hat(n - 1);
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t o = 0, k = 0; o < n; ++o) {
      if (o == c) continue;
      s[k] = static_cast<double>(zs(c, o)) / w0;
      t[k] = static_cast<double>(zt(c, o)) / w0;
      ++k;
    }
    entmax_into(t, alpha, target);
    res.target_sparsity.add(target);
    total += fy_loss(s, target, alpha, omega, p_hat);
    res.student_sparsity.add(p_hat);
    const double scale = inv_n / (omega * w0);
    for (std::size_t o = 0, k = 0; o < n; ++o) {
      if (o == c) continue;
      d_z(c, o) = static_cast<T>((p_hat[k] - target[k]) * scale);
      ++k;
    }
  }
  res.loss = total * inv_n;
  // z_S = S S^T, so dS = (dZ + dZ^T) S.
  Matrix<T> sym(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sym(i, j) = d_z(i, j) + d_z(j, i);
  res.d_student = matmul(sym, student);
  return res;
}

/// Combined objective: distill + lambda * sem.
inline double total_loss(double distill, double sem, double lambda) { return distill + lambda * sem; }

// ---- EMA of teacher outputs ------------------------------------------------------------

/// Per-item exponential moving average of teacher output rows.
template <class T>
class EmaBuffer {
 public:
  EmaBuffer(std::size_t n_items, std::size_t dim, double decay)
      : values_(n_items, dim), seen_(n_items, false), decay_(decay) {
    if (!(decay >= 0.0 && decay <= 1.0)) throw std::invalid_argument("ema: decay must be in [0, 1]");
  }

  /// buf <- decay * buf + (1 - decay) * teacher, renormalized; first touch copies.
  void update(std::span<const int> items, const Matrix<T>& teacher_rows) {
    if (teacher_rows.rows() != items.size() || teacher_rows.cols() != values_.cols()) {
      throw std::invalid_argument("ema: shape mismatch");
    }
    for (std::size_t r = 0; r < items.size(); ++r) {
      const auto i = static_cast<std::size_t>(items[r]);
      auto dst = values_.row(i);
      const auto src = teacher_rows.row(r);
      if (!seen_[i]) {
        std::copy(src.begin(), src.end(), dst.begin());
        seen_[i] = true;
        continue;
      }
      if (decay_ == 1.0) continue;
      for (std::size_t k = 0; k < dst.size(); ++k) {
        dst[k] = static_cast<T>(decay_ * dst[k] + (1.0 - decay_) * src[k]);
      }
      const double n = norm(std::span<const T>(dst));
      if (n > 0.0) {
        for (T& v : dst) v = static_cast<T>(v / n);
      }
    }
  }

  Matrix<T> rows(std::span<const int> items) const { return gather_rows(values_, items); }
  bool seen(int item) const { return seen_[static_cast<std::size_t>(item)]; }
  const Matrix<T>& values() const { return values_; }

 private:
  Matrix<T> values_;
  std::vector<bool> seen_;
  double decay_;
};

// ---- fitting ---------------------------------------------------------------------------

struct EpochLog {
  std::size_t epoch = 0;
  std::string variant;
  std::string alpha;
  double loss = 0.0;          // mean optimized objective
  double sem_loss = 0.0;      // student (or sole model) SEM term
  double distill_loss = 0.0;
  double teacher_loss = 0.0;  // online teacher SEM
  double lr = 0.0;            // at the last step of the epoch
  double student_lr = 0.0;
  double val_ndcg = 0.0;
  double nonzero_fraction = 0.0;          // predicted SEM probabilities
  double distill_nonzero_fraction = 0.0;  // distillation targets
  std::size_t steps = 0;
  std::size_t skipped_pairs = 0;
};

inline nlohmann::json epoch_to_json(const EpochLog& e, std::size_t k) {
  return {{"epoch", e.epoch},
          {"variant", e.variant},
          {"alpha", e.alpha},
          {"loss", e.loss},
          {"sem_loss", e.sem_loss},
          {"distill_loss", e.distill_loss},
          {"teacher_loss", e.teacher_loss},
          {"lr", e.lr},
          {"student_lr", e.student_lr},
          {"val_ndcg@" + std::to_string(k), e.val_ndcg},
          {"nonzero_fraction", e.nonzero_fraction},
          {"distill_nonzero_fraction", e.distill_nonzero_fraction},
          {"steps", e.steps},
          {"skipped_pairs", e.skipped_pairs}};
}

struct FitHooks {
  std::function<void(const EpochLog&)> on_epoch;
  std::function<void(const EpochLog&)> on_teacher_epoch;
  const ColdStartModel<float>* teacher = nullptr;  // offline: pre-trained teacher
};

struct FitResult {
  ColdStartModel<float> model;
  std::vector<EpochLog> log;
  std::optional<ColdStartModel<float>> teacher;
  std::vector<EpochLog> teacher_log;
  std::size_t best_epoch = 0;
  double best_val_ndcg = -1.0;
};

namespace detail {

inline double val_ndcg(const Matrix<float>& embeddings, const Dataset& ds, const ColdSplit& split,
                       std::size_t k) {
  return evaluate_embeddings(embeddings, ds, split, ColdPool::validation, k).ndcg;
}

inline EncoderConfig encoder_config(const Dataset& ds, std::size_t hidden, std::size_t output,
                                    std::uint64_t seed) {
  EncoderConfig c;
  c.mode_dims = ds.mode_dims();
  c.hidden_dim = hidden;
  c.output_dim = output;
  c.seed = seed;
  return c;
}

struct Streams {
  explicit Streams(std::uint64_t seed)
      : init(seed), batches(Rng::stream(seed, 100)), distill(Rng::stream(seed, 200)) {}
  std::uint64_t init;
  Rng batches;
  Rng distill;
};

// Base SEMCo: encoder trained on the sampled entmax loss alone.
inline FitResult fit_base(const Dataset& ds, const ColdSplit& split, const InteractionMatrix& train,
                          const TrainConfig& cfg, const std::function<void(const EpochLog&)>& on_epoch) {
  Streams rng(cfg.seed);
  Encoder<float> enc(encoder_config(ds, cfg.hidden_dim, cfg.output_dim, Rng::stream(cfg.seed, 0).next()));
  const std::size_t spe = batches_per_epoch(train.nnz(), cfg.batch_size);
  const LrSchedule sched{ScheduleKind::cosine_decay, cfg.base_lr, cfg.epochs, 0};
  AdamOptions adam;
  adam.weight_decay = cfg.weight_decay;

  std::vector<EpochLog> log;
  std::map<std::string, Matrix<float>> best;
  double best_ndcg = -1.0;
  std::size_t best_epoch = 0;
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochLog e;
    e.epoch = epoch;
    e.variant = "base";
    e.alpha = alpha_name(cfg.alpha);
    SparsityStats sp;
    for (const auto& batch : make_batches(train, cfg.batch_size, cfg.history_cap, rng.batches)) {
      const double lr = lr_at(sched, step++, spe);
      enc.params().zero_grad();
      const auto r = sem_encoder_step(enc, ds, batch, cfg.alpha, cfg.tau);
      if (lr > 0.0) adam_step(enc.params(), lr, adam);
      e.sem_loss += r.loss;
      e.skipped_pairs += r.skipped;
      sp.merge(r.sparsity);
      e.lr = lr;
      ++e.steps;
    }
    if (e.steps) e.sem_loss /= static_cast<double>(e.steps);
    e.loss = e.sem_loss;
    e.nonzero_fraction = sp.fraction();
    std::vector<int> all(ds.n_items());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    const auto feats = gather_features<float>(ds, all);
    e.val_ndcg = val_ndcg(enc.forward_eval(feats).embeddings, ds, split, cfg.eval_k);
    if (e.val_ndcg > best_ndcg) {
      best_ndcg = e.val_ndcg;
      best_epoch = epoch;
      best = enc.params().snapshot();
    }
    if (on_epoch) on_epoch(e);
    log.push_back(e);
  }
  enc.params().restore(best);
  FitResult out{ColdStartModel<float>(std::move(enc)), std::move(log), std::nullopt, {}, best_epoch, best_ndcg};
  return out;
}

inline TrainConfig teacher_config(const TrainConfig& cfg) {
  TrainConfig t = cfg;
  t.variant = Variant::base;
  t.hidden_dim = cfg.distill.teacher_hidden;
  t.output_dim = cfg.distill.teacher_output;
  t.tau = cfg.distill.teacher_tau;
  t.weight_decay = cfg.distill.teacher_weight_decay;
  return t;
}

inline std::vector<int> all_items(const Dataset& ds) {
  std::vector<int> all(ds.n_items());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

// Student step shared by both distillation variants: the projection head maps
// teacher-side inputs to student embeddings, trained on distill + lambda * sem.
struct StudentStep {
  double sem = 0.0;
  double distill = 0.0;
  std::size_t skipped = 0;
  SparsityStats sem_sparsity;
  SparsityStats target_sparsity;
};

inline StudentStep student_step(ProjectionHead<float>& head, const PositivePairBatch& batch,
                                const ItemRows& batch_rows, const Matrix<float>& batch_inputs,
                                const Matrix<float>& cset_inputs,
                                const Matrix<float>& cset_teacher, const TrainConfig& cfg) {
  StudentStep out;
  const double lambda = cfg.distill.lambda;
  if (lambda > 0.0) {
    ProjectionHead<float>::Tape tape;
    const Matrix<float> s = head.forward(batch_inputs, &tape);
    auto sem = sem_loss(batch, batch_rows, s, cfg.alpha, cfg.tau);
    out.sem = sem.loss;
    out.skipped = sem.skipped;
    out.sem_sparsity = sem.sparsity;
    if (sem.users > 0) {
      sem.d_items *= static_cast<float>(lambda);
      head.backward(tape, sem.d_items);
    }
  }
  ProjectionHead<float>::Tape tape;
  const Matrix<float> s = head.forward(cset_inputs, &tape);
  const auto d = distill_loss(s, cset_teacher, cfg.alpha, cfg.distill.omega);
  out.distill = d.loss;
  out.target_sparsity = d.target_sparsity;
  head.backward(tape, d.d_student);
  return out;
}

inline std::size_t users_per_distill(const TrainConfig& cfg) {
  return cfg.distill.users_per_distill_batch ? cfg.distill.users_per_distill_batch
                                             : std::max<std::size_t>(cfg.batch_size / 8, 1);
}

inline FitResult fit_offline(const Dataset& ds, const ColdSplit& split, const InteractionMatrix& train,
                             const TrainConfig& cfg, const FitHooks& hooks) {
  std::optional<ColdStartModel<float>> teacher;
  std::vector<EpochLog> teacher_log;
  if (hooks.teacher) {
    teacher.emplace(ColdStartModel<float>::from_checkpoint(hooks.teacher->to_checkpoint()));
  } else {
    FitResult t = fit_base(ds, split, train, teacher_config(cfg), hooks.on_teacher_epoch);
    teacher.emplace(std::move(t.model));
    teacher_log = std::move(t.log);
  }
  if (teacher->distilled()) throw TrainingError("offline: teacher must be a plain encoder");
  const Matrix<float> y_teacher = teacher->embed_all(ds);

  Streams rng(cfg.seed);
  ProjectionHead<float> head(ProjectionConfig{y_teacher.cols(), cfg.hidden_dim, cfg.output_dim,
                                              Rng::stream(cfg.seed, 0).next()});
  const std::size_t spe = batches_per_epoch(train.nnz(), cfg.batch_size);
  const LrSchedule sched{ScheduleKind::cosine_decay, cfg.base_lr, cfg.epochs, 0};
  AdamOptions adam;
  adam.weight_decay = cfg.weight_decay;

  std::vector<EpochLog> log;
  std::map<std::string, Matrix<float>> best;
  double best_ndcg = -1.0;
  std::size_t best_epoch = 0;
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochLog e;
    e.epoch = epoch;
    e.variant = "offline";
    e.alpha = alpha_name(cfg.alpha);
    SparsityStats sem_sp;
    SparsityStats tgt_sp;
    for (const auto& batch : make_batches(train, cfg.batch_size, cfg.history_cap, rng.batches)) {
      const double lr = lr_at(sched, step++, spe);
      const ItemRows rows = ItemRows::of(batch);
      const DistillBatch cset = build_distill_batch(batch, train, users_per_distill(cfg),
                                                    cfg.distill.positives_per_user, rng.distill);
      const Matrix<float> c_teacher = gather_rows(y_teacher, cset.items);
      head.params().zero_grad();
      const StudentStep s = student_step(head, batch, rows, gather_rows(y_teacher, rows.items()),
                                         c_teacher, c_teacher, cfg);
      if (lr > 0.0) adam_step(head.params(), lr, adam);
      e.sem_loss += s.sem;
      e.distill_loss += s.distill;
      e.skipped_pairs += s.skipped;
      sem_sp.merge(s.sem_sparsity);
      tgt_sp.merge(s.target_sparsity);
      e.lr = lr;
      e.student_lr = lr;
      ++e.steps;
    }
    if (e.steps) {
      e.sem_loss /= static_cast<double>(e.steps);
      e.distill_loss /= static_cast<double>(e.steps);
    }
    e.loss = total_loss(e.distill_loss, e.sem_loss, cfg.distill.lambda);
    e.nonzero_fraction = sem_sp.fraction();
    e.distill_nonzero_fraction = tgt_sp.fraction();
    e.val_ndcg = val_ndcg(head.forward(y_teacher), ds, split, cfg.eval_k);
    if (e.val_ndcg > best_ndcg) {
      best_ndcg = e.val_ndcg;
      best_epoch = epoch;
      best = head.params().snapshot();
    }
    if (hooks.on_epoch) hooks.on_epoch(e);
    log.push_back(e);
  }
  head.params().restore(best);
  Encoder<float> enc(teacher->encoder().config());
  enc.params().restore(teacher->encoder().params().snapshot());
  FitResult out{ColdStartModel<float>(std::move(enc), std::move(head)), std::move(log), std::move(teacher),
                std::move(teacher_log), best_epoch, best_ndcg};
  return out;
}

inline FitResult fit_online(const Dataset& ds, const ColdSplit& split, const InteractionMatrix& train,
                            const TrainConfig& cfg, const FitHooks& hooks) {
  Streams rng(cfg.seed);
  const TrainConfig tcfg = teacher_config(cfg);
  Encoder<float> teacher(encoder_config(ds, tcfg.hidden_dim, tcfg.output_dim, Rng::stream(cfg.seed, 1).next()));
  ProjectionHead<float> head(ProjectionConfig{tcfg.output_dim, cfg.hidden_dim, cfg.output_dim,
                                              Rng::stream(cfg.seed, 0).next()});
  EmaBuffer<float> ema(ds.n_items(), tcfg.output_dim, cfg.distill.ema_decay);

  const std::size_t spe = batches_per_epoch(train.nnz(), cfg.batch_size);
  const LrSchedule teacher_sched{ScheduleKind::cosine_decay, cfg.base_lr, cfg.epochs, 0};
  const LrSchedule student_sched{ScheduleKind::linear_warmup_then_cosine, cfg.base_lr, cfg.epochs,
                                 cfg.distill.warmup_steps ? cfg.distill.warmup_steps : spe};
  AdamOptions teacher_adam;
  teacher_adam.weight_decay = tcfg.weight_decay;
  AdamOptions student_adam;
  student_adam.weight_decay = cfg.weight_decay;

  std::vector<EpochLog> log;
  std::map<std::string, Matrix<float>> best_head;
  std::map<std::string, Matrix<float>> best_teacher;
  double best_ndcg = -1.0;
  std::size_t best_epoch = 0;
  std::size_t step = 0;
  const std::vector<int> all = all_items(ds);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochLog e;
    e.epoch = epoch;
    e.variant = "online";
    e.alpha = alpha_name(cfg.alpha);
    SparsityStats sem_sp;
    SparsityStats tgt_sp;
    for (const auto& batch : make_batches(train, cfg.batch_size, cfg.history_cap, rng.batches)) {
      const double t_lr = lr_at(teacher_sched, step, spe);
      const double s_lr = lr_at(student_sched, step, spe);
      ++step;
      const ItemRows rows = ItemRows::of(batch);
      const DistillBatch cset = build_distill_batch(batch, train, users_per_distill(cfg),
                                                    cfg.distill.positives_per_user, rng.distill);
      std::vector<int> touched = rows.items();
      touched.insert(touched.end(), cset.items.begin(), cset.items.end());
      const ItemRows union_rows(std::move(touched));

      // Teacher: SEM on the batch, encoding the union so the distillation
      // items share the same forward pass.
      typename Encoder<float>::Tape tape;
      const Matrix<float> y_union =
          teacher.forward_train(gather_features<float>(ds, union_rows.items()), tape).embeddings;
      teacher.params().zero_grad();
      const auto t_sem = sem_loss(batch, union_rows, y_union, cfg.alpha, tcfg.tau);
      if (t_sem.users > 0) teacher.backward(tape, t_sem.d_items);
      if (t_lr > 0.0) adam_step(teacher.params(), t_lr, teacher_adam);

      // Student: EMA of (detached) teacher outputs as input.
      ema.update(union_rows.items(), y_union);
      std::vector<int> c_rows;
      for (int i : cset.items) c_rows.push_back(union_rows.row(i));
      head.params().zero_grad();
      const StudentStep s = student_step(head, batch, rows, ema.rows(rows.items()),
                                         ema.rows(cset.items), gather_rows(y_union, c_rows), cfg);
      if (s_lr > 0.0) adam_step(head.params(), s_lr, student_adam);

      e.teacher_loss += t_sem.loss;
      e.sem_loss += s.sem;
      e.distill_loss += s.distill;
      e.skipped_pairs += s.skipped;
      sem_sp.merge(s.sem_sparsity);
      tgt_sp.merge(s.target_sparsity);
      e.lr = t_lr;
      e.student_lr = s_lr;
      ++e.steps;
    }
    if (e.steps) {
      const double n = static_cast<double>(e.steps);
      e.teacher_loss /= n;
      e.sem_loss /= n;
      e.distill_loss /= n;
    }
    e.loss = total_loss(e.distill_loss, e.sem_loss, cfg.distill.lambda);
    e.nonzero_fraction = sem_sp.fraction();
    e.distill_nonzero_fraction = tgt_sp.fraction();
    // Cold items have no EMA history; inference feeds teacher outputs directly.
    const Matrix<float> y_teacher = teacher.forward_eval(gather_features<float>(ds, all)).embeddings;
    e.val_ndcg = val_ndcg(head.forward(y_teacher), ds, split, cfg.eval_k);
    if (e.val_ndcg > best_ndcg) {
      best_ndcg = e.val_ndcg;
      best_epoch = epoch;
      best_head = head.params().snapshot();
      best_teacher = teacher.params().snapshot();
    }
    if (hooks.on_epoch) hooks.on_epoch(e);
    log.push_back(e);
  }
  head.params().restore(best_head);
  teacher.params().restore(best_teacher);
  Encoder<float> teacher_copy(teacher.config());
  teacher_copy.params().restore(best_teacher);
  FitResult out{ColdStartModel<float>(std::move(teacher), std::move(head)), std::move(log),
                ColdStartModel<float>(std::move(teacher_copy)), {}, best_epoch, best_ndcg};
  return out;
}

}  // namespace detail

/// Trains the configured variant. The returned model is the epoch with the
/// best validation NDCG@k.
inline FitResult fit(const Dataset& ds, const ColdSplit& split, const TrainConfig& cfg,
                     const FitHooks& hooks = {}) {
  cfg.validate();
  const InteractionMatrix train = InteractionMatrix::from_pairs(ds.n_users(), ds.n_items(), split.warm_train);
  if (train.nnz() < 2) throw TrainingError("fit: fewer than two training interactions");
  try {
    switch (cfg.variant) {
      case Variant::base: return detail::fit_base(ds, split, train, cfg, hooks.on_epoch);
      case Variant::offline: return detail::fit_offline(ds, split, train, cfg, hooks);
      case Variant::online: return detail::fit_online(ds, split, train, cfg, hooks);
    }
  } catch (const std::invalid_argument& e) {
    throw TrainingError(e.what());
  }
  throw TrainingError("fit: unknown variant");
}

}  // namespace semco

#endif  // SEMCO_TRAINING_HPP_
