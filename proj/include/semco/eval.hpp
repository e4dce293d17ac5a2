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

// Cold-start evaluation: user-side ranking metrics (Recall@k, NDCG@k),
// item-side MDG@k, Gini diversity of exposure, and sparsity statistics.

#ifndef SEMCO_EVAL_HPP_
#define SEMCO_EVAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "semco/data.hpp"
#include "semco/errors.hpp"
#include "semco/model.hpp"
#include "semco/random.hpp"

namespace semco {

using RankedList = std::vector<int>;
using RelevanceSet = std::vector<int>;

namespace detail {

inline double discount(std::size_t rank) { return 1.0 / std::log2(1.0 + static_cast<double>(rank)); }

inline void require_k(std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be positive");
}

inline bool contains(const RelevanceSet& rel, int item) {
  return std::find(rel.begin(), rel.end(), item) != rel.end();
}

}  // namespace detail

/// Mean over users of |top-k ∩ relevant| / |relevant|.
inline double recall_at_k(std::span<const RankedList> ranked, std::span<const RelevanceSet> relevant,
                          std::size_t k) {
  detail::require_k(k);
  if (ranked.size() != relevant.size()) throw std::invalid_argument("recall_at_k: size mismatch");
  if (ranked.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t u = 0; u < ranked.size(); ++u) {
    if (relevant[u].empty()) throw std::invalid_argument("recall_at_k: user without relevant items");
    std::size_t hits = 0;
    for (std::size_t r = 0; r < std::min(k, ranked[u].size()); ++r) {
      hits += detail::contains(relevant[u], ranked[u][r]);
    }
    total += static_cast<double>(hits) / static_cast<double>(relevant[u].size());
  }
  return total / static_cast<double>(ranked.size());
}

/// Mean over users of DCG@k / IDCG@k with binary relevance and gain
/// 1 / log2(1 + rank).
inline double ndcg_at_k(std::span<const RankedList> ranked, std::span<const RelevanceSet> relevant,
                        std::size_t k) {
  detail::require_k(k);
  if (ranked.size() != relevant.size()) throw std::invalid_argument("ndcg_at_k: size mismatch");
  if (ranked.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t u = 0; u < ranked.size(); ++u) {
    if (relevant[u].empty()) throw std::invalid_argument("ndcg_at_k: user without relevant items");
    double dcg = 0.0;
    for (std::size_t r = 0; r < std::min(k, ranked[u].size()); ++r) {
      if (detail::contains(relevant[u], ranked[u][r])) dcg += detail::discount(r + 1);
    }
    double idcg = 0.0;
    for (std::size_t r = 0; r < std::min(k, relevant[u].size()); ++r) idcg += detail::discount(r + 1);
    total += dcg / idcg;
  }
  return total / static_cast<double>(ranked.size());
}

struct MdgResult {
  std::vector<double> per_item;  // aligned with the `items` argument
  std::vector<std::size_t> relevant_users;
  double mean = 0.0;             // over items with at least one relevant user
};

/// MDG(i) = mean over the item's relevant users of [rank <= k] / log2(1 + rank).
inline MdgResult mdg_at_k(std::span<const RankedList> ranked, std::span<const RelevanceSet> relevant,
                          std::span<const int> items, std::size_t k) {
  detail::require_k(k);
  if (ranked.size() != relevant.size()) throw std::invalid_argument("mdg_at_k: size mismatch");
  int max_item = -1;
  for (int i : items) max_item = std::max(max_item, i);
  std::vector<double> gain(static_cast<std::size_t>(max_item + 1), 0.0);
  std::vector<std::size_t> users(gain.size(), 0);
  for (std::size_t u = 0; u < ranked.size(); ++u) {
    for (int i : relevant[u]) {
      if (i < 0 || i > max_item) continue;
      ++users[static_cast<std::size_t>(i)];
      const std::size_t lim = std::min(k, ranked[u].size());
      for (std::size_t r = 0; r < lim; ++r) {
        if (ranked[u][r] == i) {
          gain[static_cast<std::size_t>(i)] += detail::discount(r + 1);
          break;
        }
      }
    }
  }
  MdgResult out;
  double sum = 0.0;
  std::size_t counted = 0;
  for (int i : items) {
    const auto idx = static_cast<std::size_t>(i);
    const double v = users[idx] ? gain[idx] / static_cast<double>(users[idx]) : 0.0;
    out.per_item.push_back(v);
    out.relevant_users.push_back(users[idx]);
    if (users[idx]) {
      sum += v;
      ++counted;
    }
  }
  out.mean = counted ? sum / static_cast<double>(counted) : 0.0;
  return out;
}

/// 1 - Gini index of the exposure counts (1 = perfectly even exposure).
inline double gini_diversity(std::span<const std::size_t> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (counts.empty() || total == 0.0) throw std::invalid_argument("gini_diversity: all-zero counts");
  std::vector<std::size_t> c(counts.begin(), counts.end());
  std::sort(c.begin(), c.end());
  const double n = static_cast<double>(c.size());
  double g = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    g += (2.0 * static_cast<double>(i + 1) - n - 1.0) * static_cast<double>(c[i]);
  }
  return 1.0 - g / (n * total);
}

/// Running count of exact nonzeros in entmax outputs.
struct SparsityStats {
  std::size_t nonzero = 0;
  std::size_t entries = 0;

  void add(std::span<const double> p) {
    for (double v : p) nonzero += v > 0.0;
    entries += p.size();
  }
  void merge(const SparsityStats& o) {
    nonzero += o.nonzero;
    entries += o.entries;
  }
  double fraction() const {
    return entries ? static_cast<double>(nonzero) / static_cast<double>(entries) : 0.0;
  }
};

/// Fraction of strictly positive entries across a set of probability matrices.
template <class M>
double sparsity_stats(std::span<const M> matrices) {
  SparsityStats s;
  for (const auto& m : matrices) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        s.nonzero += m(i, j) > 0;
        ++s.entries;
      }
    }
  }
  return s.fraction();
}

struct EvalReport {
  std::size_t k = 20;
  double recall = 0.0;
  double ndcg = 0.0;
  double mdg = 0.0;
  double gini_diversity = 0.0;
  std::size_t n_users_evaluated = 0;
  std::size_t n_users_skipped = 0;  // relevant cold items but no warm history
  std::vector<int> items;           // cold pool, dataset item indices
  std::vector<double> item_mdg;
  std::vector<std::size_t> pred_counts;
};

/// Metrics for a score matrix over (evaluated users) x (pool items).
/// `relevant` holds pool-local column indices per user.
template <class T>
EvalReport evaluate_scores(const Matrix<T>& scores, std::span<const RelevanceSet> relevant,
                           std::span<const int> pool_items, std::size_t k) {
  detail::require_k(k);
  if (scores.rows() != relevant.size() || scores.cols() != pool_items.size()) {
    throw std::invalid_argument("evaluate_scores: shape mismatch");
  }
  if (scores.rows() == 0) throw std::invalid_argument("evaluate_scores: no evaluable users");
  std::vector<RankedList> ranked(scores.rows());
  std::vector<std::size_t> counts(pool_items.size(), 0);
  for (std::size_t u = 0; u < scores.rows(); ++u) {
    for (const auto& s : top_k(scores.row(u), k)) {
      ranked[u].push_back(s.item);
      ++counts[static_cast<std::size_t>(s.item)];
    }
  }
  std::vector<int> local(pool_items.size());
  std::iota(local.begin(), local.end(), 0);
  const MdgResult mdg = mdg_at_k(ranked, relevant, local, k);

  EvalReport rep;
  rep.k = k;
  rep.recall = recall_at_k(ranked, relevant, k);
  rep.ndcg = ndcg_at_k(ranked, relevant, k);
  rep.mdg = mdg.mean;
  rep.gini_diversity = gini_diversity(counts);
  rep.n_users_evaluated = scores.rows();
  rep.items.assign(pool_items.begin(), pool_items.end());
  rep.item_mdg = mdg.per_item;
  rep.pred_counts = counts;
  return rep;
}

enum class ColdPool { validation, test };

/// Users to evaluate against a cold pool and their pool-local relevant sets.
struct EvalTargets {
  std::vector<int> users;
  std::vector<RelevanceSet> relevant;
  std::vector<int> pool;
  std::size_t skipped_users = 0;
};

inline EvalTargets eval_targets(const Dataset& ds, const ColdSplit& split, ColdPool which,
                                const InteractionMatrix& warm_train) {
  EvalTargets t;
  t.pool = which == ColdPool::test ? split.cold_test_items : split.cold_val_items;
  const auto& inter = which == ColdPool::test ? split.cold_test : split.cold_val;
  std::vector<int> local(ds.n_items(), -1);
  for (std::size_t j = 0; j < t.pool.size(); ++j) local[static_cast<std::size_t>(t.pool[j])] = static_cast<int>(j);
  std::vector<RelevanceSet> by_user(ds.n_users());
  for (const auto& x : inter) {
    const int j = local[static_cast<std::size_t>(x.item)];
    if (j >= 0) by_user[static_cast<std::size_t>(x.user)].push_back(j);
  }
  for (std::size_t u = 0; u < ds.n_users(); ++u) {
    if (by_user[u].empty()) continue;
    if (warm_train.items_of(u).empty()) {
      ++t.skipped_users;
      continue;
    }
    std::sort(by_user[u].begin(), by_user[u].end());
    by_user[u].erase(std::unique(by_user[u].begin(), by_user[u].end()), by_user[u].end());
    t.users.push_back(static_cast<int>(u));
    t.relevant.push_back(std::move(by_user[u]));
  }
  return t;
}

/// Ranks the cold pool for every user with relevant cold items, using user
/// embeddings built from warm-train interactions only.
template <class T>
EvalReport evaluate_embeddings(const Matrix<T>& item_embeddings, const Dataset& ds,
                               const ColdSplit& split, ColdPool which, std::size_t k) {
  const InteractionMatrix train = InteractionMatrix::from_pairs(ds.n_users(), ds.n_items(), split.warm_train);
  const EvalTargets t = eval_targets(ds, split, which, train);
  if (t.users.empty()) throw std::invalid_argument("evaluate: no evaluable users");
  const auto users = build_user_embeddings(train, item_embeddings);
  const Matrix<T> u = gather_rows(users.embeddings, t.users);
  const Matrix<T> y = gather_rows(item_embeddings, t.pool);
  EvalReport rep = evaluate_scores(score_items(u, y), t.relevant, t.pool, k);
  rep.n_users_skipped = t.skipped_users;
  return rep;
}

template <class T>
EvalReport evaluate(const ColdStartModel<T>& model, const Dataset& ds, const ColdSplit& split,
                    std::size_t k = 20, ColdPool which = ColdPool::test) {
  return evaluate_embeddings(model.embed_all(ds), ds, split, which, k);
}

/// Uniformly random scores: the random-ranking baseline.
inline EvalReport evaluate_random(const Dataset& ds, const ColdSplit& split, std::size_t k,
                                  std::uint64_t seed, ColdPool which = ColdPool::test) {
  const InteractionMatrix train = InteractionMatrix::from_pairs(ds.n_users(), ds.n_items(), split.warm_train);
  const EvalTargets t = eval_targets(ds, split, which, train);
  if (t.users.empty()) throw std::invalid_argument("evaluate: no evaluable users");
  Rng rng(seed);
  Matrix<double> scores(t.users.size(), t.pool.size());
  for (double& v : scores.values()) v = rng.uniform();
  EvalReport rep = evaluate_scores(scores, t.relevant, t.pool, k);
  rep.n_users_skipped = t.skipped_users;
  return rep;
}

struct RandomBaseline {
  double recall = 0.0;
  double ndcg = 0.0;
};

/// Expected Recall@k and NDCG@k of a uniformly random ranking of a pool of
/// `pool_size` items, averaged over users with the given relevant-set sizes.
inline RandomBaseline random_baseline(std::span<const std::size_t> relevant_sizes,
                                      std::size_t pool_size, std::size_t k) {
  detail::require_k(k);
  RandomBaseline b;
  if (relevant_sizes.empty() || pool_size == 0) return b;
  const std::size_t depth = std::min(k, pool_size);
  double disc = 0.0;
  for (std::size_t r = 1; r <= depth; ++r) disc += detail::discount(r);
  const double p = static_cast<double>(pool_size);
  for (std::size_t n : relevant_sizes) {
    double idcg = 0.0;
    for (std::size_t r = 1; r <= std::min(n, k); ++r) idcg += detail::discount(r);
    b.recall += static_cast<double>(depth) / p;
    b.ndcg += static_cast<double>(n) / p * disc / idcg;
  }
  b.recall /= static_cast<double>(relevant_sizes.size());
  b.ndcg /= static_cast<double>(relevant_sizes.size());
  return b;
}

inline RandomBaseline random_baseline(const Dataset& ds, const ColdSplit& split, std::size_t k,
                                      ColdPool which = ColdPool::test) {
  const InteractionMatrix train = InteractionMatrix::from_pairs(ds.n_users(), ds.n_items(), split.warm_train);
  const EvalTargets t = eval_targets(ds, split, which, train);
  std::vector<std::size_t> sizes;
  for (const auto& r : t.relevant) sizes.push_back(r.size());
  return random_baseline(sizes, t.pool.size(), k);
}

// ---- serialization ---------------------------------------------------------------------

inline nlohmann::json report_to_json(const EvalReport& r) {
  return {{"k", r.k},
          {"recall", r.recall},
          {"ndcg", r.ndcg},
          {"mdg", r.mdg},
          {"gini_diversity", r.gini_diversity},
          {"n_users_evaluated", r.n_users_evaluated},
          {"n_users_skipped", r.n_users_skipped}};
}

/// Columns: item_id, mdg, pred_count.
inline void write_item_table(const std::string& path, const EvalReport& r, const Dataset& ds) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot write '" + path + "'");
  os << "item_id,mdg,pred_count\n";
  os.precision(17);
  for (std::size_t j = 0; j < r.items.size(); ++j) {
    os << ds.item_ids[static_cast<std::size_t>(r.items[j])] << ',' << r.item_mdg[j] << ','
       << r.pred_counts[j] << '\n';
  }
  if (!os) throw DataError("failed writing '" + path + "'");
}

/// Mean and (population) standard deviation of the headline metrics.
inline nlohmann::json aggregate_reports(std::span<const EvalReport> reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate_reports: no reports");
  nlohmann::json out = {{"runs", reports.size()}, {"k", reports[0].k}};
  auto stat = [&](const char* name, auto get) {
    double mean = 0.0;
    for (const auto& r : reports) mean += get(r);
    mean /= static_cast<double>(reports.size());
    double var = 0.0;
    for (const auto& r : reports) var += (get(r) - mean) * (get(r) - mean);
    var /= static_cast<double>(reports.size());
    out[name] = {{"mean", mean}, {"std", std::sqrt(var)}};
  };
  stat("recall", [](const EvalReport& r) { return r.recall; });
  stat("ndcg", [](const EvalReport& r) { return r.ndcg; });
  stat("mdg", [](const EvalReport& r) { return r.mdg; });
  stat("gini_diversity", [](const EvalReport& r) { return r.gini_diversity; });
  return out;
}

}  // namespace semco

#endif  // SEMCO_EVAL_HPP_
