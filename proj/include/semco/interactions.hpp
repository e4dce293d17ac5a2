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

#ifndef SEMCO_INTERACTIONS_HPP_
#define SEMCO_INTERACTIONS_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace semco {

struct Interaction {
  int user = 0;
  int item = 0;
  friend bool operator==(const Interaction&, const Interaction&) = default;
  friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

/// Binary user x item matrix stored as sorted per-user item lists.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;
  InteractionMatrix(std::size_t n_users, std::size_t n_items)
      : n_items_(n_items), rows_(n_users) {}

  /// Builds from (user, item) pairs; duplicates collapse and are counted.
  static InteractionMatrix from_pairs(std::size_t n_users, std::size_t n_items,
                                      std::span<const Interaction> pairs,
                                      std::size_t* duplicates = nullptr) {
    InteractionMatrix r(n_users, n_items);
    for (const auto& p : pairs) {
      if (p.user < 0 || static_cast<std::size_t>(p.user) >= n_users || p.item < 0 ||
          static_cast<std::size_t>(p.item) >= n_items) {
        throw std::out_of_range("interaction (" + std::to_string(p.user) + ", " +
                                std::to_string(p.item) + ") out of range");
      }
      r.rows_[static_cast<std::size_t>(p.user)].push_back(p.item);
    }
    std::size_t dups = 0;
    for (auto& row : r.rows_) {
      std::sort(row.begin(), row.end());
      const auto last = std::unique(row.begin(), row.end());
      dups += static_cast<std::size_t>(row.end() - last);
      row.erase(last, row.end());
    }
    if (duplicates) *duplicates = dups;
    return r;
  }

  std::size_t n_users() const { return rows_.size(); }
  std::size_t n_items() const { return n_items_; }

  std::span<const int> items_of(std::size_t user) const { return rows_[user]; }

  bool contains(int user, int item) const {
    const auto& row = rows_[static_cast<std::size_t>(user)];
    return std::binary_search(row.begin(), row.end(), item);
  }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
  }

  std::vector<Interaction> pairs() const {
    std::vector<Interaction> out;
    out.reserve(nnz());
    for (std::size_t u = 0; u < rows_.size(); ++u)
      for (int i : rows_[u]) out.push_back({static_cast<int>(u), i});
    return out;
  }

  friend bool operator==(const InteractionMatrix&, const InteractionMatrix&) = default;

 private:
  std::size_t n_items_ = 0;
  std::vector<std::vector<int>> rows_;
};

}  // namespace semco

#endif  // SEMCO_INTERACTIONS_HPP_
