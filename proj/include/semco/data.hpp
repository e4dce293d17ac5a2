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

// Datasets: interaction/feature file formats, the cold-start split and a
// synthetic multimodal generator.
//
// Formats
//   interactions   UTF-8 text, one "user_id<TAB>item_id" per line
//   items          optional UTF-8 text, one item id per line, in feature row order
//   features       "SEMF" | u32 version | u32 rows | u32 cols | rows*cols f32, all LE
//   manifest       JSON {"name", "interactions", ["items"], "modes": [{"name","path","dim"}]}

#ifndef SEMCO_DATA_HPP_
#define SEMCO_DATA_HPP_

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "semco/binary_io.hpp"
#include "semco/errors.hpp"
#include "semco/interactions.hpp"
#include "semco/random.hpp"
#include "semco/tensor.hpp"

namespace semco {

inline constexpr char kFeatureMagic[4] = {'S', 'E', 'M', 'F'};
inline constexpr std::uint32_t kFeatureVersion = 1;

struct Dataset {
  std::string name;
  InteractionMatrix interactions;
  std::vector<std::string> mode_names;
  std::vector<Matrix<float>> features;  // one per mode, rows aligned with items
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::size_t duplicate_interactions = 0;  // collapsed on load

  std::size_t n_users() const { return user_ids.size(); }
  std::size_t n_items() const { return item_ids.size(); }
  std::size_t n_modes() const { return features.size(); }

  std::vector<std::size_t> mode_dims() const {
    std::vector<std::size_t> d;
    for (const auto& f : features) d.push_back(f.cols());
    return d;
  }

  void validate() const {
    if (features.empty()) throw DataError("dataset '" + name + "' has no content modes");
    if (mode_names.size() != features.size()) throw DataError("mode name/feature count mismatch");
    for (std::size_t m = 0; m < features.size(); ++m) {
      if (features[m].rows() != n_items()) {
        throw DataError("dimension mismatch: mode '" + mode_names[m] + "' has " +
                        std::to_string(features[m].rows()) + " rows but there are " +
                        std::to_string(n_items()) + " items");
      }
    }
    if (interactions.n_users() != n_users() || interactions.n_items() != n_items()) {
      throw DataError("interaction matrix shape does not match id maps");
    }
  }
};

/// Scales every row to unit L2 norm. Zero rows and rows already of unit
/// norm (within float rounding) are left untouched.
inline void l2_normalize_rows_inplace(Matrix<float>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    double s = 0.0;
    for (float v : r) s += static_cast<double>(v) * v;
    const double n = std::sqrt(s);
    if (n == 0.0 || std::abs(n - 1.0) <= 4.0 * FLT_EPSILON) continue;
    for (float& v : r) v = static_cast<float>(v / n);
  }
}

// ---- feature matrix files ----------------------------------------------------------

inline void write_feature_matrix(const std::string& path, const Matrix<float>& m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write feature file '" + path + "'");
  binary::write_bytes(os, std::string_view(kFeatureMagic, 4));
  binary::write_u32(os, kFeatureVersion);
  binary::write_u32(os, static_cast<std::uint32_t>(m.rows()));
  binary::write_u32(os, static_cast<std::uint32_t>(m.cols()));
  for (float v : m.values()) binary::write_f32(os, v);
  if (!os) throw DataError("failed writing feature file '" + path + "'");
}

inline Matrix<float> read_feature_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("missing feature file '" + path + "'");
  const std::string what = "feature file '" + path + "'";
  if (binary::read_bytes(is, 4, what) != std::string_view(kFeatureMagic, 4)) {
    throw DataError(what + ": bad magic");
  }
  const std::uint32_t version = binary::read_u32(is, what);
  if (version != kFeatureVersion) throw DataError(what + ": unsupported version");
  const std::uint32_t rows = binary::read_u32(is, what);
  const std::uint32_t cols = binary::read_u32(is, what);
  Matrix<float> m(rows, cols);
  for (float& v : m.values()) {
    v = binary::read_f32(is, what);
    if (!std::isfinite(v)) throw DataError(what + ": non-finite value");
  }
  if (is.peek() != std::char_traits<char>::eof()) throw DataError(what + ": trailing bytes");
  return m;
}

// ---- text helpers ------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path, const char* kind) {
  std::ifstream is(path);
  if (!is) throw DataError(std::string("missing ") + kind + " file '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

struct TsvPair {
  std::string user;
  std::string item;
};

inline TsvPair parse_pair_line(const std::string& line, const std::string& path, std::size_t no) {
  const auto tab = line.find('\t');
  if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
      line.find('\t', tab + 1) != std::string::npos) {
    throw DataError(path + ":" + std::to_string(no) + ": malformed row, expected user_id<TAB>item_id");
  }
  return {line.substr(0, tab), line.substr(tab + 1)};
}

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path.string() : (base / path).string();
}

}  // namespace detail

// ---- manifest ------------------------------------------------------------------------

/// Loads a dataset from its manifest. Per-mode features are L2-normalized per row.
inline Dataset load_dataset(const std::string& manifest_path) {
  std::ifstream is(manifest_path);
  if (!is) throw DataError("missing manifest '" + manifest_path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest '" + manifest_path + "': " + e.what());
  }
  const auto base = std::filesystem::path(manifest_path).parent_path();
  Dataset ds;
  std::vector<std::string> interaction_lines;
  std::string interactions_path;
  try {
    for (const auto& [key, _] : j.items()) {
      if (key != "name" && key != "interactions" && key != "items" && key != "modes") {
        throw DataError("manifest: unknown key '" + key + "'");
      }
    }
    ds.name = j.at("name").get<std::string>();
    interactions_path = detail::resolve(base, j.at("interactions").get<std::string>());
    for (const auto& mode : j.at("modes")) {
      const std::string name = mode.at("name").get<std::string>();
      const std::string path = detail::resolve(base, mode.at("path").get<std::string>());
      const std::size_t dim = mode.at("dim").get<std::size_t>();
      Matrix<float> f = read_feature_matrix(path);
      if (f.cols() != dim) {
        throw DataError("dimension mismatch: mode '" + name + "' declares dim " +
                        std::to_string(dim) + " but file has " + std::to_string(f.cols()));
      }
      l2_normalize_rows_inplace(f);
      ds.mode_names.push_back(name);
      ds.features.push_back(std::move(f));
    }
    if (ds.features.empty()) throw DataError("manifest: no modes listed");
    if (j.contains("items")) {
      for (auto& line : detail::read_lines(detail::resolve(base, j.at("items").get<std::string>()), "items")) {
        if (!line.empty()) ds.item_ids.push_back(std::move(line));
      }
    } else {
      for (std::size_t i = 0; i < ds.features[0].rows(); ++i) ds.item_ids.push_back(std::to_string(i));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest '" + manifest_path + "': " + e.what());
  }
  for (std::size_t m = 0; m < ds.features.size(); ++m) {
    if (ds.features[m].rows() != ds.item_ids.size()) {
      throw DataError("dimension mismatch: mode '" + ds.mode_names[m] + "' has " +
                      std::to_string(ds.features[m].rows()) + " rows but there are " +
                      std::to_string(ds.item_ids.size()) + " items");
    }
  }

  std::unordered_map<std::string, int> item_index;
  for (std::size_t i = 0; i < ds.item_ids.size(); ++i) {
    if (!item_index.emplace(ds.item_ids[i], static_cast<int>(i)).second) {
      throw DataError("duplicate item id '" + ds.item_ids[i] + "'");
    }
  }
  std::unordered_map<std::string, int> user_index;
  std::vector<Interaction> pairs;
  const auto lines = detail::read_lines(interactions_path, "interactions");
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto p = detail::parse_pair_line(lines[n], interactions_path, n + 1);
    const auto it = item_index.find(p.item);
    if (it == item_index.end()) {
      throw DataError(interactions_path + ":" + std::to_string(n + 1) + ": unknown item id '" +
                      p.item + "'");
    }
    auto [u, inserted] = user_index.emplace(p.user, static_cast<int>(ds.user_ids.size()));
    if (inserted) ds.user_ids.push_back(p.user);
    pairs.push_back({u->second, it->second});
  }
  ds.interactions = InteractionMatrix::from_pairs(ds.user_ids.size(), ds.item_ids.size(), pairs,
                                                  &ds.duplicate_interactions);
  ds.validate();
  return ds;
}

/// Writes manifest.json, interactions.tsv, items.txt and one .semf file per mode.
inline std::string save_dataset(const Dataset& ds, const std::string& dir) {
  ds.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
  nlohmann::json manifest = {{"name", ds.name},
                             {"interactions", "interactions.tsv"},
                             {"items", "items.txt"},
                             {"modes", nlohmann::json::array()}};
  for (std::size_t m = 0; m < ds.n_modes(); ++m) {
    const std::string file = "mode_" + ds.mode_names[m] + ".semf";
    write_feature_matrix((fs::path(dir) / file).string(), ds.features[m]);
    manifest["modes"].push_back(
        {{"name", ds.mode_names[m]}, {"path", file}, {"dim", ds.features[m].cols()}});
  }
  {
    std::ofstream os(fs::path(dir) / "items.txt", std::ios::trunc);
    for (const auto& id : ds.item_ids) os << id << '\n';
    if (!os) throw DataError("failed writing items.txt in '" + dir + "'");
  }
  {
    std::ofstream os(fs::path(dir) / "interactions.tsv", std::ios::trunc);
    for (std::size_t u = 0; u < ds.n_users(); ++u) {
      for (int i : ds.interactions.items_of(u)) {
        os << ds.user_ids[u] << '\t' << ds.item_ids[static_cast<std::size_t>(i)] << '\n';
      }
    }
    if (!os) throw DataError("failed writing interactions.tsv in '" + dir + "'");
  }
  const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
  std::ofstream os(manifest_path, std::ios::trunc);
  os << manifest.dump(2) << '\n';
  if (!os) throw DataError("failed writing manifest in '" + dir + "'");
  return manifest_path;
}

// ---- cold-start split ----------------------------------------------------------------

struct SplitOptions {
  double cold_frac = 0.2;
  std::array<double, 3> warm_ratios{0.8, 0.1, 0.1};
  std::uint64_t seed = 0;
};

struct ColdSplit {
  std::vector<int> warm_items;
  std::vector<int> cold_val_items;
  std::vector<int> cold_test_items;
  std::vector<Interaction> warm_train;
  std::vector<Interaction> warm_val;
  std::vector<Interaction> warm_test;
  std::vector<Interaction> cold_val;
  std::vector<Interaction> cold_test;

  /// Disjointness and coverage checks; throws DataError on violation.
  void validate(std::size_t n_items) const {
    std::vector<int> owner(n_items, -1);
    auto mark = [&](const std::vector<int>& items, int tag) {
      for (int i : items) {
        if (i < 0 || static_cast<std::size_t>(i) >= n_items) throw DataError("split: item out of range");
        if (owner[static_cast<std::size_t>(i)] != -1) throw DataError("split: item sets overlap");
        owner[static_cast<std::size_t>(i)] = tag;
      }
    };
    mark(warm_items, 0);
    mark(cold_val_items, 1);
    mark(cold_test_items, 2);
    auto check = [&](const std::vector<Interaction>& xs, int tag, const char* what) {
      for (const auto& x : xs) {
        if (owner[static_cast<std::size_t>(x.item)] != tag) {
          throw DataError(std::string("split: interaction in ") + what + " touches a foreign item");
        }
      }
    };
    check(warm_train, 0, "warm_train");
    check(warm_val, 0, "warm_val");
    check(warm_test, 0, "warm_test");
    check(cold_val, 1, "cold_val");
    check(cold_test, 2, "cold_test");
    std::vector<Interaction> all;
    for (const auto* xs : {&warm_train, &warm_val, &warm_test}) all.insert(all.end(), xs->begin(), xs->end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
      throw DataError("split: warm interaction sets overlap");
    }
  }
};

/// Samples cold items without replacement (split 50/50 into validation and
/// test pools) and splits the remaining interactions uniformly at random.
inline ColdSplit make_cold_split(const Dataset& ds, const SplitOptions& opt = {}) {
  const std::size_t n_items = ds.n_items();
  if (!(opt.cold_frac > 0.0 && opt.cold_frac < 1.0)) throw DataError("split: cold_frac must be in (0, 1)");
  const double ratio_sum = opt.warm_ratios[0] + opt.warm_ratios[1] + opt.warm_ratios[2];
  if (std::abs(ratio_sum - 1.0) > 1e-9 ||
      std::any_of(opt.warm_ratios.begin(), opt.warm_ratios.end(), [](double r) { return r < 0.0; })) {
    throw DataError("split: warm ratios must be nonnegative and sum to 1");
  }
  const auto n_cold = static_cast<std::size_t>(std::llround(opt.cold_frac * static_cast<double>(n_items)));
  const std::size_t n_val = n_cold / 2;
  const std::size_t n_test = n_cold - n_val;
  if (n_val == 0 || n_test == 0 || n_cold >= n_items) {
    throw DataError("split: degenerate sizes (" + std::to_string(n_items) + " items, " +
                    std::to_string(n_cold) + " cold)");
  }

  Rng rng = Rng::stream(opt.seed, 11);
  std::vector<int> perm(n_items);
  for (std::size_t i = 0; i < n_items; ++i) perm[i] = static_cast<int>(i);
  rng.shuffle(perm);

  ColdSplit s;
  s.cold_val_items.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_val));
  s.cold_test_items.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_val),
                           perm.begin() + static_cast<std::ptrdiff_t>(n_cold));
  s.warm_items.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_cold), perm.end());
  std::sort(s.cold_val_items.begin(), s.cold_val_items.end());
  std::sort(s.cold_test_items.begin(), s.cold_test_items.end());
  std::sort(s.warm_items.begin(), s.warm_items.end());

  std::vector<int> role(n_items, 0);
  for (int i : s.cold_val_items) role[static_cast<std::size_t>(i)] = 1;
  for (int i : s.cold_test_items) role[static_cast<std::size_t>(i)] = 2;

  std::vector<Interaction> warm;
  for (const auto& p : ds.interactions.pairs()) {
    const int r = role[static_cast<std::size_t>(p.item)];
    if (r == 1) {
      s.cold_val.push_back(p);
    } else if (r == 2) {
      s.cold_test.push_back(p);
    } else {
      warm.push_back(p);
    }
  }
  rng.shuffle(warm);
  const double nw = static_cast<double>(warm.size());
  const auto n_train = static_cast<std::size_t>(std::llround(opt.warm_ratios[0] * nw));
  const auto n_wval = std::min(warm.size() - n_train,
                               static_cast<std::size_t>(std::llround(opt.warm_ratios[1] * nw)));
  s.warm_train.assign(warm.begin(), warm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.warm_val.assign(warm.begin() + static_cast<std::ptrdiff_t>(n_train),
                    warm.begin() + static_cast<std::ptrdiff_t>(n_train + n_wval));
  s.warm_test.assign(warm.begin() + static_cast<std::ptrdiff_t>(n_train + n_wval), warm.end());
  for (auto* xs : {&s.warm_train, &s.warm_val, &s.warm_test}) std::sort(xs->begin(), xs->end());
  s.validate(n_items);
  return s;
}

namespace detail {

inline void write_items(const std::string& path, const std::vector<int>& items, const Dataset& ds) {
  std::ofstream os(path, std::ios::trunc);
  for (int i : items) os << ds.item_ids[static_cast<std::size_t>(i)] << '\n';
  if (!os) throw DataError("failed writing '" + path + "'");
}

inline void write_pairs(const std::string& path, const std::vector<Interaction>& xs, const Dataset& ds) {
  std::ofstream os(path, std::ios::trunc);
  for (const auto& x : xs) {
    os << ds.user_ids[static_cast<std::size_t>(x.user)] << '\t'
       << ds.item_ids[static_cast<std::size_t>(x.item)] << '\n';
  }
  if (!os) throw DataError("failed writing '" + path + "'");
}

inline std::vector<int> read_items(const std::string& path,
                                   const std::unordered_map<std::string, int>& index) {
  std::vector<int> out;
  const auto lines = read_lines(path, "split");
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto it = index.find(lines[n]);
    if (it == index.end()) {
      throw DataError(path + ":" + std::to_string(n + 1) + ": unknown item id '" + lines[n] + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

inline std::vector<Interaction> read_pairs(const std::string& path,
                                           const std::unordered_map<std::string, int>& users,
                                           const std::unordered_map<std::string, int>& items) {
  std::vector<Interaction> out;
  const auto lines = read_lines(path, "split");
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto p = parse_pair_line(lines[n], path, n + 1);
    const auto u = users.find(p.user);
    const auto i = items.find(p.item);
    if (u == users.end() || i == items.end()) {
      throw DataError(path + ":" + std::to_string(n + 1) + ": unknown id");
    }
    out.push_back({u->second, i->second});
  }
  return out;
}

}  // namespace detail

inline constexpr const char* kSplitLists[] = {"warm_train", "warm_val", "warm_test", "cold_val",
                                              "cold_test"};

inline nlohmann::json split_summary(const ColdSplit& s) {
  return {{"n_warm_items", s.warm_items.size()},
          {"n_cold_val_items", s.cold_val_items.size()},
          {"n_cold_test_items", s.cold_test_items.size()},
          {"n_warm_train", s.warm_train.size()},
          {"n_warm_val", s.warm_val.size()},
          {"n_warm_test", s.warm_test.size()},
          {"n_cold_val", s.cold_val.size()},
          {"n_cold_test", s.cold_test.size()}};
}

/// Writes item lists, interaction partitions (external ids) and summary.json.
inline void save_split(const ColdSplit& s, const Dataset& ds, const std::string& dir,
                       nlohmann::json summary_extra = nlohmann::json::object()) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
  const fs::path d(dir);
  detail::write_items((d / "warm_items.txt").string(), s.warm_items, ds);
  detail::write_items((d / "cold_val_items.txt").string(), s.cold_val_items, ds);
  detail::write_items((d / "cold_test_items.txt").string(), s.cold_test_items, ds);
  const std::vector<Interaction>* lists[] = {&s.warm_train, &s.warm_val, &s.warm_test, &s.cold_val,
                                             &s.cold_test};
  for (std::size_t k = 0; k < 5; ++k) {
    detail::write_pairs((d / (std::string(kSplitLists[k]) + ".tsv")).string(), *lists[k], ds);
  }
  nlohmann::json summary = split_summary(s);
  summary.update(summary_extra);
  std::ofstream os(d / "summary.json", std::ios::trunc);
  os << summary.dump(2) << '\n';
  if (!os) throw DataError("failed writing summary.json in '" + dir + "'");
}

inline ColdSplit load_split(const std::string& dir, const Dataset& ds) {
  namespace fs = std::filesystem;
  std::unordered_map<std::string, int> users;
  std::unordered_map<std::string, int> items;
  for (std::size_t u = 0; u < ds.n_users(); ++u) users.emplace(ds.user_ids[u], static_cast<int>(u));
  for (std::size_t i = 0; i < ds.n_items(); ++i) items.emplace(ds.item_ids[i], static_cast<int>(i));
  const fs::path d(dir);
  ColdSplit s;
  s.warm_items = detail::read_items((d / "warm_items.txt").string(), items);
  s.cold_val_items = detail::read_items((d / "cold_val_items.txt").string(), items);
  s.cold_test_items = detail::read_items((d / "cold_test_items.txt").string(), items);
  std::vector<Interaction>* lists[] = {&s.warm_train, &s.warm_val, &s.warm_test, &s.cold_val,
                                       &s.cold_test};
  for (std::size_t k = 0; k < 5; ++k) {
    *lists[k] = detail::read_pairs((d / (std::string(kSplitLists[k]) + ".tsv")).string(), users, items);
  }
  s.validate(ds.n_items());
  return s;
}

// ---- synthetic data ------------------------------------------------------------------

struct SyntheticConfig {
  std::size_t n_users = 500;
  std::size_t n_items = 400;
  std::size_t n_topics = 8;
  std::vector<std::size_t> mode_dims{32, 48};
  double noise_sigma = 0.1;
  std::size_t interactions_per_user = 20;
  std::uint64_t seed = 0;
  double topic_concentration = 3.0;  // logit scale of item/user topic mixtures
  double affinity_scale = 10.0;      // logit scale of user-item affinity

  void validate() const {
    if (n_users == 0 || n_items == 0 || n_topics == 0 || mode_dims.empty()) {
      throw DataError("synthetic: sizes must be positive");
    }
    for (std::size_t d : mode_dims) {
      if (n_topics > d) throw DataError("synthetic: topics exceed a mode dimension");
    }
    if (interactions_per_user == 0 || interactions_per_user > n_items) {
      throw DataError("synthetic: interactions per user must be in [1, items]");
    }
    if (!(noise_sigma >= 0.0)) throw DataError("synthetic: noise must be nonnegative");
  }
};

/// Latent structure behind a synthetic dataset.
struct SyntheticWorld {
  Matrix<double> item_topics;               // items x topics, rows on the simplex
  Matrix<double> user_topics;               // users x topics, rows on the simplex
  std::vector<Matrix<double>> mode_maps;    // topics x dim_m
};

namespace detail {

inline void softmax_row(std::span<double> r) {
  const double m = *std::max_element(r.begin(), r.end());
  double s = 0.0;
  for (double& v : r) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : r) v /= s;
}

}  // namespace detail

inline SyntheticWorld make_synthetic_world(const SyntheticConfig& c) {
  c.validate();
  Rng rng = Rng::stream(c.seed, 1);
  SyntheticWorld w;
  w.item_topics = Matrix<double>(c.n_items, c.n_topics);
  for (std::size_t i = 0; i < c.n_items; ++i) {
    for (double& v : w.item_topics.row(i)) v = c.topic_concentration * rng.normal();
    detail::softmax_row(w.item_topics.row(i));
  }
  w.user_topics = Matrix<double>(c.n_users, c.n_topics);
  for (std::size_t u = 0; u < c.n_users; ++u) {
    for (double& v : w.user_topics.row(u)) v = c.topic_concentration * rng.normal();
    detail::softmax_row(w.user_topics.row(u));
  }
  for (std::size_t d : c.mode_dims) {
    Matrix<double> a(c.n_topics, d);
    for (double& v : a.values()) v = rng.normal();
    w.mode_maps.push_back(std::move(a));
  }
  return w;
}

/// feature_m = item_topics * map_m + sigma * N(0, 1), before normalization.
inline std::vector<Matrix<float>> render_synthetic_features(const SyntheticWorld& w, double sigma,
                                                            Rng& rng) {
  std::vector<Matrix<float>> out;
  for (const auto& map : w.mode_maps) {
    const Matrix<double> clean = matmul(w.item_topics, map);
    Matrix<float> f(clean.rows(), clean.cols());
    for (std::size_t k = 0; k < f.size(); ++k) {
      f.values()[k] = static_cast<float>(clean.values()[k] + sigma * rng.normal());
    }
    out.push_back(std::move(f));
  }
  return out;
}

/// Each user draws interactions_per_user distinct items with probability
/// proportional to softmax(affinity_scale * user_topics . item_topics).
inline Dataset generate_synthetic(const SyntheticConfig& c) {
  const SyntheticWorld w = make_synthetic_world(c);
  Rng noise = Rng::stream(c.seed, 2);
  Rng pick = Rng::stream(c.seed, 3);
  Dataset ds;
  ds.name = "synthetic";
  ds.features = render_synthetic_features(w, c.noise_sigma, noise);
  for (auto& f : ds.features) l2_normalize_rows_inplace(f);
  for (std::size_t m = 0; m < ds.features.size(); ++m) ds.mode_names.push_back("mode" + std::to_string(m));
  for (std::size_t u = 0; u < c.n_users; ++u) ds.user_ids.push_back("u" + std::to_string(u));
  for (std::size_t i = 0; i < c.n_items; ++i) ds.item_ids.push_back("i" + std::to_string(i));

  const Matrix<double> affinity = matmul_nt(w.user_topics, w.item_topics);
  std::vector<Interaction> pairs;
  std::vector<std::pair<double, int>> keys(c.n_items);
  for (std::size_t u = 0; u < c.n_users; ++u) {
    const auto a = affinity.row(u);
    const double amax = *std::max_element(a.begin(), a.end());
    // Weighted sampling without replacement: largest log(U) / weight keys.
    for (std::size_t i = 0; i < c.n_items; ++i) {
      double r;
      do {
        r = pick.uniform();
      } while (r <= 0.0);
      const double weight = std::exp(c.affinity_scale * (a[i] - amax));
      keys[i] = {std::log(r) / weight, static_cast<int>(i)};
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(c.interactions_per_user),
                      keys.end(), [](const auto& x, const auto& y) {
                        return x.first > y.first || (x.first == y.first && x.second < y.second);
                      });
    for (std::size_t k = 0; k < c.interactions_per_user; ++k) {
      pairs.push_back({static_cast<int>(u), keys[k].second});
    }
  }
  ds.interactions = InteractionMatrix::from_pairs(c.n_users, c.n_items, pairs);
  ds.validate();
  return ds;
}

}  // namespace semco

#endif  // SEMCO_DATA_HPP_
