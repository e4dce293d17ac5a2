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

#ifndef SEMCO_CONFIG_HPP_
#define SEMCO_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "semco/data.hpp"
#include "semco/errors.hpp"
#include "semco/training.hpp"

static_assert(std::is_same_v<std::uint64_t, std::size_t>, "seeds are read through the size_t reader");

namespace semco {

/// One searchable parameter in a random search: either a numeric range
/// (optionally log-uniform, optionally integer) or an explicit choice list.
struct SearchRange {
  double min = 0.0;
  double max = 0.0;
  bool log = false;
  bool integer = false;
  std::vector<nlohmann::json> choices;
};

struct SearchConfig {
  std::map<std::string, std::vector<nlohmann::json>> grid;  // "train.tau" -> values
  std::map<std::string, SearchRange> random;
  std::uint64_t seed = 0;
};

/// Everything a run needs, resolved and validated.
struct RunConfig {
  std::string dataset;       // manifest path
  std::string split_dir;     // existing split to reuse; empty: make one
  SplitOptions split;
  TrainConfig train;
  std::vector<std::size_t> eval_k{20};
  std::vector<std::uint64_t> seeds{0};
  std::string out;
  std::string teacher_checkpoint;  // offline only; empty: train a teacher first
  SearchConfig search;
};

namespace config_detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

inline void only_keys(const nlohmann::json& j, const std::string& where,
                      std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : j.items()) {
    if (!allowed.count(k)) fail(where, "unknown key '" + k + "'");
  }
}

inline std::string path_of(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

inline void read(const nlohmann::json& j, const std::string& where, const char* key, std::size_t& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) fail(path_of(where, key), "expected a nonnegative integer");
  out = v.get<std::size_t>();
}

inline void read(const nlohmann::json& j, const std::string& where, const char* key, double& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number()) fail(path_of(where, key), "expected a number");
  out = v.get<double>();
}

inline void read(const nlohmann::json& j, const std::string& where, const char* key, std::string& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_string()) fail(path_of(where, key), "expected a string");
  out = v.get<std::string>();
}

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return std::filesystem::absolute(path.is_absolute() ? path : base / path).lexically_normal().string();
}

inline void parse_train(const nlohmann::json& j, TrainConfig& t) {
  only_keys(j, "train",
            {"variant", "alpha", "tau", "batch_size", "epochs", "lr", "weight_decay", "hidden_dim",
             "output_dim", "history_cap", "selection_k"});
  std::string variant = variant_name(t.variant);
  std::string alpha = alpha_name(t.alpha);
  read(j, "train", "variant", variant);
  read(j, "train", "alpha", alpha);
  try {
    t.variant = parse_variant(variant);
    t.alpha = parse_alpha(alpha);
  } catch (const std::invalid_argument& e) {
    fail("train", e.what());
  }
  read(j, "train", "tau", t.tau);
  read(j, "train", "batch_size", t.batch_size);
  read(j, "train", "epochs", t.epochs);
  read(j, "train", "lr", t.base_lr);
  read(j, "train", "weight_decay", t.weight_decay);
  read(j, "train", "hidden_dim", t.hidden_dim);
  read(j, "train", "output_dim", t.output_dim);
  read(j, "train", "history_cap", t.history_cap);
  read(j, "train", "selection_k", t.eval_k);
}

inline void parse_distill(const nlohmann::json& j, DistillConfig& d) {
  only_keys(j, "distill",
            {"omega", "lambda", "positives_per_user", "users_per_distill_batch", "ema_decay",
             "teacher_hidden", "teacher_output", "teacher_tau", "teacher_weight_decay",
             "warmup_steps"});
  read(j, "distill", "omega", d.omega);
  read(j, "distill", "lambda", d.lambda);
  read(j, "distill", "positives_per_user", d.positives_per_user);
  read(j, "distill", "users_per_distill_batch", d.users_per_distill_batch);
  read(j, "distill", "ema_decay", d.ema_decay);
  read(j, "distill", "teacher_hidden", d.teacher_hidden);
  read(j, "distill", "teacher_output", d.teacher_output);
  read(j, "distill", "teacher_tau", d.teacher_tau);
  read(j, "distill", "teacher_weight_decay", d.teacher_weight_decay);
  read(j, "distill", "warmup_steps", d.warmup_steps);
}

inline const std::set<std::string>& searchable() {
  static const std::set<std::string> keys{
      "train.tau",           "train.weight_decay",     "train.lr",
      "train.batch_size",    "train.hidden_dim",       "train.output_dim",
      "distill.omega",       "distill.lambda",         "distill.positives_per_user",
      "distill.ema_decay",   "distill.teacher_tau",    "distill.users_per_distill_batch"};
  return keys;
}

inline void parse_search(const nlohmann::json& j, SearchConfig& s) {
  only_keys(j, "search", {"grid", "random", "seed"});
  read(j, "search", "seed", s.seed);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_object()) fail("search.grid", "expected an object");
    for (const auto& [k, v] : g.items()) {
      if (!searchable().count(k)) fail("search.grid", "unsearchable parameter '" + k + "'");
      if (!v.is_array() || v.empty()) fail("search.grid." + k, "expected a nonempty array");
      s.grid[k] = v.get<std::vector<nlohmann::json>>();
    }
  }
  if (j.contains("random")) {
    const auto& r = j.at("random");
    if (!r.is_object()) fail("search.random", "expected an object");
    for (const auto& [k, v] : r.items()) {
      const std::string where = "search.random." + k;
      if (!searchable().count(k)) fail("search.random", "unsearchable parameter '" + k + "'");
      SearchRange range;
      if (v.is_array()) {
        if (v.empty()) fail(where, "expected a nonempty choice list");
        range.choices = v.get<std::vector<nlohmann::json>>();
      } else {
        only_keys(v, where, {"min", "max", "log", "integer"});
        if (!v.contains("min") || !v.contains("max")) fail(where, "needs min and max");
        read(v, where, "min", range.min);
        read(v, where, "max", range.max);
        if (v.contains("log")) range.log = v.at("log").get<bool>();
        if (v.contains("integer")) range.integer = v.at("integer").get<bool>();
        if (!(range.min <= range.max)) fail(where, "min exceeds max");
        if (range.log && !(range.min > 0.0)) fail(where, "log range needs min > 0");
      }
      s.random[k] = std::move(range);
    }
  }
}

}  // namespace config_detail

/// Parses and validates a config document. Relative paths resolve against
/// `base_dir`.
inline RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  using namespace config_detail;
  only_keys(j, "", {"dataset", "split", "train", "distill", "eval_k", "seeds", "out",
                    "teacher_checkpoint", "search"});
  RunConfig c;
  try {
    read(j, "", "dataset", c.dataset);
    read(j, "", "out", c.out);
    read(j, "", "teacher_checkpoint", c.teacher_checkpoint);
    if (j.contains("split")) {
      const auto& s = j.at("split");
      only_keys(s, "split", {"dir", "cold_frac", "warm_ratios", "seed"});
      read(s, "split", "dir", c.split_dir);
      read(s, "split", "cold_frac", c.split.cold_frac);
      read(s, "split", "seed", c.split.seed);
      if (s.contains("warm_ratios")) {
        const auto& w = s.at("warm_ratios");
        if (!w.is_array() || w.size() != 3) fail("split.warm_ratios", "expected three numbers");
        for (std::size_t i = 0; i < 3; ++i) {
          if (!w[i].is_number()) fail("split.warm_ratios", "expected three numbers");
          c.split.warm_ratios[i] = w[i].get<double>();
        }
      }
    }
    if (j.contains("train")) parse_train(j.at("train"), c.train);
    if (j.contains("distill")) parse_distill(j.at("distill"), c.train.distill);
    if (j.contains("eval_k")) {
      const auto& k = j.at("eval_k");
      if (!k.is_array() || k.empty()) fail("eval_k", "expected a nonempty array");
      c.eval_k.clear();
      for (const auto& v : k) {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) fail("eval_k", "entries must be positive integers");
        c.eval_k.push_back(v.get<std::size_t>());
      }
    }
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      if (!s.is_array() || s.empty()) fail("seeds", "expected a nonempty array");
      c.seeds.clear();
      for (const auto& v : s) {
        if (!v.is_number_unsigned()) fail("seeds", "entries must be nonnegative integers");
        c.seeds.push_back(v.get<std::uint64_t>());
      }
    }
    if (j.contains("search")) parse_search(j.at("search"), c.search);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.dataset.empty()) fail("dataset", "required");
  c.dataset = resolve(base_dir, c.dataset);
  c.split_dir = resolve(base_dir, c.split_dir);
  c.out = resolve(base_dir, c.out);
  c.teacher_checkpoint = resolve(base_dir, c.teacher_checkpoint);
  c.train.seed = c.seeds.front();
  try {
    c.train.validate();
    c.train.distill.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const double ratio_sum = c.split.warm_ratios[0] + c.split.warm_ratios[1] + c.split.warm_ratios[2];
  if (std::abs(ratio_sum - 1.0) > 1e-9) fail("split.warm_ratios", "must sum to 1");
  if (!(c.split.cold_frac > 0.0 && c.split.cold_frac < 1.0)) fail("split.cold_frac", "must be in (0, 1)");
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_run_config(j, std::filesystem::absolute(path).parent_path());
}

/// The fully resolved config, every field explicit. Parsing it again yields
/// the same config.
inline nlohmann::json to_json(const RunConfig& c) {
  const TrainConfig& t = c.train;
  const DistillConfig& d = t.distill;
  nlohmann::json j = {
      {"dataset", c.dataset},
      {"split",
       {{"cold_frac", c.split.cold_frac},
        {"warm_ratios", c.split.warm_ratios},
        {"seed", c.split.seed}}},
      {"train",
       {{"variant", variant_name(t.variant)},
        {"alpha", alpha_name(t.alpha)},
        {"tau", t.tau},
        {"batch_size", t.batch_size},
        {"epochs", t.epochs},
        {"lr", t.base_lr},
        {"weight_decay", t.weight_decay},
        {"hidden_dim", t.hidden_dim},
        {"output_dim", t.output_dim},
        {"history_cap", t.history_cap},
        {"selection_k", t.eval_k}}},
      {"distill",
       {{"omega", d.omega},
        {"lambda", d.lambda},
        {"positives_per_user", d.positives_per_user},
        {"users_per_distill_batch", d.users_per_distill_batch},
        {"ema_decay", d.ema_decay},
        {"teacher_hidden", d.teacher_hidden},
        {"teacher_output", d.teacher_output},
        {"teacher_tau", d.teacher_tau},
        {"teacher_weight_decay", d.teacher_weight_decay},
        {"warmup_steps", d.warmup_steps}}},
      {"eval_k", c.eval_k},
      {"seeds", c.seeds},
      {"out", c.out}};
  if (!c.split_dir.empty()) j["split"]["dir"] = c.split_dir;
  if (!c.teacher_checkpoint.empty()) j["teacher_checkpoint"] = c.teacher_checkpoint;
  if (!c.search.grid.empty() || !c.search.random.empty()) {
    nlohmann::json s = {{"seed", c.search.seed}};
    if (!c.search.grid.empty()) s["grid"] = c.search.grid;
    for (const auto& [k, r] : c.search.random) {
      if (!r.choices.empty()) {
        s["random"][k] = r.choices;
      } else {
        s["random"][k] = {{"min", r.min}, {"max", r.max}, {"log", r.log}, {"integer", r.integer}};
      }
    }
    j["search"] = s;
  }
  return j;
}

/// Sets a dotted parameter ("train.tau") on a config document.
inline void set_param(nlohmann::json& doc, const std::string& key, const nlohmann::json& value) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) throw ConfigError("config: bad parameter name '" + key + "'");
  doc[key.substr(0, dot)][key.substr(dot + 1)] = value;
}

}  // namespace semco

#endif  // SEMCO_CONFIG_HPP_
