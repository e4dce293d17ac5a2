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

#ifndef SEMCO_CLI_HPP_
#define SEMCO_CLI_HPP_

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "semco/config.hpp"
#include "semco/data.hpp"
#include "semco/errors.hpp"
#include "semco/eval.hpp"
#include "semco/model.hpp"
#include "semco/training.hpp"

namespace semco::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitTraining = 4;

namespace fs = std::filesystem;
using nlohmann::json;

namespace detail {

inline void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir.string() + "': " + ec.message());
}

inline void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::trunc);
  os << j.dump(2) << '\n';
  if (!os) throw DataError("failed writing '" + path.string() + "'");
}

inline json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("missing '" + path.string() + "'");
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw DataError("'" + path.string() + "': " + e.what());
  }
}

inline std::string absolute(const std::string& p) {
  return fs::absolute(fs::path(p)).lexically_normal().string();
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- synth -------------------------------------------------------------------------------

struct SynthArgs {
  std::size_t users = 500;
  std::size_t items = 400;
  std::size_t topics = 8;
  std::vector<std::size_t> modes{32, 48};
  double noise = 0.1;
  std::size_t per_user = 20;
  std::uint64_t seed = 0;
  std::string out;
};

inline int synth(const SynthArgs& a, std::ostream& out) {
  SyntheticConfig c;
  c.n_users = a.users;
  c.n_items = a.items;
  c.n_topics = a.topics;
  c.mode_dims = a.modes;
  c.noise_sigma = a.noise;
  c.interactions_per_user = a.per_user;
  c.seed = a.seed;
  try {
    c.validate();
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  const Dataset ds = generate_synthetic(c);
  const std::string manifest = save_dataset(ds, a.out);
  write_json(fs::path(a.out) / "config.json",
             {{"command", "synth"},
              {"users", a.users},
              {"items", a.items},
              {"topics", a.topics},
              {"modes", a.modes},
              {"noise", a.noise},
              {"per_user", a.per_user},
              {"seed", a.seed}});
  out << "wrote " << manifest << " (" << ds.n_users() << " users, " << ds.n_items() << " items, "
      << ds.interactions.nnz() << " interactions)\n";
  return kExitOk;
}

// ---- split -------------------------------------------------------------------------------

inline json split_record(const std::string& manifest, const SplitOptions& o) {
  return {{"dataset", manifest},
          {"cold_frac", o.cold_frac},
          {"warm_ratios", o.warm_ratios},
          {"seed", o.seed}};
}

/// Makes a split, writes it to `dir` and returns it.
inline ColdSplit write_new_split(const Dataset& ds, const std::string& manifest, const SplitOptions& o,
                                 const fs::path& dir) {
  const ColdSplit s = make_cold_split(ds, o);
  save_split(s, ds, dir.string(), split_record(manifest, o));
  json snap = split_record(manifest, o);
  snap["command"] = "split";
  write_json(dir / "config.json", snap);
  return s;
}

struct SplitArgs {
  std::string config;
  std::string dataset;
  std::optional<double> cold_frac;
  std::optional<std::uint64_t> seed;
  std::string out;
};

inline int split(const SplitArgs& a, std::ostream& out) {
  std::string manifest;
  SplitOptions opt;
  std::string dir = a.out;
  if (!a.config.empty()) {
    const RunConfig c = load_run_config(a.config);
    manifest = c.dataset;
    opt = c.split;
    if (dir.empty()) dir = !c.split_dir.empty() ? c.split_dir : (fs::path(c.out) / "split").string();
  } else {
    if (a.dataset.empty()) throw ConfigError("split: --config or --dataset is required");
    manifest = absolute(a.dataset);
  }
  if (a.cold_frac) opt.cold_frac = *a.cold_frac;
  if (a.seed) opt.seed = *a.seed;
  if (dir.empty()) throw ConfigError("split: --out is required");
  if (!(opt.cold_frac > 0.0 && opt.cold_frac < 1.0)) throw ConfigError("split: --cold-frac must be in (0, 1)");
  const Dataset ds = load_dataset(manifest);
  const ColdSplit s = write_new_split(ds, manifest, opt, dir);
  out << "split: " << s.warm_items.size() << " warm, " << s.cold_val_items.size() << " cold-val, "
      << s.cold_test_items.size() << " cold-test items -> " << dir << '\n';
  return kExitOk;
}

// ---- train -------------------------------------------------------------------------------

inline std::string manifest_of_split(const std::string& dir) {
  const json s = read_json(fs::path(dir) / "summary.json");
  if (!s.contains("dataset") || !s.at("dataset").is_string()) {
    throw DataError("split '" + dir + "' does not record its dataset");
  }
  return s.at("dataset").get<std::string>();
}

struct Prepared {
  Dataset ds;
  ColdSplit split;
  std::string split_dir;
};

/// Loads the dataset and either reuses the configured split or writes a new
/// one under `fallback_dir`.
inline Prepared prepare(const RunConfig& c, const fs::path& fallback_dir) {
  Prepared p{load_dataset(c.dataset), {}, c.split_dir};
  if (!c.split_dir.empty()) {
    p.split = load_split(c.split_dir, p.ds);
  } else {
    p.split = write_new_split(p.ds, c.dataset, c.split, fallback_dir);
    p.split_dir = fallback_dir.string();
  }
  return p;
}

inline json reports_for(const ColdStartModel<float>& model, const Prepared& p,
                        const std::vector<std::size_t>& ks, ColdPool which) {
  const Matrix<float> y = model.embed_all(p.ds);
  json out = json::object();
  for (std::size_t k : ks) {
    json r = report_to_json(evaluate_embeddings(y, p.ds, p.split, which, k));
    const RandomBaseline b = random_baseline(p.ds, p.split, k, which);
    r["random_recall"] = b.recall;
    r["random_ndcg"] = b.ndcg;
    out[std::to_string(k)] = r;
  }
  return out;
}

struct TrainOutcome {
  double best_val_ndcg = 0.0;
  std::size_t best_epoch = 0;
  json report;
  EvalReport test_first_k;
};

/// Trains one seed into `dir`: epoch logs, checkpoints, reports.
inline TrainOutcome train_one(const RunConfig& c, const Prepared& p, std::uint64_t seed, const fs::path& dir,
                              std::ostream& err) {
  make_dir(dir);
  TrainConfig cfg = c.train;
  cfg.seed = seed;
  std::ofstream epochs(dir / "epochs.jsonl", std::ios::trunc);
  std::optional<std::ofstream> teacher_epochs;
  auto t0 = std::chrono::steady_clock::now();
  FitHooks hooks;
  hooks.on_epoch = [&](const EpochLog& e) {
    epochs << epoch_to_json(e, cfg.eval_k).dump() << '\n';
    epochs.flush();
    char line[256];
    std::snprintf(line, sizeof line, "[%s/%s seed %llu] epoch %zu/%zu loss %.5f val_ndcg@%zu %.4f nnz %.4f (%.1fs)\n",
                  e.variant.c_str(), e.alpha.c_str(), static_cast<unsigned long long>(seed), e.epoch,
                  cfg.epochs, e.loss, cfg.eval_k, e.val_ndcg, e.nonzero_fraction, seconds_since(t0));
    err << line;
  };
  hooks.on_teacher_epoch = [&](const EpochLog& e) {
    if (!teacher_epochs) teacher_epochs.emplace(dir / "teacher_epochs.jsonl", std::ios::trunc);
    *teacher_epochs << epoch_to_json(e, cfg.eval_k).dump() << '\n';
    char line[160];
    std::snprintf(line, sizeof line, "[teacher seed %llu] epoch %zu/%zu loss %.5f val_ndcg@%zu %.4f\n",
                  static_cast<unsigned long long>(seed), e.epoch, cfg.epochs, e.loss, cfg.eval_k, e.val_ndcg);
    err << line;
  };
  std::optional<ColdStartModel<float>> teacher;
  if (cfg.variant == Variant::offline && !c.teacher_checkpoint.empty()) {
    teacher.emplace(ColdStartModel<float>::load(c.teacher_checkpoint));
    hooks.teacher = &*teacher;
  }
  FitResult r = fit(p.ds, p.split, cfg, hooks);
  if (!epochs) throw DataError("failed writing epoch log in '" + dir.string() + "'");
  r.model.save((dir / "model.ckpt").string());
  if (r.teacher) r.teacher->save((dir / "teacher.ckpt").string());

  TrainOutcome o;
  o.best_val_ndcg = r.best_val_ndcg;
  o.best_epoch = r.best_epoch;
  o.report = {{"variant", variant_name(cfg.variant)},
              {"alpha", alpha_name(cfg.alpha)},
              {"seed", seed},
              {"best_epoch", r.best_epoch},
              {"selection_k", cfg.eval_k},
              {"best_val_ndcg", r.best_val_ndcg},
              {"validation", reports_for(r.model, p, c.eval_k, ColdPool::validation)},
              {"test", reports_for(r.model, p, c.eval_k, ColdPool::test)}};
  write_json(dir / "report.json", o.report);
  o.test_first_k = evaluate(r.model, p.ds, p.split, c.eval_k.front(), ColdPool::test);
  write_item_table((dir / "items.csv").string(), o.test_first_k, p.ds);
  return o;
}

struct TrainArgs {
  std::string config;
  std::string variant;
  std::string alpha;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::string out;
  std::string teacher;
};

inline json load_config_doc(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

inline int train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  json doc = load_config_doc(a.config);
  if (!doc.is_object()) throw ConfigError("config: expected an object");
  if (!a.variant.empty()) set_param(doc, "train.variant", a.variant);
  if (!a.alpha.empty()) set_param(doc, "train.alpha", a.alpha);
  if (a.epochs) set_param(doc, "train.epochs", *a.epochs);
  if (a.seed) doc["seeds"] = json::array({*a.seed});
  if (!a.out.empty()) doc["out"] = absolute(a.out);
  if (!a.teacher.empty()) doc["teacher_checkpoint"] = absolute(a.teacher);
  const RunConfig c = parse_run_config(doc, fs::absolute(a.config).parent_path());
  if (c.out.empty()) throw ConfigError("train: no output directory (config 'out' or --out)");
  make_dir(c.out);
  write_json(fs::path(c.out) / "config.json", to_json(c));
  const Prepared p = prepare(c, fs::path(c.out) / "split");

  std::vector<EvalReport> tests;
  for (std::uint64_t seed : c.seeds) {
    const fs::path dir = c.seeds.size() == 1 ? fs::path(c.out) : fs::path(c.out) / ("seed_" + std::to_string(seed));
    const TrainOutcome o = train_one(c, p, seed, dir, err);
    tests.push_back(o.test_first_k);
    out << "seed " << seed << ": best epoch " << o.best_epoch << ", val ndcg@" << c.train.eval_k << " "
        << o.best_val_ndcg << ", test ndcg@" << c.eval_k.front() << " " << o.test_first_k.ndcg << '\n';
  }
  if (c.seeds.size() > 1) {
    write_json(fs::path(c.out) / "report.json", {{"test", aggregate_reports(tests)}});
  }
  return kExitOk;
}

// ---- eval --------------------------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> checkpoints;
  std::string split;
  std::string dataset;
  std::size_t k = 20;
  std::string pool = "test";
  std::string out;
};

inline int eval(const EvalArgs& a, std::ostream& out) {
  if (a.k == 0) throw ConfigError("eval: --k must be positive");
  if (a.pool != "test" && a.pool != "validation") throw ConfigError("eval: --pool must be test or validation");
  const ColdPool which = a.pool == "test" ? ColdPool::test : ColdPool::validation;
  const std::string manifest = a.dataset.empty() ? manifest_of_split(a.split) : absolute(a.dataset);
  const Dataset ds = load_dataset(manifest);
  const ColdSplit s = load_split(a.split, ds);
  make_dir(a.out);

  std::vector<std::string> ckpts;
  for (const auto& c : a.checkpoints) ckpts.push_back(absolute(c));
  write_json(fs::path(a.out) / "config.json",
             {{"command", "eval"},
              {"checkpoints", ckpts},
              {"split", absolute(a.split)},
              {"dataset", manifest},
              {"k", a.k},
              {"pool", a.pool}});

  std::vector<EvalReport> reports;
  json runs = json::array();
  for (std::size_t n = 0; n < ckpts.size(); ++n) {
    const auto model = ColdStartModel<float>::load(ckpts[n]);
    const EvalReport r = evaluate(model, ds, s, a.k, which);
    json j = report_to_json(r);
    j["checkpoint"] = ckpts[n];
    runs.push_back(j);
    reports.push_back(r);
    const std::string table = ckpts.size() == 1 ? "items.csv" : "items_" + std::to_string(n) + ".csv";
    write_item_table((fs::path(a.out) / table).string(), r, ds);
    out << ckpts[n] << ": recall@" << a.k << " " << r.recall << " ndcg@" << a.k << " " << r.ndcg << " mdg@"
        << a.k << " " << r.mdg << " diversity " << r.gini_diversity << '\n';
  }
  const RandomBaseline base = random_baseline(ds, s, a.k, which);
  json report = ckpts.size() == 1 ? runs[0] : json{{"runs", runs}, {"aggregate", aggregate_reports(reports)}};
  report["random_baseline"] = {{"recall", base.recall}, {"ndcg", base.ndcg}};
  write_json(fs::path(a.out) / "report.json", report);
  out << "random baseline: recall@" << a.k << " " << base.recall << " ndcg@" << a.k << " " << base.ndcg << '\n';
  return kExitOk;
}

// ---- search ------------------------------------------------------------------------------

inline std::vector<json> grid_trials(const SearchConfig& s) {
  std::vector<json> trials{json::object()};
  for (const auto& [key, values] : s.grid) {
    std::vector<json> next;
    for (const auto& t : trials) {
      for (const auto& v : values) {
        json u = t;
        u[key] = v;
        next.push_back(std::move(u));
      }
    }
    trials = std::move(next);
  }
  return trials;
}

inline std::vector<json> random_trials(const SearchConfig& s, std::size_t n) {
  Rng rng = Rng::stream(s.seed, 300);
  std::vector<json> trials;
  for (std::size_t t = 0; t < n; ++t) {
    json params = json::object();
    for (const auto& [key, r] : s.random) {
      if (!r.choices.empty()) {
        params[key] = r.choices[rng.index(r.choices.size())];
        continue;
      }
      double v = r.log ? std::exp(rng.uniform(std::log(r.min), std::log(r.max))) : rng.uniform(r.min, r.max);
      if (r.integer) {
        const long long n = std::llround(v);
        if (n >= 0) {
          params[key] = static_cast<std::uint64_t>(n);
        } else {
          params[key] = static_cast<std::int64_t>(n);
        }
      } else {
        params[key] = v;
      }
    }
    trials.push_back(std::move(params));
  }
  return trials;
}

struct SearchArgs {
  std::string config;
  bool grid = false;
  std::optional<std::size_t> random;
  std::string out;
};

inline int search(const SearchArgs& a, std::ostream& out, std::ostream& err) {
  if (a.grid == a.random.has_value()) throw ConfigError("search: pass exactly one of --grid or --random N");
  json doc = load_config_doc(a.config);
  if (!doc.is_object()) throw ConfigError("config: expected an object");
  if (!a.out.empty()) doc["out"] = absolute(a.out);
  const fs::path base_dir = fs::absolute(a.config).parent_path();
  const RunConfig c = parse_run_config(doc, base_dir);
  if (c.out.empty()) throw ConfigError("search: no output directory (config 'out' or --out)");
  if (a.grid && c.search.grid.empty()) throw ConfigError("search: config has no search.grid");
  if (a.random && c.search.random.empty()) throw ConfigError("search: config has no search.random");
  if (a.random && *a.random == 0) throw ConfigError("search: --random needs N >= 1");
  const std::vector<json> trials = a.grid ? grid_trials(c.search) : random_trials(c.search, *a.random);

  make_dir(c.out);
  json snapshot = to_json(c);
  snapshot["search_mode"] = a.grid ? "grid" : "random";
  if (a.random) snapshot["search_trials"] = *a.random;
  write_json(fs::path(c.out) / "config.json", snapshot);
  const Prepared p = prepare(c, fs::path(c.out) / "split");
  const std::size_t k = c.train.eval_k;

  // Completed trials, keyed by their canonical parameter string.
  const fs::path ledger_path = fs::path(c.out) / "trials.jsonl";
  std::map<std::string, json> done;
  std::vector<json> kept;
  if (fs::exists(ledger_path)) {
    std::ifstream is(ledger_path);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      try {
        json e = json::parse(line);
        done[e.at("params").dump()] = e;
        kept.push_back(std::move(e));
      } catch (const json::exception&) {
        // a torn final line from an interrupted run
      }
    }
  }
  // rewrite without any torn tail, then append
  std::ofstream ledger(ledger_path, std::ios::trunc);
  for (const auto& e : kept) ledger << e.dump() << '\n';
  std::vector<json> rows;
  std::size_t ran = 0;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const std::string key = trials[t].dump();
    const std::string id = "trial_" + std::to_string(t);
    if (auto it = done.find(key); it != done.end()) {
      rows.push_back(it->second);
      continue;
    }
    json tdoc = to_json(c);
    tdoc.erase("search");
    tdoc["seeds"] = json::array({c.seeds.front()});
    tdoc["split"]["dir"] = p.split_dir;
    for (const auto& [pk, pv] : trials[t].items()) set_param(tdoc, pk, pv);
    const fs::path dir = fs::path(c.out) / id;
    tdoc["out"] = dir.string();
    const RunConfig tc = parse_run_config(tdoc, base_dir);
    make_dir(dir);
    write_json(dir / "config.json", to_json(tc));
    err << "search: " << id << " " << key << '\n';
    const TrainOutcome o = train_one(tc, p, tc.seeds.front(), dir, err);
    json entry = {{"id", id}, {"params", trials[t]}, {"val_ndcg", o.best_val_ndcg}, {"best_epoch", o.best_epoch}};
    ledger << entry.dump() << '\n';
    ledger.flush();
    if (!ledger) throw DataError("failed writing '" + ledger_path.string() + "'");
    done[key] = entry;
    rows.push_back(entry);
    ++ran;
  }

  std::stable_sort(rows.begin(), rows.end(), [](const json& x, const json& y) {
    return x.at("val_ndcg").get<double>() > y.at("val_ndcg").get<double>();
  });
  std::set<std::string> keys;
  for (const auto& r : rows)
    for (const auto& [pk, _] : r.at("params").items()) keys.insert(pk);
  std::ofstream board(fs::path(c.out) / "leaderboard.csv", std::ios::trunc);
  board.precision(17);
  board << "rank,trial,val_ndcg@" << k << ",best_epoch";
  for (const auto& pk : keys) board << ',' << pk;
  board << '\n';
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const json& r = rows[n];
    board << n + 1 << ',' << r.at("id").get<std::string>() << ',' << r.at("val_ndcg").get<double>() << ','
          << r.at("best_epoch").get<std::size_t>();
    for (const auto& pk : keys) {
      board << ',';
      if (r.at("params").contains(pk)) board << r.at("params").at(pk).dump();
    }
    board << '\n';
  }
  if (!board) throw DataError("failed writing leaderboard");
  out << "search: " << ran << " trained, " << trials.size() - ran << " resumed; best "
      << rows.front().at("id").get<std::string>() << " val ndcg@" << k << " "
      << rows.front().at("val_ndcg").get<double>() << '\n';
  return kExitOk;
}

}  // namespace detail

/// Entry point for the semco tool. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Sparse contrastive cold-start recommender"};
  app.require_subcommand(1);

  detail::SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic dataset");
  s->add_option("--users", synth.users, "number of users")->capture_default_str();
  s->add_option("--items", synth.items, "number of items")->capture_default_str();
  s->add_option("--topics", synth.topics, "latent topics")->capture_default_str();
  s->add_option("--modes", synth.modes, "feature dims per mode, comma separated")->delimiter(',')->capture_default_str();
  s->add_option("--noise", synth.noise, "feature noise sigma")->capture_default_str();
  s->add_option("--per-user", synth.per_user, "interactions per user")->capture_default_str();
  s->add_option("--seed", synth.seed, "random seed")->capture_default_str();
  s->add_option("--out", synth.out, "output directory")->required();

  detail::SplitArgs split;
  auto* sp = app.add_subcommand("split", "cold-start split of a dataset");
  auto* sp_cfg = sp->add_option("--config", split.config, "run config (JSON)");
  sp->add_option("--dataset", split.dataset, "dataset manifest")->excludes(sp_cfg);
  sp->add_option("--cold-frac", split.cold_frac, "fraction of items held out cold");
  sp->add_option("--seed", split.seed, "random seed");
  sp->add_option("--out", split.out, "output directory");

  detail::TrainArgs train;
  auto* tr = app.add_subcommand("train", "train a model");
  tr->add_option("--config", train.config, "run config (JSON)")->required();
  tr->add_option("--variant", train.variant, "base, offline or online");
  tr->add_option("--alpha", train.alpha, "softmax, entmax15 or sparsemax");
  tr->add_option("--seed", train.seed, "single seed, overriding the config");
  tr->add_option("--epochs", train.epochs, "epochs, overriding the config");
  tr->add_option("--teacher", train.teacher, "teacher checkpoint for offline distillation");
  tr->add_option("--out", train.out, "output directory, overriding the config");

  detail::EvalArgs ev;
  auto* e = app.add_subcommand("eval", "evaluate checkpoints on a cold pool");
  e->add_option("--checkpoint", ev.checkpoints, "checkpoint (repeat to average)")->required();
  e->add_option("--split", ev.split, "split directory")->required();
  e->add_option("--dataset", ev.dataset, "dataset manifest (default: the one recorded by the split)");
  e->add_option("--k", ev.k, "cutoff")->capture_default_str();
  e->add_option("--pool", ev.pool, "test or validation")->capture_default_str();
  e->add_option("--out", ev.out, "output directory")->required();

  detail::SearchArgs se;
  auto* sr = app.add_subcommand("search", "hyperparameter search");
  sr->add_option("--config", se.config, "run config with a search section")->required();
  auto* grid = sr->add_flag("--grid", se.grid, "exhaustive grid from search.grid");
  sr->add_option("--random", se.random, "N random draws from search.random")->excludes(grid);
  sr->add_option("--out", se.out, "output directory, overriding the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    std::ostringstream msg;
    app.exit(ex, msg, msg);
    err << msg.str();
    return kExitUsage;
  }

  try {
    if (*s) return detail::synth(synth, out);
    if (*sp) return detail::split(split, out);
    if (*tr) return detail::train(train, out, err);
    if (*e) return detail::eval(ev, out);
    if (*sr) return detail::search(se, out, err);
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const DataError& ex) {
    err << "data error: " << ex.what() << '\n';
    return kExitData;
  } catch (const TrainingError& ex) {
    err << "training error: " << ex.what() << '\n';
    return kExitTraining;
  } catch (const std::exception& ex) {
    err << "training error: " << ex.what() << '\n';
    return kExitTraining;
  }
  return kExitUsage;
}

}  // namespace semco::cli

#endif  // SEMCO_CLI_HPP_
