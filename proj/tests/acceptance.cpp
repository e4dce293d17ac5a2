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

// Acceptance checks. One line per criterion; exit status is nonzero if any
// hard criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "semco/data.hpp"
#include "semco/encoder.hpp"
#include "semco/entmax.hpp"
#include "semco/eval.hpp"
#include "semco/random.hpp"
#include "semco/training.hpp"

namespace fs = std::filesystem;
using namespace semco;

namespace {

enum class Status { pass, fail, flag };

struct Line {
  int id;
  std::string name;
  Status status;
  std::string detail;
};

std::vector<Line> g_lines;

void report(int id, const std::string& name, Status s, const std::string& detail) {
  const char* tag = s == Status::pass ? "PASS" : s == Status::fail ? "FAIL" : "FLAG";
  std::printf("[%s] %2d %s: %s\n", tag, id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  g_lines.push_back({id, name, s, detail});
}

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  report(id, name, ok ? Status::pass : Status::fail, detail);
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> normal_vector(Rng& rng, std::size_t n, double sigma) {
  std::vector<double> v(n);
  for (double& x : v) x = sigma * rng.normal();
  return v;
}

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double s = 0.0;
  for (double& v : p) {
    v = -std::log(1.0 - rng.uniform());
    s += v;
  }
  for (double& v : p) v /= s;
  return p;
}

// ---- 1 -----------------------------------------------------------------------------------

void oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  double worst_proj = 0.0;
  for (double a : {1.25, 1.5, 1.75, 2.0}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = 1 + rng.index(16);
      const auto z = normal_vector(rng, n, 3.0);
      const auto p = entmax(z, Alpha(a));
      const auto q = oracle::entmax(z, a);
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(p[i] - q[i]));
      if (a == 2.0) {
        const auto r = oracle::simplex_projection_exhaustive(z);
        for (std::size_t i = 0; i < n; ++i) worst_proj = std::max(worst_proj, std::abs(p[i] - r[i]));
      }
    }
  }
  const double t = seconds(t0);
  report(1, "entmax oracle equivalence", worst < 1e-8 && worst_proj < 1e-10 && t < 10.0,
         fmt("4x1000 vectors, max |dp| vs bisection %.2e (< 1e-8), sparsemax vs exhaustive projection %.2e "
             "(< 1e-10), %.2fs (< 10s)",
             worst, worst_proj, t));
}

// ---- 2 -----------------------------------------------------------------------------------

void fy_gradient() {
  Rng rng(202);
  double worst = 0.0;
  const double alphas[] = {1.0, 1.25, 1.5, 1.75, 2.0};
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.index(15);
    const double a = alphas[trial % 5];
    const double tau = 0.1 + rng.uniform();
    const auto z = normal_vector(rng, n, 1.0);
    std::vector<double> p;
    if (trial % 2 == 0) {
      p = random_simplex(rng, n);
    } else {
      p.assign(n, 0.0);
      p[rng.index(n)] = 1.0;
    }
    const auto g = fy_loss_grad(z, p, Alpha(a), tau);
    const auto fd = oracle::finite_difference(
        [&](const std::vector<double>& x) { return fy_loss(x, p, Alpha(a), tau); }, z, 1e-6);
    worst = std::max(worst, oracle::relative_error(g, fd));
  }
  report(2, "Fenchel-Young gradient identity", worst < 1e-6,
         fmt("500 cases, float64, worst relative error %.2e (< 1e-6)", worst));
}

// ---- 3 -----------------------------------------------------------------------------------

void softmax_reduction() {
  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t b = 2 + rng.index(30);
    const std::size_t n_items = b + 10;
    const std::size_t d = 4 + rng.index(12);
    PositivePairBatch batch;
    for (std::size_t j = 0; j < b; ++j) {
      batch.pairs.push_back({static_cast<int>(j), static_cast<int>(j)});
      std::vector<int> pool;
      for (std::size_t i = 0; i < n_items; ++i)
        if (i != j) pool.push_back(static_cast<int>(i));
      auto h = rng.sample(pool, 1 + rng.index(6));
      std::sort(h.begin(), h.end());
      batch.histories.push_back(h);
    }
    Matrix<double> y(n_items, d);
    for (double& v : y.values()) v = rng.normal();
    y = l2_normalize_rowwise(y);
    std::vector<int> ids(n_items);
    for (std::size_t i = 0; i < n_items; ++i) ids[i] = static_cast<int>(i);
    const double tau = 0.05 + rng.uniform();
    const double loss = sem_loss(batch, ItemRows(ids), y, Alpha::softmax(), tau).loss;

    // independent sampled softmax: user = normalized history sum, logits = cos / tau
    double ref = 0.0;
    for (std::size_t j = 0; j < b; ++j) {
      std::vector<double> u(d, 0.0);
      for (int h : batch.histories[j])
        for (std::size_t k = 0; k < d; ++k) u[k] += y(static_cast<std::size_t>(h), k);
      double un = 0.0;
      for (double v : u) un += v * v;
      un = std::sqrt(un);
      std::vector<double> z(b);
      for (std::size_t c = 0; c < b; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += u[k] / un * y(c, k);
        z[c] = s / tau;
      }
      ref += oracle::softmax_cross_entropy(z, j);
    }
    ref /= static_cast<double>(b);
    worst = std::max(worst, std::abs(loss - ref));
  }
  report(3, "softmax reduction", worst < 1e-10,
         fmt("100 batches, max |SEM(alpha=1) - sampled softmax CE| %.2e (< 1e-10)", worst));
}

// ---- 4 -----------------------------------------------------------------------------------

struct GradCheck {
  double worst32 = 0.0;
  double worst64 = 0.0;
  std::string where32;
  std::size_t tensors = 0;
};

// Copies float parameters into the double model so both hold identical weights.
void mirror(const ParamStore<float>& from, ParamStore<double>& to) {
  for (auto& [name, p] : to) {
    const auto& src = from.at(name).value.values();
    for (std::size_t i = 0; i < src.size(); ++i) p.value.values()[i] = static_cast<double>(src[i]);
  }
}

// Compares per-tensor analytic gradients (float32 and float64 models with
// identical weights) to central differences of the float64 loss. Relative
// error is ||fd - an|| / max(||fd||, ||an||); tensors whose exact gradient
// vanishes (biases in front of batch norm) count by absolute error.
template <class L>
void check_store(const ParamStore<float>& f32, ParamStore<double>& f64, const std::string& label, L&& loss,
                 GradCheck& out) {
  const double h = 1e-6;
  for (auto& [name, p] : f64) {
    if (!p.trainable) continue;
    const auto& g32 = f32.at(name).grad.values();
    double n32 = 0.0, n64 = 0.0, nfd = 0.0, na32 = 0.0, na64 = 0.0;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double orig = p.value.values()[i];
      p.value.values()[i] = orig + h;
      const double up = loss();
      p.value.values()[i] = orig - h;
      const double down = loss();
      p.value.values()[i] = orig;
      const double fd = (up - down) / (2 * h);
      const double a32 = static_cast<double>(g32[i]);
      const double a64 = p.grad.values()[i];
      n32 += (fd - a32) * (fd - a32);
      n64 += (fd - a64) * (fd - a64);
      nfd += fd * fd;
      na32 += a32 * a32;
      na64 += a64 * a64;
    }
    auto rel = [](double num, double a, double b) {
      const double scale = std::sqrt(std::max(a, b));
      return scale > 1e-6 ? std::sqrt(num) / scale : std::sqrt(num);
    };
    const double r32 = rel(n32, nfd, na32);
    const double r64 = rel(n64, nfd, na64);
    ++out.tensors;
    out.worst64 = std::max(out.worst64, r64);
    if (r32 > out.worst32) {
      out.worst32 = r32;
      out.where32 = label + ":" + name;
    }
  }
}

Dataset gradcheck_dataset() {
  SyntheticConfig c;
  c.n_users = 6;
  c.n_items = 10;
  c.n_topics = 2;
  c.mode_dims = {5, 7};
  c.interactions_per_user = 4;
  c.seed = 41;
  return generate_synthetic(c);
}

template <class T>
struct Models {
  Encoder<T> enc;
  Encoder<T> teacher;
  ProjectionHead<T> head;
  explicit Models(const Dataset& ds)
      : enc({ds.mode_dims(), 8, 6, 3}), teacher({ds.mode_dims(), 8, 9, 5}), head({9, 7, 4, 6}) {}
  void zero_grad() {
    enc.params().zero_grad();
    head.params().zero_grad();
  }
};

// Runs every analytic gradient computation under test on one precision.
template <class T>
void sem_encoder_grad(Models<T>& m, const Dataset& ds, const PositivePairBatch& batch, Alpha alpha) {
  m.zero_grad();
  sem_encoder_step(m.enc, ds, batch, alpha, 0.5);
}

template <class T>
Matrix<T> teacher_out(const Models<T>& m, const Dataset& ds, const ItemRows& rows) {
  return m.teacher.forward_eval(gather_features<T>(ds, rows.items())).embeddings;
}

template <class T>
void sem_head_grad(Models<T>& m, const Dataset& ds, const PositivePairBatch& batch, Alpha alpha) {
  m.zero_grad();
  const ItemRows rows = ItemRows::of(batch);
  typename ProjectionHead<T>::Tape tape;
  const auto r = sem_loss(batch, rows, m.head.forward(teacher_out(m, ds, rows), &tape), alpha, 0.5);
  m.head.backward(tape, r.d_items);
}

template <class T>
void distill_head_grad(Models<T>& m, const Dataset& ds, const PositivePairBatch& batch, Alpha alpha) {
  m.zero_grad();
  const ItemRows rows = ItemRows::of(batch);
  const Matrix<T> t = teacher_out(m, ds, rows);
  typename ProjectionHead<T>::Tape tape;
  const auto r = distill_loss(m.head.forward(t, &tape), t, alpha, 0.7);
  m.head.backward(tape, r.d_student);
}

template <class T>
void distill_encoder_grad(Models<T>& m, const Dataset& ds, const PositivePairBatch& batch, Alpha alpha) {
  m.zero_grad();
  const ItemRows rows = ItemRows::of(batch);
  const Matrix<T> t = teacher_out(m, ds, rows);
  typename Encoder<T>::Tape tape;
  const auto y = m.enc.forward_train(gather_features<T>(ds, rows.items()), tape).embeddings;
  const auto r = distill_loss(y, t, alpha, 0.7);
  m.enc.backward(tape, r.d_student);
}

GradCheck full_model_check() {
  const Dataset ds = gradcheck_dataset();
  Rng rng(404);
  const auto batch = make_batches(ds.interactions, 4, 50, rng)[0];
  const ItemRows rows = ItemRows::of(batch);
  Models<float> m32(ds);
  Models<double> m64(ds);
  mirror(m32.enc.params(), m64.enc.params());
  mirror(m32.teacher.params(), m64.teacher.params());
  mirror(m32.head.params(), m64.head.params());
  GradCheck out;
  for (double a : {1.0, 1.5, 2.0}) {
    const Alpha alpha(a);
    const std::string tag = "alpha=" + alpha_name(alpha);
    const Matrix<double> t64 = teacher_out(m64, ds, rows);

    sem_encoder_grad(m32, ds, batch, alpha);
    sem_encoder_grad(m64, ds, batch, alpha);
    check_store(m32.enc.params(), m64.enc.params(), tag + " sem encoder", [&] {
      typename Encoder<double>::Tape tape;
      const auto y = m64.enc.forward_train(gather_features<double>(ds, rows.items()), tape).embeddings;
      return sem_loss(batch, rows, y, alpha, 0.5).loss;
    }, out);

    sem_head_grad(m32, ds, batch, alpha);
    sem_head_grad(m64, ds, batch, alpha);
    check_store(m32.head.params(), m64.head.params(), tag + " sem head",
                [&] { return sem_loss(batch, rows, m64.head.forward(t64), alpha, 0.5).loss; }, out);

    distill_head_grad(m32, ds, batch, alpha);
    distill_head_grad(m64, ds, batch, alpha);
    check_store(m32.head.params(), m64.head.params(), tag + " distill head",
                [&] { return distill_loss(m64.head.forward(t64), t64, alpha, 0.7).loss; }, out);

    distill_encoder_grad(m32, ds, batch, alpha);
    distill_encoder_grad(m64, ds, batch, alpha);
    check_store(m32.enc.params(), m64.enc.params(), tag + " distill encoder", [&] {
      typename Encoder<double>::Tape tape;
      const auto y = m64.enc.forward_train(gather_features<double>(ds, rows.items()), tape).embeddings;
      return distill_loss(y, t64, alpha, 0.7).loss;
    }, out);
  }
  return out;
}

void full_model_gradients() {
  const GradCheck g = full_model_check();
  report(4, "full-model gradient check", g.worst32 < 1e-3,
         fmt("4-pair batch, %zu parameter tensors (sem/distill x encoder/head x 3 alphas), float32 analytic vs "
             "central differences: worst rel err %.2e at %s (< 1e-3); float64 analytic worst %.2e",
             g.tensors, g.worst32, g.where32.c_str(), g.worst64));
}

// ---- 5, 6, 7 -----------------------------------------------------------------------------

struct Synthetic {
  Dataset ds;
  ColdSplit split;
};

Synthetic synthetic_setup() {
  SyntheticConfig c;  // 500 users, 400 items, 8 topics, modes {32, 48}, 20 per user
  c.seed = 0;
  Synthetic s{generate_synthetic(c), {}};
  SplitOptions o;
  o.seed = 0;
  s.split = make_cold_split(s.ds, o);
  return s;
}

TrainConfig synthetic_config(Alpha alpha, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.alpha = alpha;
  cfg.batch_size = 256;
  cfg.epochs = 15;
  cfg.seed = seed;
  return cfg;
}

double mean_nonzero(const std::vector<EpochLog>& log) {
  double s = 0.0;
  for (const auto& e : log) s += e.nonzero_fraction;
  return s / static_cast<double>(log.size());
}

void synthetic_runs(const Synthetic& s) {
  const RandomBaseline base = random_baseline(s.ds, s.split, 20, ColdPool::test);
  auto t0 = std::chrono::steady_clock::now();
  const FitResult sparse = fit(s.ds, s.split, synthetic_config(Alpha::sparsemax(), 0));
  const double t_sparse = seconds(t0);
  const FitResult soft = fit(s.ds, s.split, synthetic_config(Alpha::softmax(), 0));
  const FitResult ent = fit(s.ds, s.split, synthetic_config(Alpha::entmax15(), 0));
  const double n_sparse = evaluate(sparse.model, s.ds, s.split, 20, ColdPool::test).ndcg;
  const double n_soft = evaluate(soft.model, s.ds, s.split, 20, ColdPool::test).ndcg;
  const double n_ent = evaluate(ent.model, s.ds, s.split, 20, ColdPool::test).ndcg;
  report(5, "synthetic end-to-end", n_sparse >= 3.0 * base.ndcg && n_sparse >= 0.9 * n_soft && t_sparse < 300.0,
         fmt("cold test NDCG@20 sparsemax %.4f vs random %.4f (ratio %.2f >= 3), vs softmax %.4f (ratio %.3f >= "
             "0.9); entmax15 %.4f; sparsemax run %.1fs (< 300s)",
             n_sparse, base.ndcg, n_sparse / base.ndcg, n_soft, n_sparse / n_soft, n_ent, t_sparse));

  const double z_sparse = mean_nonzero(sparse.log);
  const double z_ent = mean_nonzero(ent.log);
  const double z_soft = mean_nonzero(soft.log);
  report(6, "sparsity ordering", z_sparse < z_ent && z_ent < z_soft && z_soft == 1.0,
         fmt("epoch-averaged nonzero fraction sparsemax %.4f < entmax15 %.4f < softmax %.17g (== 1)", z_sparse,
             z_ent, z_soft));
}

void distillation_sanity(const Synthetic& s) {
  double student = 0.0;
  double base = 0.0;
  std::string per_seed;
  for (std::uint64_t seed : {0, 1, 2}) {
    TrainConfig b = synthetic_config(Alpha::sparsemax(), seed);
    b.output_dim = 32;
    const double nb = fit(s.ds, s.split, b).best_val_ndcg;
    TrainConfig o = b;
    o.variant = Variant::offline;
    o.distill.teacher_output = 384;
    const double no = fit(s.ds, s.split, o).best_val_ndcg;
    base += nb / 3.0;
    student += no / 3.0;
    per_seed += fmt(" [seed %llu: student %.4f base %.4f]", static_cast<unsigned long long>(seed), no, nb);
  }
  const double rel = (student - base) / base;
  const Status st = student >= base ? Status::pass : rel >= -0.05 ? Status::pass : Status::flag;
  report(7, "offline distillation sanity (soft)", st,
         fmt("cold val NDCG@20 mean over 3 seeds: student d=32 from d_T=384 %.4f vs base d=32 %.4f (%+.1f%%; "
             "flag below -5%%)%s",
             student, base, 100.0 * rel, per_seed.c_str()));
}

// ---- 8 -----------------------------------------------------------------------------------

void step_overhead() {
  SyntheticConfig c;
  c.n_users = 600;
  c.n_items = 1500;
  c.seed = 8;
  const Dataset ds = generate_synthetic(c);
  Rng rng(808);
  const auto batches = make_batches(ds.interactions, 2048, 50, rng);
  const auto& batch = batches.front();
  auto time_alpha = [&](double a) {
    Encoder<float> enc({ds.mode_dims(), 192, 64, 0});
    std::vector<double> times;
    for (int rep = 0; rep < 7; ++rep) {
      enc.params().zero_grad();
      const auto t0 = std::chrono::steady_clock::now();
      sem_encoder_step(enc, ds, batch, Alpha(a), 0.2);
      times.push_back(seconds(t0));
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
  };
  const double t1 = time_alpha(1.0);
  const double t15 = time_alpha(1.5);
  const double t2 = time_alpha(2.0);
  report(8, "step-time overhead", t15 <= 1.5 * t1 && t2 <= 1.5 * t1,
         fmt("batch %zu, median step softmax %.1fms, entmax15 %.1fms (x%.2f), sparsemax %.1fms (x%.2f); bound x1.5",
             batch.size(), 1e3 * t1, 1e3 * t15, t15 / t1, 1e3 * t2, t2 / t1));
}

// ---- 9 -----------------------------------------------------------------------------------

void metric_suite() {
  std::vector<std::string> bad;
  auto check = [&](bool ok, const char* what) {
    if (!ok) bad.push_back(what);
  };
  {
    const std::vector<RankedList> ranked{{0, 1, 2, 3}};
    const std::vector<RelevanceSet> rel{{2}};
    check(ndcg_at_k(ranked, rel, 20) == 0.5, "ndcg rank-3 = 0.5");
    check(recall_at_k(ranked, rel, 20) == 1.0, "recall rank-3 = 1");
  }
  {
    const std::vector<RankedList> ranked{{4, 1, 2}};
    const std::vector<RelevanceSet> rel{{4}};
    check(ndcg_at_k(ranked, rel, 20) == 1.0, "ndcg rank-1 = 1");
  }
  {
    const std::vector<RankedList> ranked{{0, 1, 2, 3}};
    const std::vector<RelevanceSet> rel{{3}};
    check(ndcg_at_k(ranked, rel, 3) == 0.0 && recall_at_k(ranked, rel, 3) == 0.0, "outside top-k = 0");
  }
  check(gini_diversity(std::vector<std::size_t>{5, 5, 5, 5}) == 1.0, "gini uniform = 1");
  for (std::size_t n : {2u, 5u, 10u, 64u}) {
    std::vector<std::size_t> counts(n, 0);
    counts[0] = 9;
    check(std::abs(gini_diversity(counts) - 1.0 / static_cast<double>(n)) < 1e-15, "gini point mass = 1/n");
  }
  {
    const std::vector<RankedList> ranked{{0, 3, 1}, {1, 0, 4}, {0, 5, 6}};
    const std::vector<RelevanceSet> rel{{0, 1}, {1, 2}, {0}};
    const auto r = mdg_at_k(ranked, rel, std::vector<int>{0, 1, 2}, 3);
    check(r.per_item[0] == 1.0, "mdg always-first item = 1");
    check(r.per_item[1] == 0.75, "mdg ranks 1 and 3 = 0.75");
    check(r.per_item[2] == 0.0, "mdg never-shown item = 0");
  }
  {
    bool threw = false;
    try {
      ndcg_at_k(std::vector<RankedList>{{0}}, std::vector<RelevanceSet>{{0}}, 0);
    } catch (const std::invalid_argument&) {
      threw = true;
    }
    check(threw, "k = 0 rejected");
  }
  std::string detail = "ndcg 0.5 rank-3 case, rank-1, cutoff, gini uniform / point mass, mdg hand cases, k=0";
  for (const auto& b : bad) detail += "; failed: " + b;
  report(9, "metric unit suite", bad.empty(), detail);
}

// ---- 10 ----------------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "semco_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string cli = SEMCO_CLI_PATH;
  auto sh = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " 2>/dev/null >/dev/null";
    return std::system(cmd.c_str());
  };
  bool ok = sh("synth --users 150 --items 120 --topics 4 --modes 16,24 --seed 4 --out " + (root / "data").string()) == 0;
  const nlohmann::json cfg = {{"dataset", (root / "data" / "manifest.json").string()},
                              {"train",
                               {{"variant", "base"},
                                {"alpha", "entmax15"},
                                {"batch_size", 64},
                                {"epochs", 4},
                                {"hidden_dim", 32},
                                {"output_dim", 16}}},
                              {"seeds", {7}}};
  std::ofstream(root / "config.json") << cfg.dump(2);
  ok = ok && sh("train --config " + (root / "config.json").string() + " --out " + (root / "a").string()) == 0;
  ok = ok && sh("train --config " + (root / "config.json").string() + " --out " + (root / "b").string()) == 0;
  const std::string a = slurp(root / "a" / "epochs.jsonl");
  const std::string b = slurp(root / "b" / "epochs.jsonl");
  const bool same = ok && !a.empty() && a == b;
  report(10, "CLI train determinism", same,
         fmt("two separate `semco train` processes, same config + seed: epochs.jsonl %zu and %zu bytes, %s", a.size(),
             b.size(), same ? "byte-identical" : "DIFFERENT"));
  fs::remove_all(root);
}

}  // namespace

// Optional arguments pick criteria by number; none runs everything.
int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  if (want(1)) oracle_equivalence();
  if (want(2)) fy_gradient();
  if (want(3)) softmax_reduction();
  if (want(4)) full_model_gradients();
  if (want(5) || want(6) || want(7)) {
    const Synthetic s = synthetic_setup();
    if (want(5) || want(6)) synthetic_runs(s);
    if (want(7)) distillation_sanity(s);
  }
  if (want(8)) step_overhead();
  if (want(9)) metric_suite();
  if (want(10)) cli_determinism();
  std::sort(g_lines.begin(), g_lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
  int failed = 0, flagged = 0;
  for (const auto& l : g_lines) {
    failed += l.status == Status::fail;
    flagged += l.status == Status::flag;
  }
  std::printf("acceptance: %zu criteria, %d failed, %d flagged (soft), %.1fs\n", g_lines.size(), failed, flagged,
              seconds(t0));
  return failed == 0 ? 0 : 1;
}
