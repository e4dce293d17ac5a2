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

#include <gtest/gtest.h>

#include <filesystem>
#include <vector>

#include "semco/model.hpp"
#include "semco/random.hpp"

namespace semco {
namespace {

Matrix<float> unit_rows(Rng& rng, std::size_t n, std::size_t d) {
  Matrix<float> m(n, d);
  for (float& v : m.values()) v = static_cast<float>(rng.normal());
  return l2_normalize_rowwise(m);
}

TEST(UserEmbeddingTest, SingleInteractionCopiesItem) {
  Rng rng(1);
  const auto y = unit_rows(rng, 4, 3);
  const std::vector<Interaction> pairs{{0, 2}, {1, 0}, {1, 3}};
  const auto r = InteractionMatrix::from_pairs(3, 4, pairs);
  const auto u = build_user_embeddings(r, y);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(u.embeddings(0, j), y(2, j));
  EXPECT_FALSE(u.empty[0]);
  EXPECT_NEAR(norm<float>(u.embeddings.row(1)), 1.0f, 1e-6f);
  EXPECT_TRUE(u.empty[2]);
  for (float v : u.embeddings.row(2)) EXPECT_EQ(v, 0.0f);
  EXPECT_THROW(build_user_embeddings(r, unit_rows(rng, 5, 3)), std::invalid_argument);
}

TEST(UserEmbeddingTest, AssociativityBeforeNormalization) {
  Rng rng(2);
  const auto y = unit_rows(rng, 6, 4);
  std::vector<Interaction> pairs;
  Matrix<float> dense(5, 6);
  for (int u = 0; u < 5; ++u)
    for (int i = 0; i < 6; ++i)
      if (rng.uniform() < 0.5) {
        pairs.push_back({u, i});
        dense(static_cast<std::size_t>(u), static_cast<std::size_t>(i)) = 1.0f;
      }
  const auto r = InteractionMatrix::from_pairs(5, 6, pairs);
  Matrix<float> ry(5, 4);
  for (std::size_t u = 0; u < 5; ++u)
    for (int i : r.items_of(u))
      for (std::size_t k = 0; k < 4; ++k) ry(u, k) += y(static_cast<std::size_t>(i), k);
  const auto lhs = matmul_nt(ry, y);
  const auto rhs = matmul(dense, matmul_nt(y, y));
  for (std::size_t k = 0; k < lhs.size(); ++k) EXPECT_NEAR(lhs.values()[k], rhs.values()[k], 1e-5);
}

TEST(ScoreTest, IdenticalAndOrthogonal) {
  const Matrix<float> u{{1.0f, 0.0f}};
  const Matrix<float> y{{1.0f, 0.0f}, {0.0f, 1.0f}};
  const auto s = score_items(u, y);
  EXPECT_EQ(s(0, 0), 1.0f);
  EXPECT_EQ(s(0, 1), 0.0f);
  EXPECT_THROW(score_items(u, Matrix<float>(2, 3)), std::invalid_argument);
}

TEST(ScoreTest, Bounded) {
  Rng rng(3);
  const auto s = score_items(unit_rows(rng, 20, 8), unit_rows(rng, 30, 8));
  for (float v : s.values()) {
    EXPECT_LE(v, 1.0f + 1e-6f);
    EXPECT_GE(v, -1.0f - 1e-6f);
  }
}

std::vector<int> items_of(const std::vector<ScoredItem>& xs) {
  std::vector<int> out;
  for (const auto& x : xs) out.push_back(x.item);
  return out;
}

TEST(TopKTest, Examples) {
  const std::vector<double> s{0.1, 0.9, 0.5};
  EXPECT_EQ(items_of(top_k<double>(s, 2)), (std::vector<int>{1, 2}));
  EXPECT_EQ(items_of(top_k<double>(std::vector<double>{0.5, 0.5}, 1)), (std::vector<int>{0}));
  EXPECT_EQ(items_of(top_k<double>(s, 1, {1})), (std::vector<int>{2}));
  EXPECT_EQ(items_of(top_k<double>(s, 10)), (std::vector<int>{1, 2, 0}));
  EXPECT_THROW(top_k<double>(s, 0), std::invalid_argument);
}

TEST(TopKTest, TiesBreakByIndex) {
  const std::vector<float> s{0.3f, 0.7f, 0.3f, 0.7f, 0.3f};
  EXPECT_EQ(items_of(top_k<float>(s, 5)), (std::vector<int>{1, 3, 0, 2, 4}));
}

Dataset tiny_dataset() {
  Dataset ds;
  ds.name = "tiny";
  ds.mode_names = {"a", "b"};
  Rng rng(4);
  ds.features = {unit_rows(rng, 6, 3), unit_rows(rng, 6, 5)};
  for (int i = 0; i < 6; ++i) ds.item_ids.push_back("i" + std::to_string(i));
  ds.user_ids = {"u0", "u1"};
  const std::vector<Interaction> pairs{{0, 1}, {1, 2}};
  ds.interactions = InteractionMatrix::from_pairs(2, 6, pairs);
  return ds;
}

TEST(ModelTest, CheckpointRoundTripBase) {
  const Dataset ds = tiny_dataset();
  ColdStartModel<float> m(Encoder<float>({{3, 5}, 8, 4, 1}));
  const auto path = (std::filesystem::temp_directory_path() / "semco_model_base.ckpt").string();
  m.save(path);
  const auto back = ColdStartModel<float>::load(path);
  EXPECT_FALSE(back.distilled());
  EXPECT_EQ(back.embed_all(ds), m.embed_all(ds));
  std::filesystem::remove(path);
}

TEST(ModelTest, CheckpointRoundTripDistilled) {
  const Dataset ds = tiny_dataset();
  ColdStartModel<float> m(Encoder<float>({{3, 5}, 8, 12, 1}), ProjectionHead<float>({12, 6, 4, 2}));
  const auto path = (std::filesystem::temp_directory_path() / "semco_model_distilled.ckpt").string();
  m.save(path);
  const auto back = ColdStartModel<float>::load(path);
  EXPECT_TRUE(back.distilled());
  EXPECT_EQ(back.output_dim(), 4u);
  const auto y = back.embed_all(ds);
  EXPECT_EQ(y.cols(), 4u);
  EXPECT_EQ(y, m.embed_all(ds));
  std::filesystem::remove(path);
}

TEST(ModelTest, EmbedSubsetMatchesFullRows) {
  const Dataset ds = tiny_dataset();
  ColdStartModel<float> m(Encoder<float>({{3, 5}, 8, 4, 1}));
  const auto all = m.embed_all(ds);
  const std::vector<int> idx{4, 1};
  const auto sub = m.embed_items(ds, idx);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(sub(0, j), all(4, j));
    EXPECT_EQ(sub(1, j), all(1, j));
  }
}

}  // namespace
}  // namespace semco
