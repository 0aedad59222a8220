// Copyright 2026 The OVC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ovc/scoring.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ovc/error.hpp"
#include "ovc/fusion.hpp"
#include "test_util.hpp"

namespace ovc {
namespace {

using testing::RandomUnit;
using testing::RandomVector;

TEST(SigmoidTest, ReferenceValues) {
  EXPECT_NEAR(Sigmoid(-2.0), 0.119203, 1e-6);
  EXPECT_NEAR(Sigmoid(-2.0), 1.0 / (1.0 + std::exp(2.0)), 1e-15);
  EXPECT_DOUBLE_EQ(Sigmoid(0.0), 0.5);
  EXPECT_NEAR(Sigmoid(48.0), 1.0, 1e-15);
  EXPECT_GT(Sigmoid(-800.0), -1e-300);
  EXPECT_TRUE(std::isfinite(Sigmoid(-800.0)));
  EXPECT_DOUBLE_EQ(Sigmoid(800.0), 1.0);
}

TEST(ScoringHeadTest, DefaultsAndValidation) {
  ScoringHead head;
  EXPECT_DOUBLE_EQ(head.logit_scale, 50.0);
  EXPECT_DOUBLE_EQ(head.bias, -2.0);
  head.logit_scale = 0.0;
  EXPECT_THROW(head.Validate(), ConfigError);
  head.logit_scale = 1.0;
  head.bias = INFINITY;
  EXPECT_THROW(head.Validate(), ConfigError);
}

ClassifierBank RandomBank(Rng& rng, std::size_t classes, std::size_t dim) {
  ClassifierBank bank(static_cast<std::uint32_t>(dim));
  for (std::size_t c = 0; c < classes; ++c) {
    char id[32];
    std::snprintf(id, sizeof(id), "k%02zu", c);
    bank.Set(id, ClassifierEntry{RandomVector(rng, dim, rng.Uniform(0.5, 2.0)), Modality::kText, ""});
  }
  return bank;
}

TEST(ScoreQueriesTest, OrthogonalAndAlignedScores) {
  ClassifierBank bank(2);
  bank.Set("a", ClassifierEntry{{2, 0}});
  bank.Set("b", ClassifierEntry{{0, 5}});
  const std::vector<Embedding> q = {{3, 0}};
  const ScoreMatrix s = ScoreQueries(q, bank, ScoringHead{});
  EXPECT_NEAR(s.Logit(0, 0), 48.0, 1e-12);
  EXPECT_NEAR(s.Logit(0, 1), -2.0, 1e-12);
  EXPECT_NEAR(s.Score(0, 1), 0.119203, 1e-6);
  EXPECT_EQ(s.class_ids, (std::vector<std::string>{"a", "b"}));
}

TEST(ScoreQueriesTest, MatchesCosineOracleAndPreservesArgmax) {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 2 + rng.Below(16);
    const std::size_t classes = 2 + rng.Below(10);
    const ClassifierBank bank = RandomBank(rng, classes, dim);
    const std::vector<Embedding> q = {RandomVector(rng, dim, rng.Uniform(0.1, 3.0))};
    const ScoreMatrix s = ScoreQueries(q, bank, ScoringHead{});
    std::size_t best_cos = 0, best_score = 0;
    double top_cos = -2.0, top_score = -INFINITY;
    std::size_t c = 0;
    for (const auto& [id, entry] : bank.entries()) {
      long double dot = 0, nq = 0, nw = 0;
      for (std::size_t i = 0; i < dim; ++i) {
        dot += static_cast<long double>(q[0][i]) * entry.vector[i];
        nq += static_cast<long double>(q[0][i]) * q[0][i];
        nw += static_cast<long double>(entry.vector[i]) * entry.vector[i];
      }
      const double cosine = static_cast<double>(dot / std::sqrt(nq * nw));
      EXPECT_NEAR(s.Logit(0, c), 50.0 * cosine - 2.0, 1e-4);
      if (cosine > top_cos) top_cos = cosine, best_cos = c;
      if (s.Logit(0, c) > top_score) top_score = s.Logit(0, c), best_score = c;
      ++c;
    }
    EXPECT_EQ(best_cos, best_score);
  }
}

TEST(ScoreQueriesTest, ProjectionIsApplied) {
  ClassifierBank bank(2);
  bank.Set("a", ClassifierEntry{{1, 0}});
  bank.Set("b", ClassifierEntry{{0, 1}});
  ScoringHead head;
  head.projection = Tensor<float>({3, 2}, {0, 1, 1, 0, 0, 0});
  const std::vector<Embedding> q = {{1, 0, 7}};
  const ScoreMatrix s = ScoreQueries(q, bank, head);
  EXPECT_NEAR(s.Logit(0, 1), 48.0, 1e-12);
  EXPECT_NEAR(s.Logit(0, 0), -2.0, 1e-12);
  const std::vector<Embedding> null_query = {{0, 0, 7}};
  EXPECT_THROW(ScoreQueries(null_query, bank, head), ValidationError);
  const std::vector<Embedding> wrong = {{1, 0}};
  EXPECT_THROW(ScoreQueries(wrong, bank, head), ValidationError);
}

TEST(ScoreQueriesTest, Errors) {
  ClassifierBank empty(2);
  const std::vector<Embedding> q = {{1, 0}};
  EXPECT_THROW(ScoreQueries(q, empty, ScoringHead{}), ParameterError);
  ClassifierBank zero(2);
  zero.Set("z", ClassifierEntry{{0, 0}});
  EXPECT_THROW(ScoreQueries(q, zero, ScoringHead{}), ValidationError);
}

TEST(EvaluateRetrievalTest, IdentityBankGivesPerfectTop1) {
  Rng rng(12);
  ClassifierBank bank(16);
  std::vector<Embedding> queries;
  std::vector<std::string> labels;
  for (int c = 0; c < 20; ++c) {
    const Embedding v = RandomUnit(rng, 16);
    const std::string id = "c" + std::to_string(c);
    bank.Set(id, ClassifierEntry{v});
    queries.push_back(v);
    labels.push_back(id);
  }
  const RetrievalResult r = EvaluateRetrieval(ScoreQueries(queries, bank, ScoringHead{}), labels);
  EXPECT_DOUBLE_EQ(r.top1, 1.0);
  EXPECT_DOUBLE_EQ(r.top5, 1.0);
  EXPECT_EQ(r.queries, 20u);
}

TEST(EvaluateRetrievalTest, TiesBreakByClassId) {
  ClassifierBank bank(2);
  bank.Set("a", ClassifierEntry{{1, 0}});
  bank.Set("b", ClassifierEntry{{1, 0}});
  const std::vector<Embedding> q = {{1, 0}, {1, 0}};
  const std::vector<std::string> labels = {"a", "b"};
  const RetrievalResult r = EvaluateRetrieval(ScoreQueries(q, bank, ScoringHead{}), labels);
  EXPECT_DOUBLE_EQ(r.top1, 0.5);
  EXPECT_DOUBLE_EQ(r.top5, 1.0);
}

TEST(EvaluateRetrievalTest, TopFiveCountsRank) {
  ClassifierBank bank(2);
  const double angles[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  for (int i = 0; i < 7; ++i) {
    bank.Set("c" + std::to_string(i),
             ClassifierEntry{{static_cast<float>(std::cos(angles[i])),
                              static_cast<float>(std::sin(angles[i]))}});
  }
  const std::vector<Embedding> q = {{1, 0}, {1, 0}, {1, 0}};
  const std::vector<std::string> labels = {"c0", "c4", "c5"};
  const RetrievalResult r = EvaluateRetrieval(ScoreQueries(q, bank, ScoringHead{}), labels);
  EXPECT_DOUBLE_EQ(r.top1, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.top5, 2.0 / 3.0);
  const std::vector<std::string> unknown = {"x", "c0", "c0"};
  EXPECT_THROW(EvaluateRetrieval(ScoreQueries(q, bank, ScoringHead{}), unknown), ValidationError);
  const std::vector<std::string> short_labels = {"c0"};
  EXPECT_THROW(EvaluateRetrieval(ScoreQueries(q, bank, ScoringHead{}), short_labels),
               ValidationError);
}

TEST(ScoreRegionsTest, OneDetectionPerRegionAndClass) {
  const auto regions = ParseRegions(
      R"({"region": "r1", "image": "img1", "box": [0, 0, 10, 10]})"
      "\n"
      R"({"region": "r2", "image": "img2", "box": [5, 5, 2, 3]})"
      "\n");
  ASSERT_EQ(regions.size(), 2u);
  EXPECT_EQ(regions[1].image, "img2");
  EXPECT_DOUBLE_EQ(regions[1].box.h, 3.0);
  EmbeddingBank features(2);
  features.Add("r1", Embedding{1, 0});
  features.Add("r2", Embedding{0, 1});
  ClassifierBank bank(2);
  bank.Set("a", ClassifierEntry{{1, 0}});
  bank.Set("b", ClassifierEntry{{0, 1}});
  const auto dets = ScoreRegions(regions, features, bank, ScoringHead{});
  ASSERT_EQ(dets.size(), 4u);
  EXPECT_EQ(dets[0].class_id, "a");
  EXPECT_DOUBLE_EQ(dets[0].score, Sigmoid(48.0));
  EXPECT_DOUBLE_EQ(dets[1].score, Sigmoid(-2.0));
  EXPECT_EQ(dets[3].image, "img2");
  EXPECT_DOUBLE_EQ(dets[3].score, Sigmoid(48.0));

  EmbeddingBank missing(2);
  missing.Add("r1", Embedding{1, 0});
  EXPECT_THROW(ScoreRegions(regions, missing, bank, ScoringHead{}), ValidationError);
}

}  // namespace
}  // namespace ovc
