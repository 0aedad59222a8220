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

#include "ovc/benchmark.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "ovc/error.hpp"
#include "ovc/text_classifier.hpp"

namespace ovc {
namespace {

TEST(BuildTextClassifierBankTest, OneEntryPerDescribedClass) {
  std::map<std::string, DescriptionSet> sets;
  sets["a"] = DescriptionSet{"a", {{"x", Embedding{3, 0}}, {"y", Embedding{0, 4}}}, 10};
  sets["b"] = DescriptionSet{"b", {{"z", std::nullopt}}, 10};
  sets["c"] = DescriptionSet{"c", {{"w", Embedding{0, 2}}}, 10};
  const ClassifierBank bank = BuildTextClassifierBank(sets);
  EXPECT_EQ(bank.ClassIds(), (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(bank.at("a").provenance, "descriptions:2");
  EXPECT_EQ(bank.at("a").modality, Modality::kText);
  EXPECT_EQ(bank.at("a").vector, (Embedding{1.5f, 2.0f}));

  std::map<std::string, DescriptionSet> none;
  none["b"] = sets["b"];
  EXPECT_THROW(BuildTextClassifierBank(none), DataError);
}

TEST(EmbedQueriesTest, LabelsFollowClasses) {
  EmbeddingBank q(2);
  q.Add("a", Embedding{1, 0});
  q.Add("a", Embedding{0, 1});
  q.Add("b", Embedding{1, 0});
  const QuerySet raw = EmbedQueries(q);
  EXPECT_EQ(raw.labels, (std::vector<std::string>{"a", "a", "b"}));
  EXPECT_EQ(raw.features[1], (Embedding{0, 1}));
  const AggregatorModel model = AggregatorModel::Init(AggregatorConfig{1, 2, 4, 1, 3});
  const QuerySet mapped = EmbedQueries(q, &model);
  const Embedding one[] = {Embedding{0, 1}};
  EXPECT_EQ(mapped.features[1], model.Aggregate(one));
}

TEST(DefaultRetrievalBenchmarkTest, Preset) {
  const RetrievalBenchmarkConfig c = DefaultRetrievalBenchmark(4);
  EXPECT_EQ(c.clusters.classes, 50u);
  EXPECT_EQ(c.clusters.dim, 32u);
  EXPECT_EQ(c.clusters.per_class, 20u);
  EXPECT_DOUBLE_EQ(c.clusters.sigma, 0.05);
  EXPECT_EQ(c.clusters.seed, 4u);
  EXPECT_EQ(c.train.model.dim, 32u);
  EXPECT_NO_THROW(c.train.Validate());
}

TEST(CompareRetrievalTest, SmallRunIsDeterministic) {
  RetrievalBenchmarkConfig c = DefaultRetrievalBenchmark(1);
  c.clusters.classes = 10;
  c.clusters.per_class = 6;
  c.queries_per_class = 3;
  c.train.batch_size = 8;
  c.train.slots_per_iteration = 8;
  c.train.queue_capacity = 16;
  c.train.epochs = 2;
  c.train.steps_per_epoch = 2;
  const RetrievalComparison a = RunRetrievalBenchmark(c);
  const RetrievalComparison b = RunRetrievalBenchmark(c);
  EXPECT_EQ(a.k, 5u);
  EXPECT_EQ(a.aggregator.queries, 30u);
  EXPECT_EQ(a.aggregator.top1, b.aggregator.top1);
  EXPECT_EQ(a.mean.top1, b.mean.top1);
  EXPECT_EQ(a.report.epoch_losses, b.report.epoch_losses);
  EXPECT_GE(a.mean.top1, 0.9);

  const std::vector<RetrievalComparison> rows = {a, b};
  const std::string csv = SweepToCsv(rows);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "k,aggregator_top1,aggregator_top5,mean_top1,mean_top5,final_loss");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

}  // namespace
}  // namespace ovc
