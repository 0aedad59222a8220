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

#ifndef OVC_BENCHMARK_HPP_
#define OVC_BENCHMARK_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ovc/aggregator.hpp"
#include "ovc/embedding_bank.hpp"
#include "ovc/fusion.hpp"
#include "ovc/scoring.hpp"
#include "ovc/synthetic.hpp"
#include "ovc/text_classifier.hpp"
#include "ovc/trainer.hpp"

namespace ovc {

// One text classifier per class with at least one encoded description.
ClassifierBank BuildTextClassifierBank(const std::map<std::string, DescriptionSet>& sets);

// One visual classifier per class from its first `k` records (all records
// when k is 0). kVisionAgg needs a model; kVisionMean ignores it.
ClassifierBank BuildVisualClassifiers(const EmbeddingBank& bank, Modality modality,
                                      std::size_t k, const AggregatorModel* model = nullptr);

// Multimodal entry for every class; both banks must cover the same classes.
ClassifierBank FuseClassifierBanks(const ClassifierBank& text, const ClassifierBank& visual);

struct QuerySet {
  std::vector<Embedding> features;
  std::vector<std::string> labels;
};

// Every record of the bank becomes a query labelled with its class. With a
// model, each query is mapped through the aggregator as a one-element set so
// that it lives in the same space as aggregated classifiers.
QuerySet EmbedQueries(const EmbeddingBank& queries, const AggregatorModel* model = nullptr);

struct RetrievalBenchmarkConfig {
  ClusterSpec clusters;
  std::size_t queries_per_class = 10;
  // Exemplars per class used to build classifiers; 0 means max_k.
  std::size_t classifier_k = 0;
  TrainConfig train;
  ScoringHead head;
};

// 50 classes, dim 32, 20 members, sigma 0.05; a small aggregator and a
// training schedule that fits the 50-class bank.
RetrievalBenchmarkConfig DefaultRetrievalBenchmark(std::uint64_t seed = 0);

struct RetrievalComparison {
  std::size_t k = 0;
  RetrievalResult aggregator;
  RetrievalResult mean;
  TrainReport report;
  double train_seconds = 0.0;
};

RetrievalComparison CompareRetrieval(const EmbeddingBank& train, const EmbeddingBank& queries,
                                     const TrainConfig& train_config, std::size_t classifier_k,
                                     const ScoringHead& head);

RetrievalComparison RunRetrievalBenchmark(const RetrievalBenchmarkConfig& config);

// Trains and evaluates once per K with max_k = K and K exemplars per class.
std::vector<RetrievalComparison> SweepK(const EmbeddingBank& train, const EmbeddingBank& queries,
                                        const TrainConfig& base, std::span<const std::size_t> ks,
                                        const ScoringHead& head);

// "k,aggregator_top1,aggregator_top5,mean_top1,mean_top5,final_loss"
std::string SweepToCsv(std::span<const RetrievalComparison> rows);

}  // namespace ovc

#endif  // OVC_BENCHMARK_HPP_
