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

#include <chrono>
#include <cstdio>

#include "ovc/error.hpp"

namespace ovc {

ClassifierBank BuildTextClassifierBank(const std::map<std::string, DescriptionSet>& sets) {
  std::optional<ClassifierBank> bank;
  for (const auto& [id, set] : sets) {
    const std::vector<Embedding> embeddings = set.Embeddings();
    if (embeddings.empty()) continue;
    if (!bank) bank.emplace(static_cast<std::uint32_t>(embeddings.front().size()));
    bank->Set(id, ClassifierEntry{BuildTextClassifier(embeddings), Modality::kText,
                                  "descriptions:" + std::to_string(embeddings.size())});
  }
  if (!bank) throw DataError("build_text: no class has an encoded description");
  return *std::move(bank);
}

ClassifierBank BuildVisualClassifiers(const EmbeddingBank& bank, Modality modality,
                                      std::size_t k, const AggregatorModel* model) {
  if (modality != Modality::kVisionAgg && modality != Modality::kVisionMean) {
    throw ConfigError("build_visual: modality must be vision-agg or vision-mean");
  }
  if (modality == Modality::kVisionAgg) {
    if (model == nullptr) throw ConfigError("build_visual: vision-agg needs a model");
    if (model->config().dim != bank.dimension()) {
      throw ConfigError("build_visual: bank dimension " + std::to_string(bank.dimension()) +
                        " does not match model dimension " +
                        std::to_string(model->config().dim));
    }
  }
  ClassifierBank out(bank.dimension());
  for (const auto& [id, records] : bank.classes()) {
    if (records.empty()) continue;
    const std::size_t n = k == 0 ? records.size() : std::min(k, records.size());
    std::vector<Embedding> exemplars;
    exemplars.reserve(n);
    for (std::size_t i = 0; i < n; ++i) exemplars.push_back(records[i].values);
    Embedding v = modality == Modality::kVisionAgg ? model->Aggregate(exemplars)
                                                  : MeanBaseline(exemplars);
    out.Set(id, ClassifierEntry{std::move(v), modality, "exemplars:" + std::to_string(n)});
  }
  if (out.empty()) throw DataError("build_visual: bank has no exemplars");
  return out;
}

ClassifierBank FuseClassifierBanks(const ClassifierBank& text, const ClassifierBank& visual) {
  if (text.dimension() != visual.dimension()) {
    throw ValidationError("fuse: text dimension " + std::to_string(text.dimension()) +
                          " differs from visual dimension " +
                          std::to_string(visual.dimension()));
  }
  for (const auto& [id, entry] : visual.entries()) {
    if (!text.Contains(id)) throw ValidationError("fuse: class '" + id + "' has no text classifier");
  }
  ClassifierBank out(text.dimension());
  for (const auto& [id, entry] : text.entries()) {
    if (!visual.Contains(id)) {
      throw ValidationError("fuse: class '" + id + "' has no visual classifier");
    }
    const ClassifierEntry& v = visual.at(id);
    out.Set(id, ClassifierEntry{FuseMultimodal(entry.vector, v.vector), Modality::kMultimodal,
                                std::string(ModalityName(entry.modality)) + "+" +
                                    std::string(ModalityName(v.modality))});
  }
  return out;
}

QuerySet EmbedQueries(const EmbeddingBank& queries, const AggregatorModel* model) {
  if (model != nullptr && model->config().dim != queries.dimension()) {
    throw ConfigError("queries: dimension " + std::to_string(queries.dimension()) +
                      " does not match model dimension " + std::to_string(model->config().dim));
  }
  QuerySet out;
  for (const auto& [id, records] : queries.classes()) {
    for (const EmbeddingRecord& r : records) {
      if (model != nullptr) {
        const Embedding single[] = {r.values};
        out.features.push_back(model->Aggregate(single));
      } else {
        out.features.push_back(r.values);
      }
      out.labels.push_back(id);
    }
  }
  return out;
}

RetrievalBenchmarkConfig DefaultRetrievalBenchmark(std::uint64_t seed) {
  RetrievalBenchmarkConfig c;
  c.clusters = ClusterSpec{50, 32, 20, 0.05, seed};
  c.queries_per_class = 10;
  c.train.max_k = 5;
  c.train.temperature = 0.02;
  c.train.batch_size = 50;
  c.train.slots_per_iteration = 50;
  c.train.queue_capacity = 50 * 5;
  c.train.epochs = 40;
  c.train.steps_per_epoch = 20;
  c.train.optimizer.learning_rate = 3e-3;
  c.train.seed = seed;
  c.train.model = AggregatorConfig{2, 32, 128, 4, seed};
  return c;
}

RetrievalComparison CompareRetrieval(const EmbeddingBank& train, const EmbeddingBank& queries,
                                     const TrainConfig& train_config, std::size_t classifier_k,
                                     const ScoringHead& head) {
  RetrievalComparison out;
  out.k = classifier_k == 0 ? train_config.max_k : classifier_k;
  const auto start = std::chrono::steady_clock::now();
  TrainResult trained = Train(train_config, train);
  out.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.report = std::move(trained.report);

  const ClassifierBank agg = BuildVisualClassifiers(train, Modality::kVisionAgg, out.k,
                                                    &trained.model);
  const QuerySet agg_queries = EmbedQueries(queries, &trained.model);
  out.aggregator = EvaluateRetrieval(ScoreQueries(agg_queries.features, agg, head),
                                     agg_queries.labels);

  const ClassifierBank mean = BuildVisualClassifiers(train, Modality::kVisionMean, out.k);
  const QuerySet raw = EmbedQueries(queries);
  out.mean = EvaluateRetrieval(ScoreQueries(raw.features, mean, head), raw.labels);
  return out;
}

RetrievalComparison RunRetrievalBenchmark(const RetrievalBenchmarkConfig& config) {
  const ClusterBenchmarkData data = GenClusterBenchmark(config.clusters, config.queries_per_class);
  return CompareRetrieval(data.train, data.queries, config.train, config.classifier_k,
                          config.head);
}

std::vector<RetrievalComparison> SweepK(const EmbeddingBank& train, const EmbeddingBank& queries,
                                        const TrainConfig& base, std::span<const std::size_t> ks,
                                        const ScoringHead& head) {
  std::vector<RetrievalComparison> rows;
  for (std::size_t k : ks) {
    if (k == 0) throw ParameterError("sweep_k: K must be at least 1");
    TrainConfig c = base;
    c.max_k = static_cast<std::uint32_t>(k);
    rows.push_back(CompareRetrieval(train, queries, c, k, head));
  }
  return rows;
}

std::string SweepToCsv(std::span<const RetrievalComparison> rows) {
  std::string out = "k,aggregator_top1,aggregator_top5,mean_top1,mean_top5,final_loss\n";
  char buf[256];
  for (const RetrievalComparison& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.k, r.aggregator.top1,
                  r.aggregator.top5, r.mean.top1, r.mean.top5, r.report.final_loss);
    out += buf;
  }
  return out;
}

}  // namespace ovc
