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

#ifndef OVC_TRAINER_HPP_
#define OVC_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovc/adamw.hpp"
#include "ovc/aggregator.hpp"
#include "ovc/autodiff.hpp"
#include "ovc/embedding_bank.hpp"
#include "ovc/rng.hpp"
#include "ovc/vocabulary.hpp"

namespace ovc {

struct TrainConfig {
  // Sets hold k ~ U[1, max_k] exemplars.
  std::uint32_t max_k = 5;
  double temperature = 0.02;
  // Queue sizes are in set slots: one aggregated embedding per class set.
  std::size_t queue_capacity = 4096;
  std::size_t slots_per_iteration = 512;
  // Distinct classes per step.
  std::size_t batch_size = 512;
  std::uint32_t epochs = 10;
  // 0 picks ceil(records / (batch_size * (max_k + 1))), i.e. about one
  // pass over the bank per epoch.
  std::size_t steps_per_epoch = 0;
  AdamWHyper optimizer;
  std::uint64_t seed = 0;
  AggregatorConfig model;

  void Validate() const;
};

std::string TrainConfigToJson(const TrainConfig& config);
// Missing fields keep their defaults; unknown fields are a ConfigError.
TrainConfig TrainConfigFromJson(std::string_view json_text);

struct QueueEntry {
  std::string class_id;
  Embedding embedding;
};

// Fixed-capacity ring of aggregated set embeddings used as extra negatives.
// A push overwrites the oldest slots first.
class NegativeQueue {
 public:
  NegativeQueue(std::size_t capacity, std::size_t max_push);

  // Throws ParameterError when more than max_push entries are given and
  // ValidationError for embeddings that are not unit-norm within 1e-5.
  void Push(std::span<const QueueEntry> entries);

  std::size_t capacity() const { return slots_.size(); }
  std::size_t max_push() const { return max_push_; }
  std::size_t size() const { return fill_; }
  std::size_t cursor() const { return cursor_; }
  bool full() const { return fill_ == slots_.size(); }

  // Occupied slots, oldest first.
  std::vector<QueueEntry> Contents() const;

 private:
  std::vector<QueueEntry> slots_;
  std::size_t max_push_;
  std::size_t cursor_ = 0;
  std::size_t fill_ = 0;
};

struct TrainingPair {
  std::vector<Embedding> first;
  std::vector<Embedding> second;
  // False when the class was too small and sampling used replacement.
  bool disjoint = true;
};

// Two sets of k records of one class. With at least 2k records the sets are
// disjoint; otherwise all 2k draws are made with replacement.
TrainingPair SampleTrainingPair(const EmbeddingBank& bank, std::string_view class_id,
                                std::size_t k, Rng& rng);

// -log( exp(a.p / t) / (exp(a.p / t) + sum_n exp(a.n / t)) ), evaluated with
// the largest logit subtracted.
double InfoNceLoss(std::span<const float> anchor, std::span<const float> positive,
                   std::span<const Embedding> negatives, double temperature);

struct ClassSetPair {
  std::string class_id;
  std::vector<Embedding> first;
  std::vector<Embedding> second;
};

// Batch contrastive loss on a tape. Anchors are the aggregated first sets,
// positives the aggregated second sets. Row i is scored against every
// positive and every queue embedding; candidates sharing the anchor's class
// (other than its own positive) are excluded. Queue entries are constants.
// The aggregated second sets are returned through `positives` when given.
template <typename T>
Var ContrastiveLossOnTape(Tape<T>& tape, const AggregatorConfig& config,
                          std::span<const ClassSetPair> batch,
                          std::span<const QueueEntry> queue, double temperature,
                          std::vector<Var>* positives = nullptr);

struct TrainReport {
  std::vector<double> epoch_losses;
  double final_loss = 0.0;
  std::size_t steps = 0;
  double wall_clock_seconds = 0.0;
  std::uint64_t seed = 0;
  TrainConfig config;
};

// Without wall-clock time, so equal runs give equal bytes.
std::string TrainReportToJson(const TrainReport& report);
std::string TrainReportToCsv(const TrainReport& report);

struct TrainResult {
  AggregatorModel model;
  TrainReport report;
};

// Called after each epoch with the 1-based epoch number.
using EpochCallback =
    std::function<void(std::uint32_t epoch, const AggregatorModel&, const TrainReport&)>;

// Single-threaded and deterministic for a given config.seed.
TrainResult Train(const TrainConfig& config, const EmbeddingBank& bank,
                  const Vocabulary* vocab = nullptr,
                  const EpochCallback& on_epoch = nullptr);

}  // namespace ovc

#endif  // OVC_TRAINER_HPP_
