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

#include "ovc/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>

#include "ovc/error.hpp"
#include "ovc/vector_ops.hpp"

namespace ovc {

using nlohmann::json;

namespace {

constexpr double kQueueUnitTolerance = 1e-5;
constexpr double kLossUnitTolerance = 1e-4;

json ModelConfigJson(const AggregatorConfig& m) {
  return {{"blocks", m.blocks}, {"dim", m.dim}, {"mlp_dim", m.mlp_dim},
          {"heads", m.heads},   {"seed", m.seed}};
}

json TrainConfigJson(const TrainConfig& c) {
  return {{"max_k", c.max_k},
          {"temperature", c.temperature},
          {"queue_capacity", c.queue_capacity},
          {"slots_per_iteration", c.slots_per_iteration},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"steps_per_epoch", c.steps_per_epoch},
          {"learning_rate", c.optimizer.learning_rate},
          {"beta1", c.optimizer.beta1},
          {"beta2", c.optimizer.beta2},
          {"adam_epsilon", c.optimizer.epsilon},
          {"weight_decay", c.optimizer.weight_decay},
          {"seed", c.seed},
          {"model", ModelConfigJson(c.model)}};
}

template <typename V>
void Read(const json& obj, const char* key, V& out) {
  if (obj.contains(key)) out = obj.at(key).get<V>();
}

void RejectUnknown(const json& obj, std::initializer_list<std::string_view> known,
                   const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(where + ": unknown field '" + key + "'");
    }
  }
}

bool IsUnit(std::span<const float> v, double tolerance) {
  return std::abs(Norm(v) - 1.0) <= tolerance;
}

}  // namespace

void TrainConfig::Validate() const {
  if (max_k == 0) throw ConfigError("train: max_k must be at least 1");
  if (!(temperature > 0.0)) throw ConfigError("train: temperature must be positive");
  if (queue_capacity == 0) throw ConfigError("train: queue_capacity must be positive");
  if (slots_per_iteration == 0 || slots_per_iteration > queue_capacity) {
    throw ConfigError("train: slots_per_iteration must be in [1, queue_capacity]");
  }
  if (batch_size < 2) throw ConfigError("train: batch_size must be at least 2");
  if (!(optimizer.learning_rate > 0.0)) {
    throw ConfigError("train: learning_rate must be positive");
  }
  model.Validate();
}

std::string TrainConfigToJson(const TrainConfig& config) {
  return TrainConfigJson(config).dump(2) + "\n";
}

TrainConfig TrainConfigFromJson(std::string_view json_text) {
  TrainConfig c;
  try {
    const json doc = json::parse(json_text);
    if (!doc.is_object()) throw ConfigError("train config: expected a JSON object");
    RejectUnknown(doc,
                  {"max_k", "K", "temperature", "queue_capacity", "slots_per_iteration",
                   "batch_size", "epochs", "steps_per_epoch", "learning_rate", "beta1",
                   "beta2", "adam_epsilon", "weight_decay", "seed", "model"},
                  "train config");
    Read(doc, "max_k", c.max_k);
    Read(doc, "K", c.max_k);
    Read(doc, "temperature", c.temperature);
    Read(doc, "queue_capacity", c.queue_capacity);
    Read(doc, "slots_per_iteration", c.slots_per_iteration);
    Read(doc, "batch_size", c.batch_size);
    Read(doc, "epochs", c.epochs);
    Read(doc, "steps_per_epoch", c.steps_per_epoch);
    Read(doc, "learning_rate", c.optimizer.learning_rate);
    Read(doc, "beta1", c.optimizer.beta1);
    Read(doc, "beta2", c.optimizer.beta2);
    Read(doc, "adam_epsilon", c.optimizer.epsilon);
    Read(doc, "weight_decay", c.optimizer.weight_decay);
    Read(doc, "seed", c.seed);
    if (doc.contains("model")) {
      const json& m = doc["model"];
      RejectUnknown(m, {"blocks", "dim", "mlp_dim", "heads", "seed"}, "train config model");
      Read(m, "blocks", c.model.blocks);
      Read(m, "dim", c.model.dim);
      Read(m, "mlp_dim", c.model.mlp_dim);
      Read(m, "heads", c.model.heads);
      Read(m, "seed", c.model.seed);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  c.Validate();
  return c;
}

// ---- queue ---------------------------------------------------------------

NegativeQueue::NegativeQueue(std::size_t capacity, std::size_t max_push)
    : slots_(capacity), max_push_(max_push) {
  if (capacity == 0) throw ParameterError("queue: capacity must be positive");
  if (max_push == 0 || max_push > capacity) {
    throw ParameterError("queue: max_push must be in [1, capacity]");
  }
}

void NegativeQueue::Push(std::span<const QueueEntry> entries) {
  if (entries.size() > max_push_) {
    throw ParameterError("queue: push of " + std::to_string(entries.size()) +
                         " entries exceeds the per-iteration limit of " +
                         std::to_string(max_push_));
  }
  for (const QueueEntry& e : entries) {
    if (!IsUnit(e.embedding, kQueueUnitTolerance)) {
      throw ValidationError("queue: embedding for class '" + e.class_id +
                            "' is not unit-norm");
    }
  }
  for (const QueueEntry& e : entries) {
    slots_[cursor_] = e;
    cursor_ = (cursor_ + 1) % slots_.size();
    fill_ = std::min(fill_ + 1, slots_.size());
  }
}

std::vector<QueueEntry> NegativeQueue::Contents() const {
  std::vector<QueueEntry> out;
  out.reserve(fill_);
  const std::size_t start = full() ? cursor_ : 0;
  for (std::size_t i = 0; i < fill_; ++i) {
    out.push_back(slots_[(start + i) % slots_.size()]);
  }
  return out;
}

// ---- sampling and loss ---------------------------------------------------

TrainingPair SampleTrainingPair(const EmbeddingBank& bank, std::string_view class_id,
                                std::size_t k, Rng& rng) {
  if (k == 0) throw ParameterError("sample_training_pair: k must be at least 1");
  const auto& records = bank.Records(class_id);
  if (records.empty()) {
    throw DataError("sample_training_pair: class '" + std::string(class_id) +
                    "' has no embeddings");
  }
  TrainingPair pair;
  pair.first.reserve(k);
  pair.second.reserve(k);
  if (records.size() >= 2 * k) {
    const auto picks = rng.SampleWithoutReplacement(records.size(), 2 * k);
    for (std::size_t i = 0; i < k; ++i) pair.first.push_back(records[picks[i]].values);
    for (std::size_t i = k; i < 2 * k; ++i) pair.second.push_back(records[picks[i]].values);
    pair.disjoint = true;
  } else {
    for (std::size_t i = 0; i < 2 * k; ++i) {
      const auto& v = records[rng.Below(records.size())].values;
      (i < k ? pair.first : pair.second).push_back(v);
    }
    pair.disjoint = false;
  }
  return pair;
}

double InfoNceLoss(std::span<const float> anchor, std::span<const float> positive,
                   std::span<const Embedding> negatives, double temperature) {
  if (!(temperature > 0.0)) throw ParameterError("info_nce: temperature must be positive");
  if (negatives.empty()) throw ConfigError("info_nce: no negatives");
  if (positive.size() != anchor.size()) throw ValidationError("info_nce: dimension mismatch");
  if (!IsUnit(anchor, kLossUnitTolerance) || !IsUnit(positive, kLossUnitTolerance)) {
    throw ValidationError("info_nce: anchor and positive must be unit-norm");
  }
  std::vector<double> logits;
  logits.reserve(negatives.size() + 1);
  logits.push_back(Dot(anchor, positive) / temperature);
  for (const Embedding& n : negatives) {
    if (n.size() != anchor.size()) throw ValidationError("info_nce: dimension mismatch");
    if (!IsUnit(n, kLossUnitTolerance)) {
      throw ValidationError("info_nce: negatives must be unit-norm");
    }
    logits.push_back(Dot(anchor, n) / temperature);
  }
  // (mx - z_pos) + log(sum exp(z - mx)): both terms are non-negative, so
  // small losses keep their relative precision.
  const double pos = logits.front();
  const double mx = *std::max_element(logits.begin(), logits.end());
  double rest = 0.0;
  for (std::size_t i = 1; i < logits.size(); ++i) rest += std::exp(logits[i] - mx);
  if (mx == pos) return std::log1p(rest);
  return (mx - pos) + std::log(std::exp(pos - mx) + rest);
}

template <typename T>
Var ContrastiveLossOnTape(Tape<T>& tape, const AggregatorConfig& config,
                          std::span<const ClassSetPair> batch,
                          std::span<const QueueEntry> queue, double temperature,
                          std::vector<Var>* positives) {
  if (!(temperature > 0.0)) throw ParameterError("contrastive loss: temperature must be positive");
  if (batch.size() < 2 && queue.empty()) {
    throw ConfigError("contrastive loss: no negatives (batch of one and empty queue)");
  }
  const std::size_t d = config.dim;
  std::vector<Var> anchor_rows, positive_rows;
  anchor_rows.reserve(batch.size());
  positive_rows.reserve(batch.size());
  for (const ClassSetPair& pair : batch) {
    try {
      anchor_rows.push_back(AggregateOnTape(
          tape, config, tape.Constant(StackEmbeddings<T>(pair.first, d))));
      positive_rows.push_back(AggregateOnTape(
          tape, config, tape.Constant(StackEmbeddings<T>(pair.second, d))));
    } catch (const NumericError& e) {
      throw NumericError("class '" + pair.class_id + "': " + e.what());
    }
  }
  Var anchors = tape.ConcatRows(anchor_rows);
  Var candidates = tape.ConcatRows(positive_rows);
  if (!queue.empty()) {
    std::vector<T> data;
    data.reserve(queue.size() * d);
    for (const QueueEntry& q : queue) {
      if (q.embedding.size() != d) throw ValidationError("contrastive loss: queue dimension mismatch");
      for (float v : q.embedding) data.push_back(static_cast<T>(v));
    }
    const Var parts[] = {candidates, tape.Constant(Tensor<T>({queue.size(), d}, std::move(data)))};
    candidates = tape.ConcatRows(parts);
  }

  const std::size_t rows = batch.size();
  const std::size_t cols = batch.size() + queue.size();
  std::vector<std::uint8_t> excluded(rows * cols, 0);
  std::vector<std::size_t> targets(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    targets[i] = i;
    const std::string& cls = batch[i].class_id;
    std::size_t negatives = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      if (j == i) continue;
      const std::string& other = j < rows ? batch[j].class_id : queue[j - rows].class_id;
      if (other == cls) {
        excluded[i * cols + j] = 1;
      } else {
        ++negatives;
      }
    }
    if (negatives == 0) {
      throw ConfigError("contrastive loss: anchor of class '" + cls + "' has no negatives");
    }
  }
  // Same-class exclusion: every surviving non-target candidate differs in class.
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (j == i || excluded[i * cols + j]) continue;
      const std::string& other = j < rows ? batch[j].class_id : queue[j - rows].class_id;
      if (other == batch[i].class_id) {
        throw std::logic_error("contrastive loss: same-class negative survived masking");
      }
    }
  }

  Var logits = tape.Scale(tape.MatMulNT(anchors, candidates),
                          static_cast<T>(1.0 / temperature));
  if (positives != nullptr) *positives = positive_rows;
  return tape.SoftmaxCrossEntropy(logits, std::move(targets), std::move(excluded));
}

template Var ContrastiveLossOnTape<float>(Tape<float>&, const AggregatorConfig&,
                                          std::span<const ClassSetPair>,
                                          std::span<const QueueEntry>, double,
                                          std::vector<Var>*);
template Var ContrastiveLossOnTape<double>(Tape<double>&, const AggregatorConfig&,
                                           std::span<const ClassSetPair>,
                                           std::span<const QueueEntry>, double,
                                           std::vector<Var>*);

// ---- reports ---------------------------------------------------------------

std::string TrainReportToJson(const TrainReport& report) {
  json doc = {{"seed", report.seed},
              {"steps", report.steps},
              {"epoch_losses", report.epoch_losses},
              {"final_loss", report.final_loss},
              {"config", TrainConfigJson(report.config)}};
  return doc.dump(2) + "\n";
}

std::string TrainReportToCsv(const TrainReport& report) {
  std::string out = "epoch,mean_loss\n";
  char buf[64];
  for (std::size_t i = 0; i < report.epoch_losses.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i + 1, report.epoch_losses[i]);
    out += buf;
  }
  return out;
}

// ---- training loop -------------------------------------------------------

TrainResult Train(const TrainConfig& config, const EmbeddingBank& bank,
                  const Vocabulary* vocab, const EpochCallback& on_epoch) {
  config.Validate();
  if (bank.dimension() != config.model.dim) {
    throw ConfigError("train: bank dimension " + std::to_string(bank.dimension()) +
                      " differs from model dimension " + std::to_string(config.model.dim));
  }
  if (vocab != nullptr) bank.ValidateAgainst(*vocab);

  std::vector<std::string> classes;
  for (const auto& [id, records] : bank.classes()) {
    if (!records.empty()) classes.push_back(id);
  }
  if (classes.size() < config.batch_size) {
    throw ConfigError("train: bank has " + std::to_string(classes.size()) +
                      " non-empty classes, batch_size is " +
                      std::to_string(config.batch_size));
  }
  std::size_t steps_per_epoch = config.steps_per_epoch;
  if (steps_per_epoch == 0) {
    const std::size_t per_step = config.batch_size * (config.max_k + 1);
    steps_per_epoch = std::max<std::size_t>(1, (bank.RecordCount() + per_step - 1) / per_step);
  }

  const auto started = std::chrono::steady_clock::now();
  TrainResult result{AggregatorModel::Init(config.model), TrainReport{}};
  TrainReport& report = result.report;
  report.seed = config.seed;
  report.config = config;

  Rng rng = Rng::Stream(config.seed, 1);
  NegativeQueue queue(config.queue_capacity, config.slots_per_iteration);
  AdamW<float> optimizer(config.optimizer);
  ParamSet<float>& params = result.model.mutable_params();

  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_total = 0.0;
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      const std::size_t step = report.steps;
      std::vector<ClassSetPair> batch;
      batch.reserve(config.batch_size);
      for (std::size_t index : rng.SampleWithoutReplacement(classes.size(), config.batch_size)) {
        const std::size_t k = static_cast<std::size_t>(rng.Between(1, config.max_k));
        TrainingPair pair = SampleTrainingPair(bank, classes[index], k, rng);
        batch.push_back(ClassSetPair{classes[index], std::move(pair.first),
                                     std::move(pair.second)});
      }
      const std::vector<QueueEntry> negatives = queue.Contents();

      params.ZeroGrad();
      Tape<float> tape(&params);
      std::vector<Var> positive_rows;
      Var loss;
      try {
        loss = ContrastiveLossOnTape(tape, config.model, batch, negatives,
                                     config.temperature, &positive_rows);
      } catch (const NumericError& e) {
        throw NumericError("train: step " + std::to_string(step) + ", " + e.what());
      }
      const double value = tape.Value(loss)[0];
      if (!std::isfinite(value) || value < 0.0) {
        throw NumericError("train: step " + std::to_string(step) + " produced loss " +
                           std::to_string(value));
      }
      tape.Backward(loss);
      for (const auto& e : params.entries()) {
        if (!e.grad.AllFinite()) {
          throw NumericError("train: step " + std::to_string(step) +
                             ", non-finite gradient for '" + e.name + "'");
        }
      }
      optimizer.Step(params);

      std::vector<QueueEntry> fresh;
      const std::size_t push = std::min(batch.size(), config.slots_per_iteration);
      fresh.reserve(push);
      for (std::size_t i = 0; i < push; ++i) {
        const auto& v = tape.Value(positive_rows[i]).storage();
        fresh.push_back(QueueEntry{batch[i].class_id, Embedding(v.begin(), v.end())});
      }
      queue.Push(fresh);

      epoch_total += value;
      report.final_loss = value;
      ++report.steps;
    }
    report.epoch_losses.push_back(epoch_total / static_cast<double>(steps_per_epoch));
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (on_epoch) on_epoch(epoch + 1, result.model, report);
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace ovc
