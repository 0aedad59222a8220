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

#ifndef OVC_SCORING_HPP_
#define OVC_SCORING_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovc/average_precision.hpp"
#include "ovc/embedding_bank.hpp"
#include "ovc/fusion.hpp"
#include "ovc/tensor.hpp"

namespace ovc {

// Sigmoid detection-score head: s = sigmoid(scale * cos(P q, w_c) + bias).
struct ScoringHead {
  // Feature-dim x classifier-dim projection; identity when absent.
  std::optional<Tensor<float>> projection;
  double logit_scale = 50.0;
  double bias = -2.0;

  void Validate() const;
};

double Sigmoid(double x);

// Queries x classes. Columns follow the bank's (lexicographic) class order.
struct ScoreMatrix {
  std::vector<std::string> class_ids;
  // Pre-sigmoid values, kept because the sigmoid saturates in double.
  Tensor<double> logits;

  std::size_t queries() const { return logits.rows(); }
  std::size_t classes() const { return class_ids.size(); }
  double Logit(std::size_t q, std::size_t c) const { return logits.at(q, c); }
  double Score(std::size_t q, std::size_t c) const { return Sigmoid(logits.at(q, c)); }
  Tensor<double> Scores() const;
};

// Every (query, class) pair is scored independently; there is no
// normalization across classes.
ScoreMatrix ScoreQueries(std::span<const Embedding> features, const ClassifierBank& bank,
                         const ScoringHead& head);

struct RetrievalResult {
  double top1 = 0.0;
  double top5 = 0.0;
  std::size_t queries = 0;
};

// Rank of the true class counts classes with a higher logit plus tied
// classes whose id sorts first.
RetrievalResult EvaluateRetrieval(const ScoreMatrix& scores,
                                  std::span<const std::string> true_labels);

// A region proposal whose feature is stored in a query bank under `id`.
struct Region {
  std::string id;
  std::string image;
  Box box;
};

// JSONL: {"region", "image", "box": [x, y, w, h]}
std::vector<Region> ParseRegions(std::string_view jsonl);

// One detection per (region, class) with the sigmoid score. The feature of a
// region is the first record stored under its id.
std::vector<DetectionRecord> ScoreRegions(std::span<const Region> regions,
                                          const EmbeddingBank& features,
                                          const ClassifierBank& bank, const ScoringHead& head);

}  // namespace ovc

#endif  // OVC_SCORING_HPP_
