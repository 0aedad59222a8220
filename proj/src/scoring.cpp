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

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ovc/error.hpp"
#include "ovc/vector_ops.hpp"

namespace ovc {

void ScoringHead::Validate() const {
  if (!(logit_scale > 0.0)) throw ConfigError("scoring head: scale must be positive");
  if (!std::isfinite(bias)) throw ConfigError("scoring head: bias must be finite");
  if (projection && projection->rank() != 2) {
    throw ConfigError("scoring head: projection must be a matrix");
  }
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor<double> ScoreMatrix::Scores() const {
  Tensor<double> out(logits.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Sigmoid(logits[i]);
  return out;
}

ScoreMatrix ScoreQueries(std::span<const Embedding> features, const ClassifierBank& bank,
                         const ScoringHead& head) {
  head.Validate();
  if (bank.empty()) throw ParameterError("score_queries: empty classifier bank");
  const std::size_t d = bank.dimension();
  if (head.projection && head.projection->cols() != d) {
    throw ValidationError("score_queries: projection output " +
                          std::to_string(head.projection->cols()) +
                          " does not match bank dimension " + std::to_string(d));
  }
  const std::size_t feature_dim = head.projection ? head.projection->rows() : d;

  std::vector<Embedding> classifiers;
  ScoreMatrix out;
  for (const auto& [id, entry] : bank.entries()) {
    out.class_ids.push_back(id);
    if (!(Norm(entry.vector) > 0.0)) {
      throw ValidationError("score_queries: classifier '" + id + "' is the zero vector");
    }
    classifiers.push_back(Normalized(entry.vector));
  }
  out.logits = Tensor<double>({features.size(), classifiers.size()});
  Embedding projected(d);
  for (std::size_t q = 0; q < features.size(); ++q) {
    if (features[q].size() != feature_dim) {
      throw ValidationError("score_queries: query " + std::to_string(q) + " has dimension " +
                            std::to_string(features[q].size()) + ", expected " +
                            std::to_string(feature_dim));
    }
    if (head.projection) {
      const Tensor<float>& P = *head.projection;
      for (std::size_t j = 0; j < d; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < feature_dim; ++i) {
          acc += static_cast<double>(features[q][i]) * P.at(i, j);
        }
        projected[j] = static_cast<float>(acc);
      }
    } else {
      projected = features[q];
    }
    if (!(Norm(projected) > 0.0)) {
      throw ValidationError("score_queries: query " + std::to_string(q) +
                            " projects to the zero vector");
    }
    const Embedding unit = Normalized(projected);
    for (std::size_t c = 0; c < classifiers.size(); ++c) {
      out.logits.at(q, c) = head.logit_scale * Dot(unit, classifiers[c]) + head.bias;
    }
  }
  return out;
}

RetrievalResult EvaluateRetrieval(const ScoreMatrix& scores,
                                  std::span<const std::string> true_labels) {
  if (scores.queries() == 0) throw ParameterError("evaluate_retrieval: no queries");
  if (true_labels.size() != scores.queries()) {
    throw ValidationError("evaluate_retrieval: " + std::to_string(true_labels.size()) +
                          " labels for " + std::to_string(scores.queries()) + " queries");
  }
  std::size_t hit1 = 0, hit5 = 0;
  for (std::size_t q = 0; q < scores.queries(); ++q) {
    std::size_t truth = scores.classes();
    for (std::size_t c = 0; c < scores.classes(); ++c) {
      if (scores.class_ids[c] == true_labels[q]) truth = c;
    }
    if (truth == scores.classes()) {
      throw ValidationError("evaluate_retrieval: label '" + true_labels[q] +
                            "' is not a bank class");
    }
    const double target = scores.Logit(q, truth);
    std::size_t rank = 1;
    for (std::size_t c = 0; c < scores.classes(); ++c) {
      if (c == truth) continue;
      const double v = scores.Logit(q, c);
      if (v > target || (v == target && scores.class_ids[c] < scores.class_ids[truth])) ++rank;
    }
    if (rank == 1) ++hit1;
    if (rank <= 5) ++hit5;
  }
  const double n = static_cast<double>(scores.queries());
  return RetrievalResult{static_cast<double>(hit1) / n, static_cast<double>(hit5) / n,
                         scores.queries()};
}

std::vector<Region> ParseRegions(std::string_view jsonl) {
  std::vector<Region> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const nlohmann::json obj = nlohmann::json::parse(line);
      const auto box = obj.at("box").get<std::vector<double>>();
      if (box.size() != 4) throw ValidationError("box needs 4 values");
      out.push_back(Region{obj.at("region").get<std::string>(), obj.at("image").get<std::string>(),
                           Box{box[0], box[1], box[2], box[3]}});
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("regions line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("regions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<DetectionRecord> ScoreRegions(std::span<const Region> regions,
                                          const EmbeddingBank& features,
                                          const ClassifierBank& bank, const ScoringHead& head) {
  std::vector<Embedding> feats;
  feats.reserve(regions.size());
  for (const Region& r : regions) {
    if (!features.Contains(r.id) || features.Records(r.id).empty()) {
      throw ValidationError("region '" + r.id + "' has no feature in the query bank");
    }
    feats.push_back(features.Records(r.id).front().values);
  }
  const ScoreMatrix scores = ScoreQueries(feats, bank, head);
  std::vector<DetectionRecord> out;
  out.reserve(regions.size() * scores.classes());
  for (std::size_t q = 0; q < regions.size(); ++q) {
    for (std::size_t c = 0; c < scores.classes(); ++c) {
      out.push_back(DetectionRecord{regions[q].image, scores.class_ids[c], regions[q].box,
                                    scores.Score(q, c)});
    }
  }
  return out;
}

}  // namespace ovc
