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

#ifndef OVC_SYNTHETIC_HPP_
#define OVC_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ovc/average_precision.hpp"
#include "ovc/embedding_bank.hpp"
#include "ovc/vocabulary.hpp"

namespace ovc {

// Gaussian class clusters on the unit sphere. Centers are isotropic normal
// draws normalized to unit length; members are center + sigma * N(0, I),
// normalized again.
struct ClusterSpec {
  std::size_t classes = 50;
  std::size_t dim = 32;
  std::size_t per_class = 20;
  double sigma = 0.05;
  std::uint64_t seed = 0;

  void Validate() const;
};

// "c000", "c001", ...
std::string ClusterClassId(std::size_t index, std::size_t classes);

std::vector<Embedding> GenClusterCenters(const ClusterSpec& spec);
EmbeddingBank GenClusterBank(const ClusterSpec& spec);

// Training bank plus held-out members drawn around the same centers. The
// training bank is identical to GenClusterBank(spec).
struct ClusterBenchmarkData {
  std::vector<Embedding> centers;
  EmbeddingBank train;
  EmbeddingBank queries;
};
ClusterBenchmarkData GenClusterBenchmark(const ClusterSpec& spec, std::size_t queries_per_class);

// Vocabulary over the cluster ids. Every third class is rare, every third
// common and the rest frequent; odd rare classes are marked weak.
Vocabulary GenClusterVocabulary(const ClusterSpec& spec);

struct DetectionFixture {
  std::string name;
  Vocabulary vocab;
  std::vector<DetectionRecord> detections;
  std::vector<GroundTruth> groundtruth;
  EvalResult expected;
};

std::vector<std::string> DetectionFixtureNames();
// Unknown names raise LookupError.
DetectionFixture GenDetectionFixture(const std::string& name);

}  // namespace ovc

#endif  // OVC_SYNTHETIC_HPP_
