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

#include "ovc/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <utility>

#include "ovc/error.hpp"
#include "ovc/rng.hpp"

namespace ovc {

void ClusterSpec::Validate() const {
  if (dim < 2) throw ParameterError("cluster spec: dimension must be at least 2");
  if (classes < 1 || per_class < 1) {
    throw ParameterError("cluster spec: class and member counts must be at least 1");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("cluster spec: sigma must be finite and non-negative");
  }
}

std::string ClusterClassId(std::size_t index, std::size_t classes) {
  const int width = std::max<int>(3, static_cast<int>(std::to_string(classes - 1).size()));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "c%0*zu", width, index);
  return buf;
}

namespace {

Embedding UnitNormal(Rng& rng, std::size_t dim) {
  for (;;) {
    std::vector<double> v(dim);
    double norm = 0.0;
    for (double& x : v) {
      x = rng.Normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    Embedding out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] / norm);
    return out;
  }
}

Embedding Member(const Embedding& center, double sigma, Rng& rng) {
  if (sigma == 0.0) return center;
  for (;;) {
    std::vector<double> v(center.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = center[i] + sigma * rng.Normal();
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    Embedding out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / norm);
    return out;
  }
}

EmbeddingBank Members(const ClusterSpec& spec, const std::vector<Embedding>& centers,
                      std::size_t per_class, std::uint64_t stream) {
  EmbeddingBank bank(static_cast<std::uint32_t>(spec.dim));
  Rng rng = Rng::Stream(spec.seed, stream);
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const std::string id = ClusterClassId(c, spec.classes);
    bank.AddClass(id);
    for (std::size_t i = 0; i < per_class; ++i) {
      bank.Add(id, Member(centers[c], spec.sigma, rng), SourceTag::kSynthetic, 0);
    }
  }
  return bank;
}

}  // namespace

std::vector<Embedding> GenClusterCenters(const ClusterSpec& spec) {
  spec.Validate();
  Rng rng = Rng::Stream(spec.seed, 0);
  std::vector<Embedding> centers;
  centers.reserve(spec.classes);
  for (std::size_t c = 0; c < spec.classes; ++c) centers.push_back(UnitNormal(rng, spec.dim));
  return centers;
}

EmbeddingBank GenClusterBank(const ClusterSpec& spec) {
  return Members(spec, GenClusterCenters(spec), spec.per_class, 1);
}

ClusterBenchmarkData GenClusterBenchmark(const ClusterSpec& spec,
                                         std::size_t queries_per_class) {
  if (queries_per_class == 0) throw ParameterError("cluster benchmark: no queries requested");
  ClusterBenchmarkData data{GenClusterCenters(spec), EmbeddingBank(1), EmbeddingBank(1)};
  data.train = Members(spec, data.centers, spec.per_class, 1);
  data.queries = Members(spec, data.centers, queries_per_class, 2);
  return data;
}

Vocabulary GenClusterVocabulary(const ClusterSpec& spec) {
  spec.Validate();
  Vocabulary vocab;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    ClassEntry e;
    e.id = ClusterClassId(c, spec.classes);
    e.name = "cluster " + std::to_string(c);
    switch (c % 3) {
      case 0:
        e.bucket = FrequencyBucket::kRare;
        e.weak = (c / 3) % 2 == 1;
        break;
      case 1: e.bucket = FrequencyBucket::kCommon; break;
      default: e.bucket = FrequencyBucket::kFrequent; break;
    }
    vocab.Add(std::move(e));
  }
  return vocab;
}

namespace {

struct Fraction {
  long num;
  long den;
};

// Per-threshold AP for one class, as exact fractions. A single entry applies
// to every threshold.
struct ExpectedClass {
  std::string id;
  std::vector<Fraction> per_threshold;
};

struct FixtureSpec {
  std::vector<ClassEntry> classes;
  std::vector<DetectionRecord> detections;
  std::vector<GroundTruth> groundtruth;
  std::vector<ExpectedClass> expected;
};

ClassEntry Cls(const char* id, FrequencyBucket bucket, bool weak = false) {
  return ClassEntry{id, id, std::nullopt, bucket, weak};
}

constexpr auto kR = FrequencyBucket::kRare;
constexpr auto kC = FrequencyBucket::kCommon;
constexpr auto kF = FrequencyBucket::kFrequent;

// 1 for the first `passing` default thresholds, 0 after.
std::vector<Fraction> Steps(int passing) {
  std::vector<Fraction> out;
  for (int i = 0; i < 10; ++i) out.push_back(i < passing ? Fraction{1, 1} : Fraction{0, 1});
  return out;
}

const std::map<std::string, FixtureSpec>& Registry() {
  static const std::map<std::string, FixtureSpec> registry = [] {
    std::map<std::string, FixtureSpec> r;
    r["perfect"] = FixtureSpec{
        {Cls("cat", kF), Cls("dog", kC), Cls("okapi", kR)},
        {{"img0", "cat", {10, 10, 50, 40}, 0.9},
         {"img0", "dog", {100, 20, 30, 30}, 0.8},
         {"img1", "okapi", {5, 5, 60, 60}, 0.7},
         {"img1", "cat", {70, 70, 20, 20}, 0.6}},
        {{"img0", "cat", {10, 10, 50, 40}},
         {"img0", "dog", {100, 20, 30, 30}},
         {"img1", "okapi", {5, 5, 60, 60}},
         {"img1", "cat", {70, 70, 20, 20}}},
        {{"cat", {{1, 1}}}, {"dog", {{1, 1}}}, {"okapi", {{1, 1}}}}};
    r["half"] = FixtureSpec{
        {Cls("cat", kF)},
        {{"img0", "cat", {50, 50, 10, 10}, 0.9}, {"img0", "cat", {0, 0, 10, 10}, 0.6}},
        {{"img0", "cat", {0, 0, 10, 10}}},
        {{"cat", {{1, 2}}}}};
    r["buckets"] = FixtureSpec{
        {Cls("heron", kR, true), Cls("okapi", kR), Cls("cat", kF), Cls("dog", kF)},
        {{"a", "heron", {0, 0, 10, 10}, 0.9},
         {"b", "okapi", {20, 0, 10, 10}, 0.8},
         {"a", "okapi", {100, 100, 5, 5}, 0.7},
         {"b", "cat", {60, 60, 10, 10}, 0.95},
         {"b", "cat", {70, 70, 10, 10}, 0.9},
         {"b", "cat", {0, 20, 10, 10}, 0.5},
         {"a", "dog", {40, 40, 20, 16.8}, 0.6}},
        {{"a", "heron", {0, 0, 10, 10}},
         {"a", "okapi", {20, 0, 10, 10}},
         {"b", "okapi", {20, 0, 10, 10}},
         {"b", "cat", {0, 20, 10, 10}},
         {"a", "dog", {40, 40, 20, 20}}},
        {{"heron", {{1, 1}}}, {"okapi", {{51, 101}}}, {"cat", {{1, 3}}}, {"dog", Steps(7)}}};
    r["ladder"] = FixtureSpec{
        {Cls("cat", kF)},
        {{"img0", "cat", {0, 0, 10, 6.25}, 0.8}},
        {{"img0", "cat", {0, 0, 10, 10}}},
        {{"cat", Steps(3)}}};
    r["crowded"] = FixtureSpec{
        {Cls("dog", kC)},
        {{"c", "dog", {2, 0, 10, 10}, 0.9},
         {"c", "dog", {4, 0, 10, 10}, 0.8},
         {"c", "dog", {0, 0, 10, 10}, 0.7},
         {"c", "dog", {51, 51, 10, 10}, 0.3}},
        {{"c", "dog", {0, 0, 10, 10}}, {"c", "dog", {5, 0, 10, 10}}, {"c", "dog", {50, 50, 10, 10}}},
        {{"dog",
          {{185, 202}, {185, 202}, {185, 202}, {185, 202}, {134, 303}, {134, 303},
           {134, 303}, {34, 303}, {34, 303}, {34, 303}}}}};
    r["empty"] = FixtureSpec{
        {Cls("cat", kF), Cls("dog", kF), Cls("yak", kC)},
        {{"img0", "cat", {0, 0, 10, 10}, 0.9}, {"img0", "yak", {0, 0, 5, 5}, 0.5}},
        {{"img0", "cat", {0, 0, 10, 10}}, {"img0", "dog", {20, 20, 10, 10}}},
        {{"cat", {{1, 1}}}, {"dog", {{0, 1}}}}};
    r["ties"] = FixtureSpec{
        {Cls("cat", kF)},
        {{"img0", "cat", {30, 30, 5, 5}, 0.5},
         {"img0", "cat", {0, 0, 10, 10}, 0.5},
         {"img1", "cat", {0, 0, 10, 10}, 0.5}},
        {{"img0", "cat", {0, 0, 10, 10}}, {"img1", "cat", {0, 0, 10, 10}}},
        {{"cat", {{2, 3}}}}};
    return r;
  }();
  return registry;
}

std::optional<double> Mean(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

EvalResult ExpectedResult(const FixtureSpec& spec, const Vocabulary& vocab) {
  EvalResult out;
  out.iou_thresholds = DefaultIouThresholds();
  std::vector<double> all, at50, at75, rare, common, frequent, weak, zero;
  for (const ExpectedClass& e : spec.expected) {
    ClassAp c;
    for (std::size_t t = 0; t < out.iou_thresholds.size(); ++t) {
      const Fraction& f = e.per_threshold.size() == 1 ? e.per_threshold[0] : e.per_threshold[t];
      c.per_threshold.push_back(static_cast<double>(f.num) / static_cast<double>(f.den));
    }
    c.ap = std::accumulate(c.per_threshold.begin(), c.per_threshold.end(), 0.0) /
           static_cast<double>(c.per_threshold.size());
    for (const GroundTruth& g : spec.groundtruth) c.num_gt += g.class_id == e.id;
    for (const DetectionRecord& d : spec.detections) c.num_detections += d.class_id == e.id;
    all.push_back(c.ap);
    at50.push_back(c.per_threshold[0]);
    at75.push_back(c.per_threshold[5]);
    const ClassEntry& entry = vocab.at(e.id);
    switch (entry.bucket) {
      case FrequencyBucket::kRare:
        rare.push_back(c.ap);
        (entry.weak ? weak : zero).push_back(c.ap);
        break;
      case FrequencyBucket::kCommon: common.push_back(c.ap); break;
      case FrequencyBucket::kFrequent: frequent.push_back(c.ap); break;
    }
    out.per_class.emplace(e.id, std::move(c));
  }
  out.map = Mean(all);
  out.ap50 = Mean(at50);
  out.ap75 = Mean(at75);
  out.apr = Mean(rare);
  out.apc = Mean(common);
  out.apf = Mean(frequent);
  out.apr_weak = Mean(weak);
  out.apr_zero = Mean(zero);
  return out;
}

}  // namespace

std::vector<std::string> DetectionFixtureNames() {
  std::vector<std::string> names;
  for (const auto& [name, spec] : Registry()) names.push_back(name);
  return names;
}

DetectionFixture GenDetectionFixture(const std::string& name) {
  auto it = Registry().find(name);
  if (it == Registry().end()) throw LookupError("unknown detection fixture '" + name + "'");
  const FixtureSpec& spec = it->second;
  DetectionFixture f;
  f.name = name;
  for (const ClassEntry& c : spec.classes) f.vocab.Add(c);
  f.detections = spec.detections;
  f.groundtruth = spec.groundtruth;
  f.expected = ExpectedResult(spec, f.vocab);
  return f;
}

}  // namespace ovc
