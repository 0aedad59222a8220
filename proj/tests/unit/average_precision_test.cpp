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

#include "ovc/average_precision.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "../common/oracles.hpp"
#include "ovc/error.hpp"
#include "ovc/rng.hpp"
#include "ovc/synthetic.hpp"

namespace ovc {
namespace {

using testing::OracleClassAp;

Vocabulary MakeVocab(std::initializer_list<std::pair<const char*, FrequencyBucket>> classes) {
  Vocabulary v;
  for (const auto& [id, bucket] : classes) {
    v.Add(ClassEntry{id, id, std::nullopt, bucket, false});
  }
  return v;
}

TEST(IouTest, ReferenceValues) {
  EXPECT_NEAR(Iou(Box{0, 0, 2, 2}, Box{1, 1, 2, 2}), 1.0 / 7.0, 1e-12);
  EXPECT_DOUBLE_EQ(Iou(Box{0, 0, 2, 2}, Box{0, 0, 2, 2}), 1.0);
  EXPECT_DOUBLE_EQ(Iou(Box{0, 0, 1, 1}, Box{1, 0, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(Iou(Box{0, 0, 1, 1}, Box{5, 5, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(Iou(Box{0, 0, 4, 4}, Box{1, 1, 2, 2}), 0.25);
}

TEST(InterpolatedApTest, WorkedExamples) {
  const bool perfect[] = {true, true};
  EXPECT_DOUBLE_EQ(InterpolatedAp(perfect, 2), 1.0);
  const bool half[] = {true, false};
  EXPECT_NEAR(InterpolatedAp(half, 2), 51.0 / 101.0, 1e-15);
  const bool late[] = {false, true};
  EXPECT_NEAR(InterpolatedAp(late, 1), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(InterpolatedAp({}, 3), 0.0);
  EXPECT_DOUBLE_EQ(InterpolatedAp(perfect, 0), 0.0);
}

TEST(ComputeApTest, DefaultThresholds) {
  const auto t = DefaultIouThresholds();
  ASSERT_EQ(t.size(), 10u);
  EXPECT_DOUBLE_EQ(t.front(), 0.5);
  EXPECT_DOUBLE_EQ(t.back(), 0.95);
}

TEST(ComputeApTest, PerfectAndEmptyDetections) {
  const Vocabulary v = MakeVocab({{"cat", FrequencyBucket::kFrequent}});
  const std::vector<GroundTruth> gt = {{"i", "cat", {0, 0, 10, 10}}};
  const std::vector<DetectionRecord> dets = {{"i", "cat", {0, 0, 10, 10}, 0.9}};
  const EvalResult perfect = ComputeAp(dets, gt, v);
  EXPECT_DOUBLE_EQ(*perfect.map, 1.0);
  EXPECT_DOUBLE_EQ(*perfect.apf, 1.0);
  EXPECT_FALSE(perfect.apr.has_value());
  EXPECT_FALSE(perfect.apc.has_value());
  const EvalResult none = ComputeAp({}, gt, v);
  EXPECT_DOUBLE_EQ(*none.map, 0.0);
}

TEST(ComputeApTest, AllFixturesMatchExpected) {
  for (const std::string& name : DetectionFixtureNames()) {
    SCOPED_TRACE(name);
    const DetectionFixture f = GenDetectionFixture(name);
    const EvalResult got = ComputeAp(f.detections, f.groundtruth, f.vocab);
    const EvalResult& want = f.expected;
    auto same = [](const std::optional<double>& a, const std::optional<double>& b) {
      ASSERT_EQ(a.has_value(), b.has_value());
      if (a) EXPECT_NEAR(*a, *b, 1e-12);
    };
    same(got.map, want.map);
    same(got.ap50, want.ap50);
    same(got.ap75, want.ap75);
    same(got.apr, want.apr);
    same(got.apc, want.apc);
    same(got.apf, want.apf);
    same(got.apr_weak, want.apr_weak);
    same(got.apr_zero, want.apr_zero);
    ASSERT_EQ(got.per_class.size(), want.per_class.size());
    for (const auto& [id, c] : want.per_class) {
      const ClassAp& g = got.per_class.at(id);
      EXPECT_EQ(g.num_gt, c.num_gt);
      EXPECT_EQ(g.num_detections, c.num_detections);
      ASSERT_EQ(g.per_threshold.size(), c.per_threshold.size());
      for (std::size_t i = 0; i < c.per_threshold.size(); ++i) {
        EXPECT_NEAR(g.per_threshold[i], c.per_threshold[i], 1e-12);
      }
    }
  }
  EXPECT_THROW(GenDetectionFixture("nope"), LookupError);
}

TEST(ComputeApTest, MatchesOracleOnRandomInstances) {
  Rng rng(31);
  const Vocabulary v = MakeVocab({{"a", FrequencyBucket::kRare},
                                  {"b", FrequencyBucket::kCommon},
                                  {"c", FrequencyBucket::kFrequent}});
  const char* classes[] = {"a", "b", "c"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<GroundTruth> gts;
    std::vector<DetectionRecord> dets;
    const int images = 1 + static_cast<int>(rng.Below(3));
    for (int i = 0; i < images; ++i) {
      const std::string img = "img" + std::to_string(i);
      for (int g = 0, n = 1 + static_cast<int>(rng.Below(3)); g < n; ++g) {
        gts.push_back({img, classes[rng.Below(3)],
                       {double(rng.Below(8)), double(rng.Below(8)), double(1 + rng.Below(6)),
                        double(1 + rng.Below(6))}});
      }
      for (int d = 0, n = static_cast<int>(rng.Below(6)); d < n; ++d) {
        // Coarse scores make ties common.
        dets.push_back({img, classes[rng.Below(3)],
                        {double(rng.Below(8)), double(rng.Below(8)), double(1 + rng.Below(6)),
                         double(1 + rng.Below(6))},
                        static_cast<double>(rng.Below(5)) / 4.0});
      }
    }
    const EvalResult got = ComputeAp(dets, gts, v);
    for (const char* cls : classes) {
      std::vector<DetectionRecord> cd;
      std::vector<GroundTruth> cg;
      for (const auto& d : dets) if (d.class_id == cls) cd.push_back(d);
      for (const auto& g : gts) if (g.class_id == cls) cg.push_back(g);
      const auto it = got.per_class.find(cls);
      if (cg.empty()) {
        EXPECT_TRUE(it == got.per_class.end() || it->second.num_gt == 0);
        continue;
      }
      ASSERT_NE(it, got.per_class.end());
      const auto t = DefaultIouThresholds();
      double sum = 0.0;
      for (std::size_t k = 0; k < t.size(); ++k) {
        const double want = OracleClassAp(cd, cg, t[k]);
        EXPECT_NEAR(it->second.per_threshold[k], want, 1e-12) << cls << " t=" << t[k];
        sum += want;
      }
      EXPECT_NEAR(it->second.ap, sum / t.size(), 1e-12);
    }
  }
}

TEST(ComputeApTest, LowerScoredFalsePositiveNeverRaisesAp) {
  Rng rng(32);
  const Vocabulary v = MakeVocab({{"a", FrequencyBucket::kFrequent}});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GroundTruth> gts;
    std::vector<DetectionRecord> dets;
    for (int g = 0; g < 3; ++g) gts.push_back({"i", "a", {double(4 * g), 0, 3, 3}});
    for (int d = 0; d < 4; ++d) {
      dets.push_back({"i", "a", {double(rng.Below(10)), 0, 3, 3}, 0.2 + rng.Uniform() * 0.8});
    }
    const double before = *ComputeAp(dets, gts, v).map;
    dets.push_back({"i", "a", {100, 100, 3, 3}, 0.1});
    EXPECT_LE(*ComputeAp(dets, gts, v).map, before + 1e-15);
  }
}

TEST(ComputeApTest, ClassesWithoutGroundTruth) {
  const Vocabulary v = MakeVocab({{"a", FrequencyBucket::kFrequent},
                                  {"b", FrequencyBucket::kFrequent}});
  const std::vector<GroundTruth> gt = {{"i", "a", {0, 0, 1, 1}}};
  const std::vector<DetectionRecord> dets = {{"i", "a", {0, 0, 1, 1}, 0.5},
                                             {"i", "b", {0, 0, 1, 1}, 0.5}};
  EXPECT_DOUBLE_EQ(*ComputeAp(dets, gt, v).map, 1.0);
  ApOptions opt;
  opt.include_classes_without_gt = true;
  EXPECT_DOUBLE_EQ(*ComputeAp(dets, gt, v, opt).map, 0.5);
}

TEST(ComputeApTest, ValidationErrors) {
  const Vocabulary v = MakeVocab({{"a", FrequencyBucket::kFrequent}});
  const std::vector<GroundTruth> gt = {{"i", "a", {0, 0, 1, 1}}};
  const std::vector<DetectionRecord> unknown = {{"i", "zebra", {0, 0, 1, 1}, 0.5}};
  EXPECT_THROW(ComputeAp(unknown, gt, v), ValidationError);
  const std::vector<DetectionRecord> bad_score = {{"i", "a", {0, 0, 1, 1}, 1.5}};
  EXPECT_THROW(ComputeAp(bad_score, gt, v), ValidationError);
  const std::vector<DetectionRecord> bad_box = {{"i", "a", {0, 0, -1, 1}, 0.5}};
  EXPECT_THROW(ComputeAp(bad_box, gt, v), ValidationError);
  ApOptions opt;
  opt.iou_thresholds = {1.5};
  EXPECT_THROW(ComputeAp({}, gt, v, opt), ParameterError);
}

TEST(ApJsonTest, JsonlRoundTripAndReport) {
  const DetectionFixture f = GenDetectionFixture("buckets");
  const auto dets = ParseDetections(DetectionsToJsonl(f.detections));
  const auto gts = ParseGroundTruth(GroundTruthToJsonl(f.groundtruth));
  ASSERT_EQ(dets.size(), f.detections.size());
  ASSERT_EQ(gts.size(), f.groundtruth.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    EXPECT_EQ(dets[i].score, f.detections[i].score);
    EXPECT_EQ(dets[i].box.h, f.detections[i].box.h);
  }
  const EvalResult r = ComputeAp(dets, gts, f.vocab);
  const auto doc = nlohmann::json::parse(EvalResultToJson(r));
  for (const char* key : {"mAP", "AP50", "AP75", "APr", "APc", "APf", "APr-w", "APr-z"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(doc.at("mAP").get<double>(), *r.map);
  const std::string table = EvalResultToTable(r);
  EXPECT_NE(table.find("APr"), std::string::npos);
  EXPECT_NE(table.find("mAP"), std::string::npos);
  EXPECT_THROW(ParseDetections("{\"image\": \"i\"}\n"), std::exception);
}

}  // namespace
}  // namespace ovc
