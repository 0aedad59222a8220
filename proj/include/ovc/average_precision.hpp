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

#ifndef OVC_AVERAGE_PRECISION_HPP_
#define OVC_AVERAGE_PRECISION_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovc/vocabulary.hpp"

namespace ovc {

// Axis-aligned box in pixels: top-left corner plus width and height.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

double Iou(const Box& a, const Box& b);

struct DetectionRecord {
  std::string image;
  std::string class_id;
  Box box;
  double score = 0.0;
};

struct GroundTruth {
  std::string image;
  std::string class_id;
  Box box;
};

// 0.50, 0.55, ..., 0.95
std::vector<double> DefaultIouThresholds();

struct ApOptions {
  std::vector<double> iou_thresholds = DefaultIouThresholds();
  // Count vocabulary classes without ground truth as AP 0 instead of
  // leaving them out of every mean.
  bool include_classes_without_gt = false;
};

struct ClassAp {
  std::size_t num_gt = 0;
  std::size_t num_detections = 0;
  std::vector<double> per_threshold;
  double ap = 0.0;
};

// Metrics that cannot be formed (no class in a bucket, threshold not
// evaluated) are left empty.
struct EvalResult {
  std::vector<double> iou_thresholds;
  std::optional<double> map;
  std::optional<double> ap50;
  std::optional<double> ap75;
  std::optional<double> apr;
  std::optional<double> apc;
  std::optional<double> apf;
  std::optional<double> apr_weak;
  std::optional<double> apr_zero;
  std::map<std::string, ClassAp> per_class;
  std::optional<double> top1;
  std::optional<double> top5;
};

// 101-point interpolated AP of a ranked list of true/false positives
// against `num_gt` ground-truth objects.
double InterpolatedAp(std::span<const bool> ranked_true_positive, std::size_t num_gt);

// Box AP per class and IoU threshold. Detections are visited by descending
// score (ties keep input order) and each one claims the unmatched
// ground-truth box of its class and image with the highest IoU, provided the
// IoU reaches the threshold.
EvalResult ComputeAp(std::span<const DetectionRecord> detections,
                     std::span<const GroundTruth> groundtruth, const Vocabulary& vocab,
                     const ApOptions& options = {});

// JSONL: {"image", "class", "box": [x, y, w, h], "score"} (score omitted for
// ground truth).
std::vector<DetectionRecord> ParseDetections(std::string_view jsonl);
std::vector<GroundTruth> ParseGroundTruth(std::string_view jsonl);
std::string DetectionsToJsonl(std::span<const DetectionRecord> detections);
std::string GroundTruthToJsonl(std::span<const GroundTruth> groundtruth);

std::string EvalResultToJson(const EvalResult& result);
// Fixed-width table with APr / APc / APf / mAP columns.
std::string EvalResultToTable(const EvalResult& result);

}  // namespace ovc

#endif  // OVC_AVERAGE_PRECISION_HPP_
