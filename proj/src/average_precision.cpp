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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "ovc/error.hpp"

namespace ovc {

using nlohmann::json;

double Iou(const Box& a, const Box& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<double> DefaultIouThresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50.0 + 5.0 * i) / 100.0);
  return t;
}

double InterpolatedAp(std::span<const bool> ranked_true_positive, std::size_t num_gt) {
  if (num_gt == 0) return 0.0;
  const std::size_t n = ranked_true_positive.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ranked_true_positive[i]) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
  }
  // Monotone precision envelope.
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double total = 0.0;
  std::size_t cursor = 0;
  for (int t = 0; t <= 100; ++t) {
    const double r = t / 100.0;
    while (cursor < n && recall[cursor] < r) ++cursor;
    if (cursor == n) break;
    total += precision[cursor];
  }
  return total / 101.0;
}

namespace {

void ValidateBox(const Box& b, const std::string& where) {
  if (!(b.w > 0.0) || !(b.h > 0.0) || !std::isfinite(b.x) || !std::isfinite(b.y) ||
      !std::isfinite(b.w) || !std::isfinite(b.h)) {
    throw ValidationError(where + ": box needs finite coordinates and positive size");
  }
}

std::optional<double> MeanOf(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<std::size_t> ThresholdIndex(const std::vector<double>& thresholds, double t) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (std::abs(thresholds[i] - t) < 1e-9) return i;
  }
  return std::nullopt;
}

// AP of one class at one IoU threshold.
double ClassThresholdAp(const std::vector<const DetectionRecord*>& ranked,
                        const std::map<std::string, std::vector<Box>>& gt_by_image,
                        std::size_t num_gt, double threshold) {
  std::map<std::string, std::vector<bool>> used;
  for (const auto& [image, boxes] : gt_by_image) used[image].assign(boxes.size(), false);
  std::unique_ptr<bool[]> hits(new bool[ranked.size()]);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const DetectionRecord* det = ranked[i];
    bool hit = false;
    auto it = gt_by_image.find(det->image);
    if (it != gt_by_image.end()) {
      std::vector<bool>& taken = used[det->image];
      double best = -1.0;
      std::size_t best_index = 0;
      for (std::size_t g = 0; g < it->second.size(); ++g) {
        if (taken[g]) continue;
        const double iou = Iou(det->box, it->second[g]);
        if (iou >= threshold && iou > best) {
          best = iou;
          best_index = g;
        }
      }
      if (best >= 0.0) {
        taken[best_index] = true;
        hit = true;
      }
    }
    hits[i] = hit;
  }
  return InterpolatedAp(std::span<const bool>(hits.get(), ranked.size()), num_gt);
}

}  // namespace

EvalResult ComputeAp(std::span<const DetectionRecord> detections,
                     std::span<const GroundTruth> groundtruth, const Vocabulary& vocab,
                     const ApOptions& options) {
  for (double t : options.iou_thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ParameterError("compute_ap: IoU thresholds must be in (0, 1]");
  }
  if (options.iou_thresholds.empty()) throw ParameterError("compute_ap: no IoU thresholds");

  std::set<std::string, std::less<>> images;
  std::map<std::string, std::map<std::string, std::vector<Box>>> gt;  // class -> image -> boxes
  std::map<std::string, std::size_t> gt_count;
  for (std::size_t i = 0; i < groundtruth.size(); ++i) {
    const GroundTruth& g = groundtruth[i];
    const std::string where = "ground truth " + std::to_string(i);
    if (!vocab.Contains(g.class_id)) {
      throw ValidationError(where + ": unknown class '" + g.class_id + "'");
    }
    ValidateBox(g.box, where);
    images.insert(g.image);
    gt[g.class_id][g.image].push_back(g.box);
    ++gt_count[g.class_id];
  }
  std::map<std::string, std::vector<const DetectionRecord*>> by_class;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const DetectionRecord& d = detections[i];
    const std::string where = "detection " + std::to_string(i);
    if (!vocab.Contains(d.class_id)) {
      throw ValidationError(where + ": unknown class '" + d.class_id + "'");
    }
    if (images.find(d.image) == images.end()) {
      throw ValidationError(where + ": unknown image '" + d.image + "'");
    }
    ValidateBox(d.box, where);
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw ValidationError(where + ": score outside [0, 1]");
    }
    by_class[d.class_id].push_back(&d);
  }

  EvalResult result;
  result.iou_thresholds = options.iou_thresholds;
  const std::size_t nt = options.iou_thresholds.size();
  std::vector<double> all, rare, common, frequent, rare_weak, rare_zero;
  std::vector<double> at50, at75;
  const auto i50 = ThresholdIndex(options.iou_thresholds, 0.5);
  const auto i75 = ThresholdIndex(options.iou_thresholds, 0.75);
  const std::map<std::string, std::vector<Box>> no_gt;

  for (const ClassEntry& cls : vocab.entries()) {
    const std::size_t num_gt = gt_count.count(cls.id) ? gt_count[cls.id] : 0;
    if (num_gt == 0 && !options.include_classes_without_gt) continue;
    std::vector<const DetectionRecord*> ranked = by_class[cls.id];
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const DetectionRecord* a, const DetectionRecord* b) {
                       return a->score > b->score;
                     });
    ClassAp entry;
    entry.num_gt = num_gt;
    entry.num_detections = ranked.size();
    auto gt_it = gt.find(cls.id);
    const auto& class_gt = gt_it == gt.end() ? no_gt : gt_it->second;
    for (double t : options.iou_thresholds) {
      entry.per_threshold.push_back(num_gt == 0 ? 0.0 : ClassThresholdAp(ranked, class_gt, num_gt, t));
    }
    entry.ap = std::accumulate(entry.per_threshold.begin(), entry.per_threshold.end(), 0.0) /
               static_cast<double>(nt);
    all.push_back(entry.ap);
    if (i50) at50.push_back(entry.per_threshold[*i50]);
    if (i75) at75.push_back(entry.per_threshold[*i75]);
    switch (cls.bucket) {
      case FrequencyBucket::kRare:
        rare.push_back(entry.ap);
        (cls.weak ? rare_weak : rare_zero).push_back(entry.ap);
        break;
      case FrequencyBucket::kCommon: common.push_back(entry.ap); break;
      case FrequencyBucket::kFrequent: frequent.push_back(entry.ap); break;
    }
    result.per_class.emplace(cls.id, std::move(entry));
  }
  result.map = MeanOf(all);
  result.ap50 = MeanOf(at50);
  result.ap75 = MeanOf(at75);
  result.apr = MeanOf(rare);
  result.apc = MeanOf(common);
  result.apf = MeanOf(frequent);
  result.apr_weak = MeanOf(rare_weak);
  result.apr_zero = MeanOf(rare_zero);
  return result;
}

namespace {

Box ParseBox(const json& arr) {
  const auto v = arr.get<std::vector<double>>();
  if (v.size() != 4) throw ValidationError("box needs 4 values");
  return Box{v[0], v[1], v[2], v[3]};
}

template <typename Fn>
void ForEachLine(std::string_view jsonl, const char* what, Fn&& fn) {
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw ValidationError(std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

json OptionalJson(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::vector<DetectionRecord> ParseDetections(std::string_view jsonl) {
  std::vector<DetectionRecord> out;
  ForEachLine(jsonl, "detections", [&out](const json& obj) {
    out.push_back(DetectionRecord{obj.at("image").get<std::string>(),
                                  obj.at("class").get<std::string>(), ParseBox(obj.at("box")),
                                  obj.at("score").get<double>()});
  });
  return out;
}

std::vector<GroundTruth> ParseGroundTruth(std::string_view jsonl) {
  std::vector<GroundTruth> out;
  ForEachLine(jsonl, "ground truth", [&out](const json& obj) {
    out.push_back(GroundTruth{obj.at("image").get<std::string>(),
                              obj.at("class").get<std::string>(), ParseBox(obj.at("box"))});
  });
  return out;
}

std::string DetectionsToJsonl(std::span<const DetectionRecord> detections) {
  std::string out;
  for (const DetectionRecord& d : detections) {
    json obj = {{"image", d.image},
                {"class", d.class_id},
                {"box", {d.box.x, d.box.y, d.box.w, d.box.h}},
                {"score", d.score}};
    out += obj.dump() + "\n";
  }
  return out;
}

std::string GroundTruthToJsonl(std::span<const GroundTruth> groundtruth) {
  std::string out;
  for (const GroundTruth& g : groundtruth) {
    json obj = {{"image", g.image},
                {"class", g.class_id},
                {"box", {g.box.x, g.box.y, g.box.w, g.box.h}}};
    out += obj.dump() + "\n";
  }
  return out;
}

std::string EvalResultToJson(const EvalResult& r) {
  json per_class = json::object();
  for (const auto& [id, c] : r.per_class) {
    per_class[id] = {{"ap", c.ap},
                     {"num_gt", c.num_gt},
                     {"num_detections", c.num_detections},
                     {"per_threshold", c.per_threshold}};
  }
  json doc = {{"iou_thresholds", r.iou_thresholds},
              {"mAP", OptionalJson(r.map)},
              {"AP50", OptionalJson(r.ap50)},
              {"AP75", OptionalJson(r.ap75)},
              {"APr", OptionalJson(r.apr)},
              {"APc", OptionalJson(r.apc)},
              {"APf", OptionalJson(r.apf)},
              {"APr-w", OptionalJson(r.apr_weak)},
              {"APr-z", OptionalJson(r.apr_zero)},
              {"top1", OptionalJson(r.top1)},
              {"top5", OptionalJson(r.top5)},
              {"per_class", std::move(per_class)}};
  return doc.dump(2) + "\n";
}

std::string EvalResultToTable(const EvalResult& r) {
  auto cell = [](const std::optional<double>& v) {
    char buf[32];
    if (!v) return std::string("     -");
    std::snprintf(buf, sizeof(buf), "%6.1f", 100.0 * *v);
    return std::string(buf);
  };
  std::string out;
  const bool retrieval_only = !r.map && (r.top1 || r.top5);
  if (!retrieval_only) {
    out += "   APr    APc    APf    mAP   APr-w  APr-z   AP50   AP75\n";
    out += cell(r.apr) + " " + cell(r.apc) + " " + cell(r.apf) + " " + cell(r.map) + "  " +
           cell(r.apr_weak) + " " + cell(r.apr_zero) + " " + cell(r.ap50) + " " + cell(r.ap75) +
           "\n";
  }
  if (r.top1 || r.top5) out += "  top1 " + cell(r.top1) + "   top5 " + cell(r.top5) + "\n";
  return out;
}

}  // namespace ovc
