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

#include "ovc/tta.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ovc/error.hpp"
#include "ovc/rng.hpp"

namespace ovc {

using nlohmann::json;

std::string_view TtaKindName(TtaKind kind) {
  switch (kind) {
    case TtaKind::kNone: return "none";
    case TtaKind::kHarsh: return "harsh";
    case TtaKind::kGentle: return "gentle";
  }
  return "none";
}

TtaKind ParseTtaKind(std::string_view name) {
  if (name == "none") return TtaKind::kNone;
  if (name == "harsh") return TtaKind::kHarsh;
  if (name == "gentle") return TtaKind::kGentle;
  throw ConfigError("unknown TTA recipe '" + std::string(name) + "'");
}

TtaRecipe TtaRecipe::Named(TtaKind kind) {
  TtaRecipe r;
  r.kind = kind;
  switch (kind) {
    case TtaKind::kNone:
      r.variants = 1;
      r.min_scale = r.max_scale = 1.0;
      r.horizontal_flip = false;
      r.brightness = r.contrast = r.saturation = 0.0;
      break;
    case TtaKind::kHarsh:
      r.min_scale = 0.5;
      break;
    case TtaKind::kGentle:
      r.min_scale = 0.8;
      break;
  }
  return r;
}

void TtaRecipe::Validate() const {
  if (variants < 1) throw ConfigError("tta: variants must be at least 1");
  if (!(min_scale > 0.0 && min_scale <= max_scale && max_scale <= 1.0)) {
    throw ConfigError("tta: crop scale range must satisfy 0 < min <= max <= 1");
  }
  for (double s : {brightness, contrast, saturation}) {
    if (!(s >= 0.0)) throw ConfigError("tta: jitter strengths must be non-negative");
  }
}

namespace {

// torchvision-style RandomResizedCrop on a unit square: area fraction from
// [min, max], log-uniform aspect ratio in [3/4, 4/3], ten attempts before
// falling back to a square crop of the drawn area.
CropBox SampleCrop(const TtaRecipe& recipe, Rng& rng, double& scale) {
  const double log_lo = std::log(3.0 / 4.0), log_hi = std::log(4.0 / 3.0);
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double area = rng.Uniform(recipe.min_scale, recipe.max_scale);
    const double ratio = std::exp(rng.Uniform(log_lo, log_hi));
    const double w = std::sqrt(area * ratio);
    const double h = std::sqrt(area / ratio);
    if (w <= 1.0 && h <= 1.0) {
      scale = area;
      return CropBox{rng.Uniform(0.0, 1.0 - w), rng.Uniform(0.0, 1.0 - h), w, h};
    }
  }
  const double area = rng.Uniform(recipe.min_scale, recipe.max_scale);
  const double side = std::sqrt(area);
  scale = area;
  return CropBox{(1.0 - side) / 2.0, (1.0 - side) / 2.0, side, side};
}

double JitterFactor(double strength, Rng& rng) {
  if (strength == 0.0) return 1.0;
  return rng.Uniform(std::max(0.0, 1.0 - strength), 1.0 + strength);
}

}  // namespace

TtaPlan PlanTta(const ExemplarCatalog& catalog, const TtaRecipe& recipe, std::uint64_t seed) {
  recipe.Validate();
  TtaPlan plan;
  Rng rng(seed);
  for (const auto& [class_id, entry] : catalog.classes) {
    if (entry.exemplars.empty()) {
      plan.skipped.push_back(class_id);
      continue;
    }
    for (const ExemplarRef& ex : entry.exemplars) {
      for (std::uint32_t v = 0; v < recipe.variants; ++v) {
        TtaJob job;
        job.class_id = class_id;
        job.exemplar_id = ex.id;
        job.variant = v;
        if (recipe.kind != TtaKind::kNone) {
          job.crop = SampleCrop(recipe, rng, job.scale);
          job.flip = recipe.horizontal_flip && rng.Bernoulli(0.5);
          job.brightness = JitterFactor(recipe.brightness, rng);
          job.contrast = JitterFactor(recipe.contrast, rng);
          job.saturation = JitterFactor(recipe.saturation, rng);
        }
        plan.jobs.push_back(std::move(job));
      }
    }
  }
  return plan;
}

std::string TtaJobsToJsonl(const std::vector<TtaJob>& jobs) {
  std::string out;
  for (const TtaJob& j : jobs) {
    json obj = {{"class", j.class_id},
                {"exemplar", j.exemplar_id},
                {"variant", j.variant},
                {"crop", {j.crop.x, j.crop.y, j.crop.w, j.crop.h}},
                {"scale", j.scale},
                {"flip", j.flip},
                {"jitter",
                 {{"brightness", j.brightness},
                  {"contrast", j.contrast},
                  {"saturation", j.saturation}}}};
    out += obj.dump() + "\n";
  }
  return out;
}

std::vector<TtaJob> TtaJobsFromJsonl(std::string_view jsonl) {
  std::vector<TtaJob> jobs;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json obj = json::parse(line);
      TtaJob j;
      j.class_id = obj.at("class").get<std::string>();
      j.exemplar_id = obj.at("exemplar").get<std::string>();
      j.variant = obj.at("variant").get<std::uint32_t>();
      const auto crop = obj.at("crop").get<std::vector<double>>();
      if (crop.size() != 4) throw ValidationError("crop needs 4 values");
      j.crop = CropBox{crop[0], crop[1], crop[2], crop[3]};
      j.scale = obj.value("scale", j.crop.w * j.crop.h);
      j.flip = obj.at("flip").get<bool>();
      const json& jit = obj.at("jitter");
      j.brightness = jit.at("brightness").get<double>();
      j.contrast = jit.at("contrast").get<double>();
      j.saturation = jit.at("saturation").get<double>();
      jobs.push_back(std::move(j));
    } catch (const std::exception& e) {
      throw ValidationError("tta jobs line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return jobs;
}

}  // namespace ovc
