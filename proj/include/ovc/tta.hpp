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

#ifndef OVC_TTA_HPP_
#define OVC_TTA_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ovc/exemplar_resolver.hpp"

namespace ovc {

enum class TtaKind { kNone, kHarsh, kGentle };

std::string_view TtaKindName(TtaKind kind);
TtaKind ParseTtaKind(std::string_view name);

// Exemplar augmentation recipe: RandomResizedCrop area range, optional
// horizontal flip, and color-jitter strengths (factor drawn from
// [1 - s, 1 + s]).
struct TtaRecipe {
  TtaKind kind = TtaKind::kGentle;
  std::uint32_t variants = 5;
  double min_scale = 0.8;
  double max_scale = 1.0;
  bool horizontal_flip = true;
  double brightness = 0.4;
  double contrast = 0.4;
  double saturation = 0.4;

  // none: 1 identity variant; harsh: 5 variants, scale [0.5, 1];
  // gentle: 5 variants, scale [0.8, 1].
  static TtaRecipe Named(TtaKind kind);

  void Validate() const;
};

// Crop rectangle as fractions of the image width/height.
struct CropBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;
};

struct TtaJob {
  std::string class_id;
  std::string exemplar_id;
  std::uint32_t variant = 0;
  CropBox crop;
  // Crop area as a fraction of the image, w * h.
  double scale = 1.0;
  bool flip = false;
  double brightness = 1.0;
  double contrast = 1.0;
  double saturation = 1.0;
};

struct TtaPlan {
  std::vector<TtaJob> jobs;
  // Classes without any exemplar.
  std::vector<std::string> skipped;
};

// recipe.variants jobs per exemplar, in catalog order, with augmentation
// parameters drawn from the recipe ranges. Deterministic given `seed`.
TtaPlan PlanTta(const ExemplarCatalog& catalog, const TtaRecipe& recipe, std::uint64_t seed);

// One JSON object per line: {"class", "exemplar", "variant", "crop": [x, y,
// w, h], "scale", "flip", "jitter": {"brightness", "contrast", "saturation"}}.
std::string TtaJobsToJsonl(const std::vector<TtaJob>& jobs);
std::vector<TtaJob> TtaJobsFromJsonl(std::string_view jsonl);

}  // namespace ovc

#endif  // OVC_TTA_HPP_
