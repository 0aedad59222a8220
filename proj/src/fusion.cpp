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

#include "ovc/fusion.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "ovc/binary_io.hpp"
#include "ovc/error.hpp"
#include "ovc/vector_ops.hpp"

namespace ovc {

using nlohmann::json;

namespace {
constexpr double kMultimodalNormBound = 2.0 + 1e-6;
constexpr double kCollapseThreshold = 1e-6;
}  // namespace

std::string_view ModalityName(Modality m) {
  switch (m) {
    case Modality::kText: return "text";
    case Modality::kVisionAgg: return "vision-agg";
    case Modality::kVisionMean: return "vision-mean";
    case Modality::kMultimodal: return "multimodal";
  }
  return "text";
}

Modality ParseModality(std::string_view name) {
  if (name == "text") return Modality::kText;
  if (name == "vision-agg") return Modality::kVisionAgg;
  if (name == "vision-mean") return Modality::kVisionMean;
  if (name == "multimodal" || name == "mm") return Modality::kMultimodal;
  throw ConfigError("unknown modality '" + std::string(name) + "'");
}

ClassifierBank::ClassifierBank(std::uint32_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw ParameterError("classifier bank: dimension must be positive");
}

void ClassifierBank::Set(std::string_view class_id, ClassifierEntry entry) {
  const std::string where = "classifier bank: class '" + std::string(class_id) + "'";
  if (class_id.empty()) throw ValidationError("classifier bank: empty class id");
  if (entry.vector.size() != dimension_) {
    throw ValidationError(where + " has dimension " + std::to_string(entry.vector.size()) +
                          ", expected " + std::to_string(dimension_));
  }
  for (float v : entry.vector) {
    if (!std::isfinite(v)) throw ValidationError(where + " has a non-finite value");
  }
  if (entry.modality == Modality::kMultimodal && Norm(entry.vector) > kMultimodalNormBound) {
    throw ValidationError(where + ": multimodal classifier norm exceeds 2");
  }
  entries_.insert_or_assign(std::string(class_id), std::move(entry));
}

const ClassifierEntry& ClassifierBank::at(std::string_view class_id) const {
  auto it = entries_.find(class_id);
  if (it == entries_.end()) {
    throw LookupError("classifier bank: unknown class '" + std::string(class_id) + "'");
  }
  return it->second;
}

std::vector<std::string> ClassifierBank::ClassIds() const {
  std::vector<std::string> ids;
  ids.reserve(entries_.size());
  for (const auto& [id, e] : entries_) ids.push_back(id);
  return ids;
}

std::vector<std::uint8_t> EncodeClassifierBank(const ClassifierBank& bank) {
  ByteWriter w;
  w.Raw(std::string_view(kClassifierMagic, 4));
  w.U16(kClassifierVersion);
  w.U32(bank.dimension());
  w.U32(static_cast<std::uint32_t>(bank.size()));
  for (const auto& [id, e] : bank.entries()) {
    w.ShortString(id);
    w.U8(static_cast<std::uint8_t>(e.modality));
    w.ShortString(e.provenance);
    for (float v : e.vector) w.F32(v);
  }
  return w.Release();
}

ClassifierBank DecodeClassifierBank(const std::vector<std::uint8_t>& bytes,
                                    const std::string& context) {
  ByteReader r(bytes, context);
  if (bytes.size() < 4 || r.Raw(4) != std::string_view(kClassifierMagic, 4)) {
    throw FormatError(context + ": bad magic, expected OVCB");
  }
  const std::uint16_t version = r.U16();
  if (version != kClassifierVersion) {
    throw FormatError(context + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t dimension = r.U32();
  if (dimension == 0) throw CorruptionError(context + ": zero dimension");
  const std::uint32_t count = r.U32();
  ClassifierBank bank(dimension);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string id = r.ShortString();
    const std::uint8_t modality = r.U8();
    if (modality > static_cast<std::uint8_t>(Modality::kMultimodal)) {
      throw CorruptionError(context + ": unknown modality tag " + std::to_string(modality));
    }
    ClassifierEntry e;
    e.modality = static_cast<Modality>(modality);
    e.provenance = r.ShortString();
    e.vector.resize(dimension);
    for (float& v : e.vector) v = r.F32();
    if (bank.Contains(id)) throw CorruptionError(context + ": duplicate class '" + id + "'");
    bank.Set(id, std::move(e));
  }
  if (!r.AtEnd()) throw CorruptionError(context + ": trailing bytes");
  return bank;
}

void SaveClassifierBank(const ClassifierBank& bank, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeClassifierBank(bank));
}

ClassifierBank LoadClassifierBank(const std::filesystem::path& path) {
  return DecodeClassifierBank(ReadFileBytes(path), path.string());
}

std::string ClassifierBankToJson(const ClassifierBank& bank) {
  json classifiers = json::array();
  for (const auto& [id, e] : bank.entries()) {
    classifiers.push_back({{"class", id},
                           {"modality", ModalityName(e.modality)},
                           {"provenance", e.provenance},
                           {"vector", e.vector}});
  }
  json doc = {{"dimension", bank.dimension()}, {"classifiers", std::move(classifiers)}};
  return doc.dump(2) + "\n";
}

Embedding FuseMultimodal(std::span<const float> text, std::span<const float> image) {
  if (text.size() != image.size()) {
    throw ValidationError("fuse: text dimension " + std::to_string(text.size()) +
                          " differs from image dimension " + std::to_string(image.size()));
  }
  const double text_norm = Norm(text);
  const double image_norm = Norm(image);
  if (!(text_norm > 0.0) || !(image_norm > 0.0)) {
    throw ParameterError("fuse: zero classifier cannot be normalized");
  }
  Embedding out(text.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const double v = static_cast<double>(text[i]) / text_norm +
                     static_cast<double>(image[i]) / image_norm;
    out[i] = static_cast<float>(v);
    sq += v * v;
  }
  if (std::sqrt(sq) < kCollapseThreshold) {
    throw DataError("fuse: text and image classifiers are antipodal");
  }
  return out;
}

Embedding MeanBaseline(std::span<const Embedding> exemplars) {
  const Embedding mean = MeanOf(exemplars, "mean_baseline");
  if (!(Norm(mean) > 0.0)) {
    throw DataError("mean_baseline: exemplar mean is the zero vector");
  }
  return Normalized(mean);
}

}  // namespace ovc
