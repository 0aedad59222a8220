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

#include "ovc/embedding_bank.hpp"

#include <cmath>

#include "ovc/binary_io.hpp"
#include "ovc/error.hpp"

namespace ovc {

std::string_view SourceName(SourceTag tag) {
  switch (tag) {
    case SourceTag::kIn21k: return "in21k";
    case SourceTag::kDetectionBox: return "detection-box";
    case SourceTag::kVisualGenome: return "visualgenome";
    case SourceTag::kManualAlias: return "manual-alias";
    case SourceTag::kSynthetic: return "synthetic";
  }
  return "unknown";
}

SourceTag ParseSource(std::string_view name) {
  if (name == "in21k") return SourceTag::kIn21k;
  if (name == "detection-box") return SourceTag::kDetectionBox;
  if (name == "visualgenome") return SourceTag::kVisualGenome;
  if (name == "manual-alias") return SourceTag::kManualAlias;
  if (name == "synthetic") return SourceTag::kSynthetic;
  throw ConfigError("unknown source kind '" + std::string(name) + "'");
}

EmbeddingBank::EmbeddingBank(std::uint32_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw ParameterError("embedding bank: dimension must be positive");
}

std::size_t EmbeddingBank::RecordCount() const {
  std::size_t n = 0;
  for (const auto& [id, records] : classes_) n += records.size();
  return n;
}

void EmbeddingBank::AddClass(std::string_view class_id) {
  if (class_id.empty()) throw ValidationError("embedding bank: empty class id");
  classes_.try_emplace(std::string(class_id));
}

void EmbeddingBank::Add(std::string_view class_id, EmbeddingRecord record) {
  if (class_id.empty()) throw ValidationError("embedding bank: empty class id");
  auto it = classes_.find(class_id);
  const std::size_t index = it == classes_.end() ? 0 : it->second.size();
  if (record.values.size() != dimension_) {
    throw ValidationError("embedding bank: class '" + std::string(class_id) +
                          "' record " + std::to_string(index) + " has dimension " +
                          std::to_string(record.values.size()) + ", expected " +
                          std::to_string(dimension_));
  }
  for (float v : record.values) {
    if (!std::isfinite(v)) {
      throw ValidationError("embedding bank: class '" + std::string(class_id) +
                            "' record " + std::to_string(index) +
                            " has a non-finite value");
    }
  }
  if (it == classes_.end()) it = classes_.try_emplace(std::string(class_id)).first;
  it->second.push_back(std::move(record));
}

const std::vector<EmbeddingRecord>& EmbeddingBank::Records(
    std::string_view class_id) const {
  auto it = classes_.find(class_id);
  if (it == classes_.end()) {
    throw LookupError("embedding bank: unknown class '" + std::string(class_id) + "'");
  }
  return it->second;
}

std::vector<std::string> EmbeddingBank::ClassIds() const {
  std::vector<std::string> ids;
  ids.reserve(classes_.size());
  for (const auto& [id, records] : classes_) ids.push_back(id);
  return ids;
}

void EmbeddingBank::ValidateAgainst(const Vocabulary& vocab) const {
  for (const auto& [id, records] : classes_) {
    if (!vocab.Contains(id)) {
      throw ValidationError("embedding bank: class '" + id +
                            "' is not in the vocabulary");
    }
  }
}

std::vector<std::uint8_t> EncodeBank(const EmbeddingBank& bank) {
  ByteWriter w;
  w.Raw(std::string_view(kBankMagic, 4));
  w.U16(kBankVersion);
  w.U32(bank.dimension());
  w.U32(static_cast<std::uint32_t>(bank.ClassCount()));
  for (const auto& [id, records] : bank.classes()) {
    w.ShortString(id);
    w.U32(static_cast<std::uint32_t>(records.size()));
    for (const EmbeddingRecord& r : records) {
      w.U8(static_cast<std::uint8_t>(r.source));
      w.U16(r.augmentation);
      for (float v : r.values) w.F32(v);
    }
  }
  return w.Release();
}

EmbeddingBank DecodeBank(const std::vector<std::uint8_t>& bytes,
                         const std::string& context) {
  ByteReader r(bytes, context);
  if (bytes.size() < 4 || r.Raw(4) != std::string_view(kBankMagic, 4)) {
    throw FormatError(context + ": bad magic, expected OVEB");
  }
  const std::uint16_t version = r.U16();
  if (version != kBankVersion) {
    throw FormatError(context + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t dimension = r.U32();
  if (dimension == 0) throw CorruptionError(context + ": zero dimension");
  const std::uint32_t class_count = r.U32();
  EmbeddingBank bank(dimension);
  std::string previous;
  for (std::uint32_t c = 0; c < class_count; ++c) {
    std::string id = r.ShortString();
    if (id.empty()) throw CorruptionError(context + ": empty class id");
    if (c > 0 && id <= previous) {
      throw CorruptionError(context + ": class ids out of order or duplicated at '" +
                            id + "'");
    }
    const std::uint32_t count = r.U32();
    r.Require(static_cast<std::size_t>(count) * (3 + 4 * std::size_t{dimension}));
    bank.AddClass(id);
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint8_t tag = r.U8();
      if (tag > static_cast<std::uint8_t>(SourceTag::kSynthetic)) {
        throw CorruptionError(context + ": class '" + id + "' record " +
                              std::to_string(i) + " has unknown source tag " +
                              std::to_string(tag));
      }
      EmbeddingRecord rec;
      rec.source = static_cast<SourceTag>(tag);
      rec.augmentation = r.U16();
      rec.values.resize(dimension);
      for (float& v : rec.values) v = r.F32();
      bank.Add(id, std::move(rec));
    }
    previous = std::move(id);
  }
  if (!r.AtEnd()) {
    throw CorruptionError(context + ": " + std::to_string(r.remaining()) +
                          " trailing bytes after the last record");
  }
  return bank;
}

EmbeddingBank LoadBank(const std::filesystem::path& path) {
  return DecodeBank(ReadFileBytes(path), path.string());
}

void SaveBank(const EmbeddingBank& bank, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeBank(bank));
}

}  // namespace ovc
