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

#ifndef OVC_EMBEDDING_BANK_HPP_
#define OVC_EMBEDDING_BANK_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovc/vocabulary.hpp"

namespace ovc {

// Fixed-dimension real vector produced by an external encoder.
using Embedding = std::vector<float>;

// Where an embedding came from. The numeric values are the on-disk tags.
enum class SourceTag : std::uint8_t {
  kIn21k = 0,
  kDetectionBox = 1,
  kVisualGenome = 2,
  kManualAlias = 3,
  kSynthetic = 4,
};

std::string_view SourceName(SourceTag tag);
SourceTag ParseSource(std::string_view name);

struct EmbeddingRecord {
  Embedding values;
  SourceTag source = SourceTag::kSynthetic;
  std::uint16_t augmentation = 0;

  friend bool operator==(const EmbeddingRecord&, const EmbeddingRecord&) = default;
};

// Map from class id to its embedding records. Every record has the bank
// dimension and only finite values; Add() enforces both.
class EmbeddingBank {
 public:
  using ClassMap = std::map<std::string, std::vector<EmbeddingRecord>, std::less<>>;

  explicit EmbeddingBank(std::uint32_t dimension);

  std::uint32_t dimension() const { return dimension_; }
  const ClassMap& classes() const { return classes_; }
  std::size_t ClassCount() const { return classes_.size(); }
  std::size_t RecordCount() const;
  bool Contains(std::string_view class_id) const {
    return classes_.find(class_id) != classes_.end();
  }

  // Registers a class with no records yet.
  void AddClass(std::string_view class_id);
  void Add(std::string_view class_id, EmbeddingRecord record);
  void Add(std::string_view class_id, Embedding values,
           SourceTag source = SourceTag::kSynthetic,
           std::uint16_t augmentation = 0) {
    Add(class_id, EmbeddingRecord{std::move(values), source, augmentation});
  }

  const std::vector<EmbeddingRecord>& Records(std::string_view class_id) const;
  std::vector<std::string> ClassIds() const;

  // Every class id must be present in `vocab`.
  void ValidateAgainst(const Vocabulary& vocab) const;

  friend bool operator==(const EmbeddingBank&, const EmbeddingBank&) = default;

 private:
  std::uint32_t dimension_;
  ClassMap classes_;
};

// Binary layout, little-endian:
//   "OVEB" | u16 version=1 | u32 dimension | u32 class count |
//   per class (sorted by id): u16 id length, id bytes, u32 record count,
//     per record: u8 source tag, u16 augmentation index, dimension x f32
inline constexpr char kBankMagic[4] = {'O', 'V', 'E', 'B'};
inline constexpr std::uint16_t kBankVersion = 1;

std::vector<std::uint8_t> EncodeBank(const EmbeddingBank& bank);
EmbeddingBank DecodeBank(const std::vector<std::uint8_t>& bytes,
                         const std::string& context = "bank");
EmbeddingBank LoadBank(const std::filesystem::path& path);
void SaveBank(const EmbeddingBank& bank, const std::filesystem::path& path);

}  // namespace ovc

#endif  // OVC_EMBEDDING_BANK_HPP_
