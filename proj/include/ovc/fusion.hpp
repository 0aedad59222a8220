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

#ifndef OVC_FUSION_HPP_
#define OVC_FUSION_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovc/embedding_bank.hpp"

namespace ovc {

enum class Modality : std::uint8_t {
  kText = 0,
  kVisionAgg = 1,
  kVisionMean = 2,
  kMultimodal = 3,
};

std::string_view ModalityName(Modality m);
// Accepts "text", "vision-agg", "vision-mean", "multimodal" and "mm".
Modality ParseModality(std::string_view name);

struct ClassifierEntry {
  Embedding vector;
  Modality modality = Modality::kText;
  std::string provenance;

  friend bool operator==(const ClassifierEntry&, const ClassifierEntry&) = default;
};

// One classifier vector per class, all of the same dimension.
class ClassifierBank {
 public:
  using EntryMap = std::map<std::string, ClassifierEntry, std::less<>>;

  explicit ClassifierBank(std::uint32_t dimension);

  std::uint32_t dimension() const { return dimension_; }
  const EntryMap& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Replaces any existing entry. Validates dimension, finiteness and the
  // multimodal norm bound (<= 2 + 1e-6).
  void Set(std::string_view class_id, ClassifierEntry entry);
  const ClassifierEntry& at(std::string_view class_id) const;
  bool Contains(std::string_view class_id) const {
    return entries_.find(class_id) != entries_.end();
  }
  std::vector<std::string> ClassIds() const;

  friend bool operator==(const ClassifierBank&, const ClassifierBank&) = default;

 private:
  std::uint32_t dimension_;
  EntryMap entries_;
};

// Binary layout, little-endian:
//   "OVCB" | u16 version=1 | u32 dimension | u32 entry count |
//   per entry (sorted by id): u16 id length, id bytes, u8 modality,
//     u16 provenance length, provenance bytes, dimension x f32
inline constexpr char kClassifierMagic[4] = {'O', 'V', 'C', 'B'};
inline constexpr std::uint16_t kClassifierVersion = 1;

std::vector<std::uint8_t> EncodeClassifierBank(const ClassifierBank& bank);
ClassifierBank DecodeClassifierBank(const std::vector<std::uint8_t>& bytes,
                                    const std::string& context = "classifier bank");
void SaveClassifierBank(const ClassifierBank& bank, const std::filesystem::path& path);
ClassifierBank LoadClassifierBank(const std::filesystem::path& path);
std::string ClassifierBankToJson(const ClassifierBank& bank);

// w_text / |w_text| + w_img / |w_img|. Zero inputs are a ParameterError and
// a result with norm below 1e-6 (antipodal inputs) is a DataError.
Embedding FuseMultimodal(std::span<const float> text, std::span<const float> image);

// Normalized component-wise mean of exemplar embeddings.
Embedding MeanBaseline(std::span<const Embedding> exemplars);

}  // namespace ovc

#endif  // OVC_FUSION_HPP_
