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

#ifndef OVC_VOCABULARY_HPP_
#define OVC_VOCABULARY_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ovc {

enum class FrequencyBucket { kRare, kCommon, kFrequent };

std::string_view BucketName(FrequencyBucket bucket);
FrequencyBucket ParseBucket(std::string_view name);

struct ClassEntry {
  std::string id;
  std::string name;
  std::optional<std::string> synset;
  FrequencyBucket bucket = FrequencyBucket::kFrequent;
  // Class has image-level weak labels (drives the APr-w / APr-z split).
  bool weak = false;

  friend bool operator==(const ClassEntry&, const ClassEntry&) = default;
};

// Ordered collection of classes with unique, nonempty ids. Iteration follows
// insertion order.
class Vocabulary {
 public:
  void Add(ClassEntry entry);

  const ClassEntry* Find(std::string_view id) const;
  const ClassEntry& at(std::string_view id) const;
  bool Contains(std::string_view id) const { return Find(id) != nullptr; }

  const std::vector<ClassEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<ClassEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// JSON lines: {"id", "name", "synset", "bucket", "weak"} per class.
Vocabulary ParseVocabulary(std::string_view jsonl);
std::string SerializeVocabulary(const Vocabulary& vocab);
Vocabulary LoadVocabulary(const std::filesystem::path& path);
void SaveVocabulary(const Vocabulary& vocab, const std::filesystem::path& path);

}  // namespace ovc

#endif  // OVC_VOCABULARY_HPP_
