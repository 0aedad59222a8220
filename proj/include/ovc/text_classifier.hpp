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

#ifndef OVC_TEXT_CLASSIFIER_HPP_
#define OVC_TEXT_CLASSIFIER_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovc/embedding_bank.hpp"

namespace ovc {

// Question template with a "{class name}" slot and an optional "a(n)"
// article marker that is resolved per class name.
class PromptTemplate {
 public:
  static constexpr std::string_view kDefaultPattern =
      "What does a(n) {class name} look like?";
  static constexpr std::string_view kSlot = "{class name}";
  static constexpr std::string_view kArticle = "a(n)";

  PromptTemplate() : PromptTemplate(std::string(kDefaultPattern)) {}
  // Throws ConfigError unless the pattern holds exactly one slot.
  explicit PromptTemplate(std::string pattern);

  const std::string& pattern() const { return pattern_; }

  std::string Render(std::string_view class_name) const;

 private:
  std::string pattern_;
};

// "a" or "an" for the given noun phrase.
std::string_view IndefiniteArticle(std::string_view phrase);

std::string RenderPrompt(const PromptTemplate& tmpl, std::string_view class_name);

struct Description {
  std::string text;
  std::optional<Embedding> embedding;
};

struct DescriptionSet {
  std::string class_id;
  std::vector<Description> descriptions;
  std::size_t target_count = 10;

  std::vector<Embedding> Embeddings() const;
};

// Descriptions JSONL: {"class": str, "text": str, "embedding": [..] | null}.
// Classes come back sorted by id; within a class, file order is kept.
std::map<std::string, DescriptionSet> ParseDescriptions(std::string_view jsonl);
std::map<std::string, DescriptionSet> IngestDescriptions(
    const std::filesystem::path& path);

// Plain mean of the raw encodings; the result is not normalized.
Embedding BuildTextClassifier(std::span<const Embedding> embeddings);

}  // namespace ovc

#endif  // OVC_TEXT_CLASSIFIER_HPP_
