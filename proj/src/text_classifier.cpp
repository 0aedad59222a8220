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

#include "ovc/text_classifier.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ovc/binary_io.hpp"
#include "ovc/error.hpp"
#include "ovc/vector_ops.hpp"

namespace ovc {

using nlohmann::json;

namespace {

std::size_t CountOccurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

void ReplaceFirst(std::string& text, std::string_view needle, std::string_view with) {
  const std::size_t pos = text.find(needle);
  if (pos != std::string::npos) text.replace(pos, needle.size(), with);
}

// Words whose spelling and sound disagree on the leading vowel.
constexpr std::array<std::string_view, 5> kSilentH = {"hour", "honest", "honor",
                                                      "honour", "heir"};
constexpr std::array<std::string_view, 11> kConsonantSoundVowel = {
    "uni", "use", "usu", "ute", "ure", "uri", "uku", "eu", "ewe", "one", "once"};

}  // namespace

PromptTemplate::PromptTemplate(std::string pattern) : pattern_(std::move(pattern)) {
  const std::size_t slots = CountOccurrences(pattern_, kSlot);
  if (slots != 1) {
    throw ConfigError("prompt template must contain exactly one " +
                      std::string(kSlot) + " slot, found " + std::to_string(slots));
  }
}

std::string PromptTemplate::Render(std::string_view class_name) const {
  if (class_name.empty()) throw ParameterError("render_prompt: empty class name");
  std::string out = pattern_;
  ReplaceFirst(out, kArticle, IndefiniteArticle(class_name));
  ReplaceFirst(out, kSlot, class_name);
  return out;
}

std::string RenderPrompt(const PromptTemplate& tmpl, std::string_view class_name) {
  return tmpl.Render(class_name);
}

std::string_view IndefiniteArticle(std::string_view phrase) {
  std::string word;
  for (char ch : phrase) {
    if (ch == ' ') {
      if (word.empty()) continue;
      break;
    }
    word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (word.empty()) return "a";

  // A lone letter such as the "x" in "x-ray" is read by its name.
  const std::size_t segment = word.find_first_of("-.");
  if ((segment == 1 || word.size() == 1) && std::isalpha(static_cast<unsigned char>(word[0]))) {
    constexpr std::string_view kVowelSoundLetters = "aefhilmnorsx";
    return kVowelSoundLetters.find(word[0]) != std::string_view::npos ? "an" : "a";
  }
  for (std::string_view prefix : kSilentH) {
    if (word.starts_with(prefix)) return "an";
  }
  for (std::string_view prefix : kConsonantSoundVowel) {
    if (word.starts_with(prefix)) return "a";
  }
  constexpr std::string_view kVowels = "aeiou";
  return kVowels.find(word[0]) != std::string_view::npos ? "an" : "a";
}

std::vector<Embedding> DescriptionSet::Embeddings() const {
  std::vector<Embedding> out;
  for (const Description& d : descriptions) {
    if (d.embedding) out.push_back(*d.embedding);
  }
  return out;
}

std::map<std::string, DescriptionSet> ParseDescriptions(std::string_view jsonl) {
  std::map<std::string, DescriptionSet> sets;
  std::optional<std::size_t> dimension;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "descriptions line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(where + ": malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    for (const char* field : {"class", "text"}) {
      if (!obj.contains(field) || !obj[field].is_string()) {
        throw ValidationError(where + ": missing string field '" + field + "'");
      }
    }
    Description d;
    d.text = obj["text"].get<std::string>();
    const std::string cls = obj["class"].get<std::string>();
    if (cls.empty()) throw ValidationError(where + ": empty class id");
    if (d.text.empty()) throw ValidationError(where + ": empty description text");
    if (obj.contains("embedding") && !obj["embedding"].is_null()) {
      const json& e = obj["embedding"];
      if (!e.is_array()) throw ValidationError(where + ": 'embedding' must be an array");
      Embedding values;
      values.reserve(e.size());
      for (const json& v : e) {
        if (!v.is_number()) throw ValidationError(where + ": non-numeric embedding value");
        const float f = v.get<float>();
        if (!std::isfinite(f)) throw ValidationError(where + ": non-finite embedding value");
        values.push_back(f);
      }
      if (values.empty()) throw ValidationError(where + ": empty embedding");
      if (dimension && *dimension != values.size()) {
        throw ValidationError(where + ": embedding dimension " +
                              std::to_string(values.size()) + " differs from " +
                              std::to_string(*dimension));
      }
      dimension = values.size();
      d.embedding = std::move(values);
    }
    DescriptionSet& set = sets[cls];
    set.class_id = cls;
    set.descriptions.push_back(std::move(d));
  }
  return sets;
}

std::map<std::string, DescriptionSet> IngestDescriptions(
    const std::filesystem::path& path) {
  return ParseDescriptions(ReadTextFile(path));
}

Embedding BuildTextClassifier(std::span<const Embedding> embeddings) {
  return MeanOf(embeddings, "build_text_classifier");
}

}  // namespace ovc
