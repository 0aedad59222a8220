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

#include "ovc/vocabulary.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

#include "ovc/binary_io.hpp"
#include "ovc/error.hpp"

namespace ovc {

using nlohmann::json;

std::string_view BucketName(FrequencyBucket bucket) {
  switch (bucket) {
    case FrequencyBucket::kRare: return "rare";
    case FrequencyBucket::kCommon: return "common";
    case FrequencyBucket::kFrequent: return "frequent";
  }
  return "frequent";
}

FrequencyBucket ParseBucket(std::string_view name) {
  if (name == "rare" || name == "r") return FrequencyBucket::kRare;
  if (name == "common" || name == "c") return FrequencyBucket::kCommon;
  if (name == "frequent" || name == "f") return FrequencyBucket::kFrequent;
  throw ValidationError("unknown frequency bucket '" + std::string(name) + "'");
}

void Vocabulary::Add(ClassEntry entry) {
  if (entry.id.empty()) throw ValidationError("vocabulary: empty class id");
  if (index_.count(entry.id) != 0) {
    throw ValidationError("vocabulary: duplicate class id '" + entry.id + "'");
  }
  index_.emplace(entry.id, entries_.size());
  entries_.push_back(std::move(entry));
}

const ClassEntry* Vocabulary::Find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const ClassEntry& Vocabulary::at(std::string_view id) const {
  const ClassEntry* e = Find(id);
  if (e == nullptr) throw LookupError("unknown class '" + std::string(id) + "'");
  return *e;
}

Vocabulary ParseVocabulary(std::string_view jsonl) {
  Vocabulary vocab;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "vocabulary line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string()) {
      throw ValidationError(where + ": missing string field 'id'");
    }
    ClassEntry entry;
    try {
      entry.id = obj["id"].get<std::string>();
      entry.name = obj.value("name", entry.id);
      if (obj.contains("synset") && !obj["synset"].is_null()) {
        entry.synset = obj["synset"].get<std::string>();
      }
      if (obj.contains("bucket")) {
        entry.bucket = ParseBucket(obj["bucket"].get<std::string>());
      }
      entry.weak = obj.value("weak", false);
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    try {
      vocab.Add(std::move(entry));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return vocab;
}

std::string SerializeVocabulary(const Vocabulary& vocab) {
  std::string out;
  for (const ClassEntry& e : vocab.entries()) {
    json obj;
    obj["id"] = e.id;
    obj["name"] = e.name;
    obj["synset"] = e.synset ? json(*e.synset) : json(nullptr);
    obj["bucket"] = std::string(BucketName(e.bucket));
    obj["weak"] = e.weak;
    out += obj.dump() + "\n";
  }
  return out;
}

Vocabulary LoadVocabulary(const std::filesystem::path& path) {
  return ParseVocabulary(ReadTextFile(path));
}

void SaveVocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeVocabulary(vocab));
}

}  // namespace ovc
