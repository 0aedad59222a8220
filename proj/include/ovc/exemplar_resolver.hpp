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

#ifndef OVC_EXEMPLAR_RESOLVER_HPP_
#define OVC_EXEMPLAR_RESOLVER_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovc/embedding_bank.hpp"
#include "ovc/vocabulary.hpp"

namespace ovc {

// Candidate pools, consulted in this order regardless of how they are
// listed: primary synset pool, detection boxes, secondary synset pool, then
// the manual alias table (which draws from the primary synset pool).
enum class PoolKind { kPrimarySynset, kDetectionBox, kSecondarySynset };

PoolKind ParsePoolKind(std::string_view name);
std::string_view PoolKindName(PoolKind kind);

struct Candidate {
  // Opaque exemplar identifier (an image or box id).
  std::string id;
  // Synset for synset pools, class id for detection boxes.
  std::string key;
  // Box area in square pixels, required for detection boxes.
  std::optional<double> box_area;
};

struct CandidatePool {
  PoolKind kind = PoolKind::kPrimarySynset;
  std::vector<Candidate> items;
};

struct ResolverConfig {
  std::size_t min_full = 40;
  std::size_t min_reduced = 10;
  // Boxes must be strictly larger than this.
  double min_box_area = 32.0 * 32.0;
  // Class id -> substitute synsets looked up in the primary pool.
  std::map<std::string, std::vector<std::string>> aliases;
};

enum class ExemplarTier { kFull, kReduced, kShortfall };

std::string_view TierName(ExemplarTier tier);

struct ExemplarRef {
  std::string id;
  SourceTag source = SourceTag::kIn21k;

  friend bool operator==(const ExemplarRef&, const ExemplarRef&) = default;
};

struct CatalogEntry {
  std::string class_id;
  // Source that completed the cascade (the last one contributing).
  std::optional<SourceTag> source;
  std::size_t count = 0;
  ExemplarTier tier = ExemplarTier::kShortfall;
  std::vector<ExemplarRef> exemplars;
  std::map<SourceTag, std::size_t> per_source;
};

struct ShortfallEntry {
  std::string class_id;
  std::size_t count = 0;
  std::map<SourceTag, std::size_t> per_source;
};

struct ExemplarCatalog {
  // Keyed by class id; one entry per vocabulary class.
  std::map<std::string, CatalogEntry> classes;
  std::vector<ShortfallEntry> shortfall;
  // Exemplar ids seen more than once for the same class.
  std::size_t duplicates_dropped = 0;
};

// Accumulates exemplars per class through the pool cascade. The cascade
// stops at the first source after which the class holds at least
// `min_full` exemplars; otherwise every source is used and the tier is
// reduced (>= min_reduced) or shortfall.
ExemplarCatalog ResolveExemplars(const Vocabulary& vocab,
                                 std::span<const CandidatePool> pools,
                                 const ResolverConfig& config = {});

// JSON config: {"pools": [{"kind": ..., "items": [{"id", "synset"|"class",
// "area"}]}], "aliases": {class: [synset, ...]}, "min_full", "min_reduced",
// "min_box_area"}.
struct ResolverInput {
  std::vector<CandidatePool> pools;
  ResolverConfig config;
};
ResolverInput ParseResolverInput(std::string_view json_text);

std::string CatalogToJson(const ExemplarCatalog& catalog);
ExemplarCatalog CatalogFromJson(std::string_view json_text);

}  // namespace ovc

#endif  // OVC_EXEMPLAR_RESOLVER_HPP_
