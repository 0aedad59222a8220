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

#include "ovc/exemplar_resolver.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>

#include "ovc/error.hpp"

namespace ovc {

using nlohmann::json;

PoolKind ParsePoolKind(std::string_view name) {
  if (name == "in21k") return PoolKind::kPrimarySynset;
  if (name == "detection-box") return PoolKind::kDetectionBox;
  if (name == "visualgenome") return PoolKind::kSecondarySynset;
  throw ConfigError("unknown source kind '" + std::string(name) + "'");
}

std::string_view PoolKindName(PoolKind kind) {
  switch (kind) {
    case PoolKind::kPrimarySynset: return "in21k";
    case PoolKind::kDetectionBox: return "detection-box";
    case PoolKind::kSecondarySynset: return "visualgenome";
  }
  return "in21k";
}

std::string_view TierName(ExemplarTier tier) {
  switch (tier) {
    case ExemplarTier::kFull: return "full";
    case ExemplarTier::kReduced: return "reduced";
    case ExemplarTier::kShortfall: return "shortfall";
  }
  return "shortfall";
}

namespace {

using KeyIndex = std::map<std::string, std::vector<std::string>, std::less<>>;

// key -> candidate ids in lexicographic order.
KeyIndex IndexPools(std::span<const CandidatePool> pools, PoolKind kind,
                    const ResolverConfig& config) {
  KeyIndex index;
  for (const CandidatePool& pool : pools) {
    if (pool.kind != kind) continue;
    for (const Candidate& c : pool.items) {
      if (c.id.empty()) throw ConfigError("candidate with empty id");
      if (kind == PoolKind::kDetectionBox) {
        if (!c.box_area) {
          throw ConfigError("detection-box candidate '" + c.id + "' has no area");
        }
        if (!(*c.box_area > config.min_box_area)) continue;
      }
      index[c.key].push_back(c.id);
    }
  }
  for (auto& [key, ids] : index) std::sort(ids.begin(), ids.end());
  return index;
}

const std::vector<std::string>* Lookup(const KeyIndex& index, std::string_view key) {
  auto it = index.find(key);
  return it == index.end() ? nullptr : &it->second;
}

}  // namespace

ExemplarCatalog ResolveExemplars(const Vocabulary& vocab,
                                 std::span<const CandidatePool> pools,
                                 const ResolverConfig& config) {
  if (config.min_reduced > config.min_full) {
    throw ConfigError("resolve_exemplars: min_reduced exceeds min_full");
  }
  const KeyIndex primary = IndexPools(pools, PoolKind::kPrimarySynset, config);
  const KeyIndex boxes = IndexPools(pools, PoolKind::kDetectionBox, config);
  const KeyIndex secondary = IndexPools(pools, PoolKind::kSecondarySynset, config);
  for (const auto& [cls, synsets] : config.aliases) {
    if (!vocab.Contains(cls)) {
      throw ConfigError("alias table names unknown class '" + cls + "'");
    }
  }

  ExemplarCatalog catalog;
  for (const ClassEntry& cls : vocab.entries()) {
    CatalogEntry entry;
    entry.class_id = cls.id;
    std::set<std::string, std::less<>> seen;

    auto take = [&](const std::vector<std::string>* ids, SourceTag tag) {
      if (ids == nullptr) return;
      std::size_t added = 0;
      for (const std::string& id : *ids) {
        if (!seen.insert(id).second) {
          ++catalog.duplicates_dropped;
          continue;
        }
        entry.exemplars.push_back(ExemplarRef{id, tag});
        ++added;
      }
      if (added > 0) {
        entry.per_source[tag] += added;
        entry.source = tag;
      }
    };
    auto full = [&] { return entry.exemplars.size() >= config.min_full; };

    if (cls.synset) take(Lookup(primary, *cls.synset), SourceTag::kIn21k);
    if (!full()) take(Lookup(boxes, cls.id), SourceTag::kDetectionBox);
    if (!full() && cls.synset) {
      take(Lookup(secondary, *cls.synset), SourceTag::kVisualGenome);
    }
    if (!full()) {
      auto alias = config.aliases.find(cls.id);
      if (alias != config.aliases.end()) {
        for (const std::string& synset : alias->second) {
          take(Lookup(primary, synset), SourceTag::kManualAlias);
        }
      }
    }

    entry.count = entry.exemplars.size();
    if (entry.count >= config.min_full) {
      entry.tier = ExemplarTier::kFull;
    } else if (entry.count >= config.min_reduced) {
      entry.tier = ExemplarTier::kReduced;
    } else {
      entry.tier = ExemplarTier::kShortfall;
      catalog.shortfall.push_back(ShortfallEntry{cls.id, entry.count, entry.per_source});
    }
    catalog.classes.emplace(cls.id, std::move(entry));
  }
  return catalog;
}

ResolverInput ParseResolverInput(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("resolver config: ") + e.what());
  }
  ResolverInput input;
  try {
    ResolverConfig& cfg = input.config;
    cfg.min_full = doc.value("min_full", cfg.min_full);
    cfg.min_reduced = doc.value("min_reduced", cfg.min_reduced);
    cfg.min_box_area = doc.value("min_box_area", cfg.min_box_area);
    if (doc.contains("aliases")) {
      for (const auto& [cls, synsets] : doc["aliases"].items()) {
        cfg.aliases[cls] = synsets.get<std::vector<std::string>>();
      }
    }
    for (const json& p : doc.value("pools", json::array())) {
      CandidatePool pool;
      pool.kind = ParsePoolKind(p.at("kind").get<std::string>());
      for (const json& item : p.value("items", json::array())) {
        Candidate c;
        c.id = item.at("id").get<std::string>();
        if (pool.kind == PoolKind::kDetectionBox) {
          c.key = item.at("class").get<std::string>();
          if (item.contains("area")) c.box_area = item["area"].get<double>();
        } else {
          c.key = item.at("synset").get<std::string>();
        }
        pool.items.push_back(std::move(c));
      }
      input.pools.push_back(std::move(pool));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("resolver config: ") + e.what());
  }
  return input;
}

namespace {

json PerSourceJson(const std::map<SourceTag, std::size_t>& per_source) {
  json obj = json::object();
  for (const auto& [tag, n] : per_source) obj[std::string(SourceName(tag))] = n;
  return obj;
}

std::map<SourceTag, std::size_t> PerSourceFromJson(const json& obj) {
  std::map<SourceTag, std::size_t> out;
  for (const auto& [name, n] : obj.items()) out[ParseSource(name)] = n.get<std::size_t>();
  return out;
}

ExemplarTier ParseTier(std::string_view name) {
  if (name == "full") return ExemplarTier::kFull;
  if (name == "reduced") return ExemplarTier::kReduced;
  if (name == "shortfall") return ExemplarTier::kShortfall;
  throw ValidationError("unknown tier '" + std::string(name) + "'");
}

}  // namespace

std::string CatalogToJson(const ExemplarCatalog& catalog) {
  json classes = json::array();
  for (const auto& [id, e] : catalog.classes) {
    json exemplars = json::array();
    for (const ExemplarRef& ref : e.exemplars) {
      exemplars.push_back({{"id", ref.id}, {"source", SourceName(ref.source)}});
    }
    classes.push_back({{"class", id},
                       {"tier", TierName(e.tier)},
                       {"count", e.count},
                       {"source", e.source ? json(SourceName(*e.source)) : json(nullptr)},
                       {"per_source", PerSourceJson(e.per_source)},
                       {"exemplars", std::move(exemplars)}});
  }
  json shortfall = json::array();
  for (const ShortfallEntry& s : catalog.shortfall) {
    shortfall.push_back({{"class", s.class_id},
                         {"count", s.count},
                         {"per_source", PerSourceJson(s.per_source)}});
  }
  json doc = {{"classes", std::move(classes)},
              {"shortfall", std::move(shortfall)},
              {"duplicates_dropped", catalog.duplicates_dropped}};
  return doc.dump(2) + "\n";
}

ExemplarCatalog CatalogFromJson(std::string_view json_text) {
  ExemplarCatalog catalog;
  try {
    const json doc = json::parse(json_text);
    for (const json& c : doc.at("classes")) {
      CatalogEntry e;
      e.class_id = c.at("class").get<std::string>();
      e.tier = ParseTier(c.at("tier").get<std::string>());
      if (!c.at("source").is_null()) e.source = ParseSource(c["source"].get<std::string>());
      e.per_source = PerSourceFromJson(c.at("per_source"));
      for (const json& x : c.at("exemplars")) {
        e.exemplars.push_back(ExemplarRef{x.at("id").get<std::string>(),
                                          ParseSource(x.at("source").get<std::string>())});
      }
      e.count = e.exemplars.size();
      if (c.at("count").get<std::size_t>() != e.count) {
        throw ValidationError("catalog: count of '" + e.class_id +
                              "' disagrees with its exemplar list");
      }
      catalog.classes.emplace(e.class_id, std::move(e));
    }
    for (const json& s : doc.value("shortfall", json::array())) {
      catalog.shortfall.push_back(ShortfallEntry{s.at("class").get<std::string>(),
                                                 s.at("count").get<std::size_t>(),
                                                 PerSourceFromJson(s.at("per_source"))});
    }
    catalog.duplicates_dropped = doc.value("duplicates_dropped", std::size_t{0});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("catalog: ") + e.what());
  }
  return catalog;
}

}  // namespace ovc
