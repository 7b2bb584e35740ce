// Copyright 2026 The cskg Authors.
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

// Domain types shared by every module: relation identifiers, tuples, the
// relation registry, cross-KG relation mappings and the in-memory KG handle.

#ifndef CSKG_KG_CORE_HPP_
#define CSKG_KG_CORE_HPP_

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cskg/common.hpp"
#include "cskg/embedded_data.hpp"

namespace cskg {

// Well-known KG identifiers.
namespace kg {
inline constexpr std::string_view kAtomic2020 = "atomic2020";
inline constexpr std::string_view kAtomic = "atomic";
inline constexpr std::string_view kConceptNet = "conceptnet";
inline constexpr std::string_view kTransOmcs = "transomcs";
}  // namespace kg

struct RelationId {
  std::string kg;
  std::string name;

  friend auto operator<=>(const RelationId&, const RelationId&) = default;
  friend bool operator==(const RelationId&, const RelationId&) = default;

  std::string ToString() const { return kg + ":" + name; }
};

struct RelationIdHash {
  std::size_t operator()(const RelationId& id) const {
    return std::hash<std::string>()(id.kg) * 31 + std::hash<std::string>()(id.name);
  }
};

enum class Category { kPhysicalEntity, kEventCentered, kSocialInteraction, kOther };

inline std::string_view ToString(Category c) {
  switch (c) {
    case Category::kPhysicalEntity: return "physical-entity";
    case Category::kEventCentered: return "event-centered";
    case Category::kSocialInteraction: return "social-interaction";
    case Category::kOther: return "other";
  }
  return "other";
}

inline std::optional<Category> ParseCategory(std::string_view s) {
  if (s == "physical-entity") return Category::kPhysicalEntity;
  if (s == "event-centered") return Category::kEventCentered;
  if (s == "social-interaction") return Category::kSocialInteraction;
  if (s == "other") return Category::kOther;
  return std::nullopt;
}

enum class Split { kTrain, kDev, kTest };

inline std::string_view ToString(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

inline std::optional<Split> ParseSplit(std::string_view s) {
  s = Trim(s);
  if (s == "train" || s == "trn") return Split::kTrain;
  if (s == "dev" || s == "valid" || s == "validation" || s == "val") return Split::kDev;
  if (s == "test" || s == "tst") return Split::kTest;
  return std::nullopt;
}

// One (head, relation, tail) assertion.
struct Tuple {
  std::string head;
  RelationId relation;
  std::string tail;
  std::optional<double> weight;  // edge weight or extraction confidence
  std::string source;            // KG identifier
  std::optional<Split> split;
  std::string id;

  friend bool operator==(const Tuple&, const Tuple&) = default;
};

// Returns an empty string when the tuple satisfies the Tuple invariants,
// otherwise a description of the first violation.
inline std::string CheckTuple(const Tuple& t) {
  if (Trim(t.head).empty()) return "empty head";
  if (Trim(t.tail).empty()) return "empty tail";
  if (t.relation.name.empty() || HasWhitespace(t.relation.name)) return "bad relation name";
  if (t.weight && !(*t.weight >= 0.0)) return "negative weight";
  return {};
}

enum class MatchMode { kPrimaryOnly, kAllTargets };

inline std::string_view ToString(MatchMode m) {
  return m == MatchMode::kPrimaryOnly ? "primary-only" : "all-targets";
}

inline std::optional<MatchMode> ParseMatchMode(std::string_view s) {
  if (s == "primary-only" || s == "primary") return MatchMode::kPrimaryOnly;
  if (s == "all-targets" || s == "all") return MatchMode::kAllTargets;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// RelationMapping

struct MappingEntry {
  RelationId source;
  std::vector<RelationId> targets;
  RelationId primary;
};

// Alignment from each KG's relation vocabulary into the shared ATOMIC-2020
// space. Multi-target entries match on any target; the primary target is
// used where a single answer is needed.
class RelationMapping {
 public:
  RelationMapping() = default;
  explicit RelationMapping(std::vector<MappingEntry> entries) : entries_(std::move(entries)) {
    Reindex();
  }

  const std::vector<MappingEntry>& entries() const { return entries_; }

  const MappingEntry* Find(const RelationId& source) const {
    const auto it = index_.find(source);
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  // Target relations for `source` under `mode`; empty when unmapped.
  std::vector<RelationId> Targets(const RelationId& source, MatchMode mode) const {
    const MappingEntry* e = Find(source);
    if (e == nullptr) return {};
    if (mode == MatchMode::kPrimaryOnly) return {e->primary};
    return e->targets;
  }

  // Tabular form: source-kg, source-rel, target-rel, is-primary. Targets may
  // be written "kg:name"; a bare name lives in atomic2020.
  static RelationMapping Parse(std::string_view text, std::string_view origin = "mapping") {
    std::vector<MappingEntry> entries;
    std::map<RelationId, std::size_t> pos;
    ForEachDataLine(text, [&](std::size_t line_no, const std::vector<std::string_view>& f) {
      const std::string locus = std::string(origin) + ":" + std::to_string(line_no);
      if (f.size() != 4) {
        throw Error("kg_core", "mapping row needs 4 tab-separated fields", locus,
                    "columns are source-kg, source-rel, target-rel, is-primary");
      }
      RelationId source{std::string(Trim(f[0])), std::string(Trim(f[1]))};
      RelationId target = ParseTarget(Trim(f[2]));
      const std::string_view flag = Trim(f[3]);
      if (flag != "0" && flag != "1") {
        throw Error("kg_core", "is-primary flag must be 0 or 1", locus);
      }
      auto [it, inserted] = pos.try_emplace(source, entries.size());
      if (inserted) entries.push_back(MappingEntry{source, {}, {}});
      MappingEntry& e = entries[it->second];
      e.targets.push_back(target);
      if (flag == "1") {
        if (!e.primary.name.empty()) {
          throw Error("kg_core", "more than one primary target for " + source.ToString(), locus);
        }
        e.primary = target;
      }
    });
    return RelationMapping(std::move(entries));
  }

  std::string Serialize() const {
    std::string out = "# source-kg\tsource-rel\ttarget-rel\tis-primary\n";
    for (const auto& e : entries_) {
      for (const auto& t : e.targets) {
        out += e.source.kg + "\t" + e.source.name + "\t";
        out += t.kg == kg::kAtomic2020 ? t.name : t.ToString();
        out += t == e.primary ? "\t1\n" : "\t0\n";
      }
    }
    return out;
  }

  std::string DigestHex() const { return Digest().Add(Serialize()).hex(); }

 private:
  static RelationId ParseTarget(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) return {std::string(kg::kAtomic2020), std::string(s)};
    return {std::string(s.substr(0, colon)), std::string(s.substr(colon + 1))};
  }

  void Reindex() {
    index_.clear();
    for (std::size_t i = 0; i < entries_.size(); ++i) index_.try_emplace(entries_[i].source, i);
  }

  std::vector<MappingEntry> entries_;
  std::unordered_map<RelationId, std::size_t, RelationIdHash> index_;
};

// ---------------------------------------------------------------------------
// RelationRegistry

class RelationRegistry {
 public:
  // Adds a relation; throws on an invalid name or a duplicate (kg, name).
  void Add(const RelationId& id, Category category) {
    if (id.kg.empty() || id.name.empty() || HasWhitespace(id.name)) {
      throw Error("kg_core", "invalid relation id '" + id.ToString() + "'");
    }
    if (!categories_.emplace(id, category).second) {
      throw Error("kg_core", "duplicate relation " + id.ToString());
    }
    by_kg_[id.kg].push_back(id.name);
  }

  void AddAlias(std::string alias, std::string canonical) {
    aliases_[std::move(alias)] = std::move(canonical);
  }

  bool Contains(const RelationId& id) const { return categories_.count(id) != 0; }

  // Exact name first, then the alias table.
  std::optional<RelationId> Resolve(std::string_view kg, std::string_view name) const {
    RelationId id{std::string(kg), std::string(name)};
    if (Contains(id)) return id;
    const auto it = aliases_.find(id.name);
    if (it != aliases_.end()) {
      id.name = it->second;
      if (Contains(id)) return id;
    }
    return std::nullopt;
  }

  // Canonical spelling of a relation name regardless of KG.
  std::string Canonical(std::string_view name) const {
    const auto it = aliases_.find(std::string(name));
    return it == aliases_.end() ? std::string(name) : it->second;
  }

  std::optional<Category> CategoryOf(const RelationId& id) const {
    const auto it = categories_.find(id);
    if (it == categories_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<RelationId> Relations(std::string_view kg) const {
    std::vector<RelationId> out;
    const auto it = by_kg_.find(std::string(kg));
    if (it == by_kg_.end()) return out;
    for (const auto& name : it->second) out.push_back({std::string(kg), name});
    return out;
  }

  std::vector<RelationId> AllRelations() const {
    std::vector<RelationId> out;
    for (const auto& [id, cat] : categories_) out.push_back(id);
    return out;
  }

  std::vector<std::string> Kgs() const {
    std::vector<std::string> out;
    for (const auto& [kg, names] : by_kg_) out.push_back(kg);
    return out;
  }

  const std::map<RelationId, Category>& categories() const { return categories_; }
  const std::map<std::string, std::string>& aliases() const { return aliases_; }

  void set_mapping(std::shared_ptr<const RelationMapping> mapping) { mapping_ = std::move(mapping); }
  const RelationMapping& mapping() const {
    static const RelationMapping empty;
    return mapping_ ? *mapping_ : empty;
  }
  std::shared_ptr<const RelationMapping> mapping_ptr() const { return mapping_; }

  // Relation rows in registration order: kg, relation, category.
  std::string Serialize() const {
    std::string out = "# kg\trelation\tcategory\n";
    for (const auto& [kg, names] : by_kg_) {
      for (const auto& name : names) {
        out += kg + "\t" + name + "\t" + std::string(ToString(categories_.at({kg, name}))) + "\n";
      }
    }
    return out;
  }

  static RelationRegistry Parse(std::string_view relations, std::string_view aliases = {},
                                std::string_view origin = "relations") {
    RelationRegistry reg;
    ForEachDataLine(relations, [&](std::size_t line_no, const std::vector<std::string_view>& f) {
      const std::string locus = std::string(origin) + ":" + std::to_string(line_no);
      if (f.size() != 3) throw Error("kg_core", "registry row needs kg, relation, category", locus);
      const auto cat = ParseCategory(Trim(f[2]));
      if (!cat) throw Error("kg_core", "unknown category '" + std::string(f[2]) + "'", locus);
      reg.Add({std::string(Trim(f[0])), std::string(Trim(f[1]))}, *cat);
    });
    ForEachDataLine(aliases, [&](std::size_t line_no, const std::vector<std::string_view>& f) {
      if (f.size() != 2) {
        throw Error("kg_core", "alias row needs alias, canonical", "aliases:" + std::to_string(line_no));
      }
      reg.AddAlias(std::string(Trim(f[0])), std::string(Trim(f[1])));
    });
    return reg;
  }

 private:
  std::map<RelationId, Category> categories_;
  std::map<std::string, std::vector<std::string>> by_kg_;
  std::map<std::string, std::string> aliases_;
  std::shared_ptr<const RelationMapping> mapping_;
};

// The shipped registry: 23 ATOMIC-2020 relations with categories, the 9
// ATOMIC relations, the ConceptNet relations used in alignment and
// verbalization (mirrored for TransOMCS), with the default mapping attached.
inline std::shared_ptr<const RelationRegistry> LoadDefaultRegistries() {
  static const std::shared_ptr<const RelationRegistry> shared = [] {
    auto reg = std::make_shared<RelationRegistry>(
        RelationRegistry::Parse(embedded::relations_tsv, embedded::relation_aliases_tsv));
    reg->set_mapping(std::make_shared<RelationMapping>(
        RelationMapping::Parse(embedded::mapping_tsv, "mapping.tsv")));
    return std::shared_ptr<const RelationRegistry>(std::move(reg));
  }();
  return shared;
}

// Empty iff every source and target resolves in `registry` and the mapping
// invariants hold (primary among targets, each source listed once).
inline std::vector<std::string> ValidateMapping(const RelationMapping& mapping,
                                                const RelationRegistry& registry) {
  std::vector<std::string> violations;
  std::set<RelationId> seen;
  for (const auto& e : mapping.entries()) {
    const std::string where = "entry " + e.source.ToString();
    if (!seen.insert(e.source).second) violations.push_back(where + ": source listed more than once");
    if (!registry.Contains(e.source)) violations.push_back(where + ": unknown source relation");
    if (e.targets.empty()) violations.push_back(where + ": no targets");
    for (const auto& t : e.targets) {
      if (!registry.Contains(t)) violations.push_back(where + ": unknown target " + t.ToString());
    }
    if (std::find(e.targets.begin(), e.targets.end(), e.primary) == e.targets.end()) {
      violations.push_back(where + ": primary " + e.primary.ToString() + " is not among targets");
    }
  }
  return violations;
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

// Append-only during ingestion, read-only after Freeze().
class KnowledgeGraph {
 public:
  KnowledgeGraph(std::string id, std::shared_ptr<const RelationRegistry> registry)
      : id_(std::move(id)), registry_(std::move(registry)) {}

  void Add(Tuple t) {
    if (frozen_) throw Error("kg_core", "knowledge graph '" + id_ + "' is frozen");
    if (t.relation.kg != id_) {
      throw Error("kg_core", "tuple " + t.id + " has relation from '" + t.relation.kg +
                                 "' in knowledge graph '" + id_ + "'");
    }
    if (!ids_.insert(t.id).second) throw Error("kg_core", "duplicate tuple id " + t.id);
    tuples_.push_back(std::move(t));
  }

  void Freeze() {
    frozen_ = true;
    ids_.clear();
  }

  const std::string& id() const { return id_; }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  bool frozen() const { return frozen_; }
  const RelationRegistry& registry() const { return *registry_; }
  std::shared_ptr<const RelationRegistry> registry_ptr() const { return registry_; }

 private:
  std::string id_;
  std::shared_ptr<const RelationRegistry> registry_;
  std::vector<Tuple> tuples_;
  std::unordered_set<std::string> ids_;
  bool frozen_ = false;
};

}  // namespace cskg

#endif  // CSKG_KG_CORE_HPP_
