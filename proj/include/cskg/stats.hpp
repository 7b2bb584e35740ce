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

// Per-relation and per-category tuple counts of a KG.

#ifndef CSKG_STATS_HPP_
#define CSKG_STATS_HPP_

#include <map>
#include <string>

#include "cskg/kg_core.hpp"
#include "json.hpp"

namespace cskg {

struct KgStats {
  std::string kg;
  std::map<std::string, std::size_t> per_relation;
  std::map<std::string, std::size_t> per_category;
  std::size_t total = 0;
  std::size_t unknown_relations = 0;  // tuples whose relation is not in the registry

  nlohmann::ordered_json ToJson() const {
    nlohmann::ordered_json j;
    j["kg"] = kg;
    j["per_relation"] = per_relation;
    j["per_category"] = per_category;
    j["total"] = total;
    j["unknown_relations"] = unknown_relations;
    return j;
  }

  std::string ToTsv() const {
    std::string out = "relation\tcategory\tcount\n";
    for (const auto& [rel, n] : per_relation) out += rel + "\t\t" + std::to_string(n) + "\n";
    for (const auto& [cat, n] : per_category) out += "\t" + cat + "\t" + std::to_string(n) + "\n";
    out += "TOTAL\t\t" + std::to_string(total) + "\n";
    return out;
  }
};

// Unknown relations are counted under their own name and rolled up as "other".
inline KgStats ComputeStats(const KnowledgeGraph& kg) {
  KgStats s;
  s.kg = kg.id();
  for (const auto& t : kg.tuples()) {
    ++s.total;
    ++s.per_relation[t.relation.name];
    const auto cat = kg.registry().CategoryOf(t.relation);
    if (!cat) ++s.unknown_relations;
    ++s.per_category[std::string(ToString(cat.value_or(Category::kOther)))];
  }
  return s;
}

}  // namespace cskg

#endif  // CSKG_STATS_HPP_
