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

// Coverage counts from a double loop over individually normalized tuples.

#ifndef CSKG_TESTS_COVERAGE_ORACLE_HPP_
#define CSKG_TESTS_COVERAGE_ORACLE_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cskg/cskg.hpp"

namespace cskg::testing {

struct Oracle {
  CoverageCounts overall;
  std::map<std::string, CoverageCounts> per_relation;
  std::size_t matched_keys = 0;
};

inline Oracle BruteForceCoverage(const KnowledgeGraph& source, const KnowledgeGraph& target,
                                 const RelationMapping& mapping, MatchMode mode, const NormalizerConfig& cfg) {
  const auto keys_of = [&](const Tuple& t) {
    std::vector<NormalizedKey> keys = NormalizeTuple(t, mapping, mode, cfg);
    if (!keys.empty() && keys[0].degenerate()) keys.clear();
    return keys;
  };
  std::vector<std::vector<NormalizedKey>> sk, tk;
  for (const auto& t : source.tuples()) sk.push_back(keys_of(t));
  for (const auto& t : target.tuples()) tk.push_back(keys_of(t));
  const auto rel = [](const NormalizedKey& k) { return k.relation.ToString(); };

  Oracle o;
  for (const auto& keys : sk) {
    if (keys.empty()) continue;
    ++o.overall.source_size;
    bool found = false;
    for (const auto& k : keys) {
      bool hit = false;
      for (const auto& other : tk) {
        for (const auto& k2 : other) hit = hit || k2 == k;
      }
      found = found || hit;
      o.overall.matched_source_keys += hit;
      auto& row = o.per_relation[rel(k)];
      ++row.source_size;
      row.matched_source_tuples += hit;
      row.matched_source_keys += hit;
    }
    o.overall.matched_source_tuples += found;
  }
  std::set<NormalizedKey> distinct;
  for (const auto& keys : tk) {
    if (keys.empty()) continue;
    ++o.overall.target_size;
    for (const auto& k : keys) {
      ++o.per_relation[rel(k)].target_size;
      distinct.insert(k);
    }
  }
  for (const auto& k : distinct) {
    bool hit = false;
    for (const auto& keys : sk) {
      for (const auto& k2 : keys) hit = hit || k2 == k;
    }
    ++o.overall.target_keys;
    o.overall.target_keys_hit += hit;
    ++o.per_relation[rel(k)].target_keys;
    o.per_relation[rel(k)].target_keys_hit += hit;
  }
  o.matched_keys = o.overall.target_keys_hit;
  return o;
}

}  // namespace cskg::testing

#endif  // CSKG_TESTS_COVERAGE_ORACLE_HPP_
