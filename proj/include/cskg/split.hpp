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

// Head-disjoint train/dev/test splits with an eval-head frequency cap,
// confidence filtering and optional inheritance of upstream split tags.

#ifndef CSKG_SPLIT_HPP_
#define CSKG_SPLIT_HPP_

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cskg/common.hpp"
#include "cskg/kg_core.hpp"
#include "cskg/normalize.hpp"
#include "json.hpp"

namespace cskg {

inline constexpr std::array<Split, 3> kAllSplits = {Split::kTrain, Split::kDev, Split::kTest};

struct SplitConfig {
  // ATOMIC-2020 proportions: 1,076,880 / 102,024 / 152,209 of 1,331,113.
  std::array<double, 3> ratios = {1076880.0 / 1331113.0, 102024.0 / 1331113.0, 152209.0 / 1331113.0};
  std::size_t max_head_tuples_eval = 500;
  std::optional<double> min_confidence;
  std::uint64_t seed = 13;
  bool preserve_upstream = false;

  static SplitConfig TransOmcsPreset() {
    SplitConfig c;
    c.min_confidence = 0.5;
    return c;
  }

  void Validate() const {
    double sum = 0.0;
    for (double r : ratios) {
      if (!(r > 0.0)) throw Error("split", "every split ratio must be > 0", {}, "e.g. --ratios 0.8,0.1,0.1");
      sum += r;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw Error("split", "split ratios sum to " + FormatFixed(sum, 12) + ", not 1", {}, "e.g. --ratios 0.8,0.1,0.1");
    }
    if (max_head_tuples_eval < 1) throw Error("split", "eval head cap must be >= 1");
    if (min_confidence && !(*min_confidence >= 0.0)) throw Error("split", "min confidence must be >= 0");
  }

  bool Keeps(const Tuple& t) const {
    if (!min_confidence) return true;
    return t.weight && *t.weight >= *min_confidence;
  }

  std::string DigestHex() const {
    Digest d;
    for (double r : ratios) d.Add(FormatFixed(r, 12));
    d.Add(max_head_tuples_eval).Add(min_confidence ? FormatFixed(*min_confidence, 12) : "none");
    d.Add(seed).Add(preserve_upstream ? "preserve" : "fresh");
    return d.hex();
  }
};

struct SplitResult {
  std::vector<std::pair<std::string, Split>> assignment;  // tuple id -> split, KG order
  std::map<std::string, Split> head_partition;            // normalized head key -> split
  std::array<std::size_t, 3> counts = {0, 0, 0};
  std::size_t dropped_low_confidence = 0;
  std::size_t capped_heads = 0;      // heads forced to train by the cap
  std::size_t preserved_heads = 0;   // heads that inherited an upstream tag
  std::size_t conflicting_heads = 0; // heads with several upstream tags, sent to train
  std::vector<std::string> warnings;

  std::array<double, 3> achieved_ratios() const {
    const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
    std::array<double, 3> out{0, 0, 0};
    if (total == 0) return out;
    for (int s = 0; s < 3; ++s) out[s] = static_cast<double>(counts[s]) / total;
    return out;
  }

  nlohmann::ordered_json SummaryJson() const {
    nlohmann::ordered_json j;
    for (Split s : kAllSplits) j["counts"][std::string(ToString(s))] = counts[static_cast<int>(s)];
    const auto r = achieved_ratios();
    for (Split s : kAllSplits) j["achieved_ratios"][std::string(ToString(s))] = r[static_cast<int>(s)];
    j["dropped_low_confidence"] = dropped_low_confidence;
    j["heads"] = head_partition.size();
    j["capped_heads"] = capped_heads;
    j["preserved_heads"] = preserved_heads;
    j["conflicting_heads"] = conflicting_heads;
    j["head_identity"] = "normalized head key";
    j["warnings"] = warnings;
    return j;
  }

  // One {"id","split"} object per line, KG order.
  std::string AssignmentJsonl() const {
    std::string out;
    for (const auto& [id, s] : assignment) {
      out += nlohmann::json{{"id", id}, {"split", ToString(s)}}.dump();
      out += '\n';
    }
    return out;
  }
};

namespace detail {

inline std::string HeadKey(const Tuple& t, const NormalizerConfig& normalizer) {
  return NormalizeConcept(t.head, t.relation.kg, normalizer);
}

}  // namespace detail

// (1) drop tuples below min_confidence, (2) group by normalized head,
// (3) heads above the eval cap go to train, (4) optionally inherit upstream
// tags (conflicts go to train), (5) shuffle the remaining heads (sorted
// first, then seeded) and give each to the split furthest below its target
// tuple count.
inline SplitResult MakeAdversarialSplit(const KnowledgeGraph& kg, const SplitConfig& config,
                                        const NormalizerConfig& normalizer, unsigned workers = 0) {
  config.Validate();
  const auto& tuples = kg.tuples();
  SplitResult result;

  std::vector<std::string> keys(tuples.size());
  std::vector<char> kept(tuples.size(), 0);
  ParallelShards(tuples.size(), workers, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (!config.Keeps(tuples[i])) continue;
      kept[i] = 1;
      keys[i] = detail::HeadKey(tuples[i], normalizer);
    }
  });

  struct Group {
    std::size_t size = 0;
    unsigned upstream = 0;  // bitmask of upstream split tags
    std::optional<Split> split;
  };
  std::unordered_map<std::string, Group> groups;
  std::size_t total = 0;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (!kept[i]) {
      ++result.dropped_low_confidence;
      continue;
    }
    ++total;
    Group& g = groups[keys[i]];
    ++g.size;
    if (tuples[i].split) g.upstream |= 1u << static_cast<int>(*tuples[i].split);
  }

  std::vector<std::string> heads;
  heads.reserve(groups.size());
  for (const auto& [k, g] : groups) heads.push_back(k);
  std::sort(heads.begin(), heads.end());

  std::array<double, 3> current = {0, 0, 0};
  std::vector<std::string> open;
  for (const auto& h : heads) {
    Group& g = groups[h];
    if (g.size > config.max_head_tuples_eval) {
      g.split = Split::kTrain;
      ++result.capped_heads;
    } else if (config.preserve_upstream && g.upstream != 0) {
      if ((g.upstream & (g.upstream - 1)) != 0) {
        g.split = Split::kTrain;
        ++result.conflicting_heads;
      } else {
        g.split = static_cast<Split>(g.upstream == 1 ? 0 : g.upstream == 2 ? 1 : 2);
        ++result.preserved_heads;
      }
    }
    if (g.split) {
      current[static_cast<int>(*g.split)] += static_cast<double>(g.size);
    } else {
      open.push_back(h);
    }
  }

  std::array<double, 3> target;
  for (int s = 0; s < 3; ++s) {
    target[s] = config.ratios[s] * static_cast<double>(total);
    if (current[s] > target[s] + 0.5) {
      result.warnings.push_back("forced assignments put " + std::to_string(static_cast<std::size_t>(current[s])) +
                                " tuples in " + std::string(ToString(kAllSplits[s])) + ", above its target of " +
                                FormatFixed(target[s], 1));
    }
  }

  Rng rng(DeriveSeed(config.seed, "split"));
  rng.Shuffle(open);
  for (const auto& h : open) {
    Group& g = groups[h];
    int best = 0;
    for (int s = 1; s < 3; ++s) {
      if (target[s] - current[s] > target[best] - current[best]) best = s;
    }
    g.split = kAllSplits[best];
    current[best] += static_cast<double>(g.size);
  }

  for (const auto& h : heads) result.head_partition.emplace(h, *groups[h].split);
  result.assignment.reserve(total);
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (!kept[i]) continue;
    const Split s = *groups[keys[i]].split;
    result.assignment.emplace_back(tuples[i].id, s);
    ++result.counts[static_cast<int>(s)];
  }
  if (!result.warnings.empty()) {
    const auto r = result.achieved_ratios();
    result.warnings.push_back("achieved ratios " + FormatFixed(r[0], 4) + "/" + FormatFixed(r[1], 4) + "/" +
                              FormatFixed(r[2], 4));
  }
  return result;
}

// Empty iff heads are disjoint across splits, no dev/test head exceeds the
// cap, the confidence filter holds and every kept tuple is assigned once.
inline std::vector<std::string> VerifySplit(const KnowledgeGraph& kg, const SplitResult& result,
                                            const SplitConfig& config, const NormalizerConfig& normalizer) {
  std::vector<std::string> violations;
  std::unordered_map<std::string, const Tuple*> by_id;
  for (const auto& t : kg.tuples()) by_id.emplace(t.id, &t);

  std::unordered_map<std::string, int> seen;
  std::map<std::string, unsigned> head_splits;
  std::map<std::string, std::size_t> eval_head_sizes;
  for (const auto& [id, s] : result.assignment) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      violations.push_back("assigned tuple " + id + " is not in the KG");
      continue;
    }
    if (++seen[id] == 2) violations.push_back("tuple " + id + " is assigned more than once");
    if (!config.Keeps(*it->second)) violations.push_back("tuple " + id + " is below the confidence threshold");
    const std::string key = detail::HeadKey(*it->second, normalizer);
    head_splits[key] |= 1u << static_cast<int>(s);
    if (s != Split::kTrain) ++eval_head_sizes[key];
  }
  for (const auto& t : kg.tuples()) {
    if (config.Keeps(t) && !seen.count(t.id)) violations.push_back("tuple " + t.id + " is not assigned");
  }
  for (const auto& [key, mask] : head_splits) {
    if ((mask & (mask - 1)) != 0) violations.push_back("head '" + key + "' appears in more than one split");
  }
  for (const auto& [key, n] : eval_head_sizes) {
    if (n > config.max_head_tuples_eval) {
      violations.push_back("eval head '" + key + "' has " + std::to_string(n) + " tuples, cap is " +
                           std::to_string(config.max_head_tuples_eval));
    }
  }
  return violations;
}

// Tuples of one split with their split tag set, KG order.
inline std::vector<Tuple> TuplesInSplit(const KnowledgeGraph& kg, const SplitResult& result, Split split) {
  std::unordered_map<std::string, Split> where(result.assignment.begin(), result.assignment.end());
  std::vector<Tuple> out;
  for (const auto& t : kg.tuples()) {
    const auto it = where.find(t.id);
    if (it == where.end() || it->second != split) continue;
    out.push_back(t);
    out.back().split = split;
  }
  return out;
}

}  // namespace cskg

#endif  // CSKG_SPLIT_HPP_
