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

// Natural-language and LM-ready renderings of tuples: human templates,
// zero-shot prefixes, few-shot priming blocks and "[GEN]/[SEP]" training lines.

#ifndef CSKG_VERBALIZE_HPP_
#define CSKG_VERBALIZE_HPP_

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cskg/common.hpp"
#include "cskg/embedded_data.hpp"
#include "cskg/kg_core.hpp"
#include "json.hpp"

namespace cskg {

inline constexpr std::string_view kGenToken = "[GEN]";
inline constexpr std::string_view kSepToken = "[SEP]";

// Relation name -> connective phrase. Keys are stored under their canonical
// spelling so aliases ("isAfter", "ObjUse") find the same row; lookups fall
// back to ASCII case folding ("HasSubevent" finds "HasSubEvent").
class TemplateTable {
 public:
  TemplateTable() = default;

  static TemplateTable Parse(std::string_view text, const RelationRegistry& registry,
                             std::string_view origin = "templates") {
    TemplateTable table;
    ForEachDataLine(text, [&](std::size_t line_no, const std::vector<std::string_view>& f) {
      const std::string locus = std::string(origin) + ":" + std::to_string(line_no);
      if (f.size() != 2 || Trim(f[0]).empty() || Trim(f[1]).empty()) {
        throw Error("verbalize", "template row needs relation and template", locus);
      }
      const std::string key = registry.Canonical(Trim(f[0]));
      if (!table.templates_.emplace(key, std::string(Trim(f[1]))).second) {
        throw Error("verbalize", "duplicate template for " + key, locus);
      }
    });
    table.aliases_ = registry.aliases();
    for (const auto& [key, text] : table.templates_) table.folded_.emplace(Fold(key), key);
    table.version_ = Digest().Add(text).hex();
    return table;
  }

  static const TemplateTable& Default() {
    static const TemplateTable table =
        Parse(embedded::templates_tsv, *LoadDefaultRegistries(), "templates.tsv");
    return table;
  }

  const std::string* Find(std::string_view relation) const {
    auto it = templates_.find(std::string(relation));
    if (it != templates_.end()) return &it->second;
    const auto alias = aliases_.find(std::string(relation));
    if (alias != aliases_.end()) {
      it = templates_.find(alias->second);
      if (it != templates_.end()) return &it->second;
    }
    const auto folded = folded_.find(Fold(relation));
    return folded == folded_.end() ? nullptr : &templates_.at(folded->second);
  }

  const std::string& Get(const RelationId& relation) const {
    const std::string* t = Find(relation.name);
    if (t == nullptr) {
      throw Error("verbalize", "no template for relation " + relation.ToString(), {},
                  "add a row to the template table");
    }
    return *t;
  }

  const std::map<std::string, std::string>& templates() const { return templates_; }
  const std::string& version() const { return version_; }

 private:
  static std::string Fold(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  std::map<std::string, std::string> templates_;
  std::map<std::string, std::string> aliases_;
  std::map<std::string, std::string> folded_;
  std::string version_;
};

// "HEAD <template>", the zero-shot query form.
inline std::string RenderPrefix(std::string_view head, const RelationId& relation, const TemplateTable& table) {
  return std::string(head) + " " + table.Get(relation);
}

// "HEAD <template> TAIL", as shown to annotators.
inline std::string RenderHuman(const Tuple& t, const TemplateTable& table) {
  return RenderPrefix(t.head, t.relation, table) + " " + t.tail;
}

struct TrainingLineOptions {
  // Wraps the relation token as "<name>" for tokenizers with special tokens.
  bool wrap_relation = false;
};

// Empty when the text can appear in a training line, else the problem.
inline std::string TrainingFieldProblem(std::string_view s) {
  if (s.find(kGenToken) != std::string_view::npos) return "contains [GEN]";
  if (s.find(kSepToken) != std::string_view::npos) return "contains [SEP]";
  if (s.find('\n') != std::string_view::npos || s.find('\r') != std::string_view::npos) return "contains a line break";
  return {};
}

// "HEAD RELATION [GEN] TAIL [SEP]".
inline std::string RenderTrainingLine(const Tuple& t, const TrainingLineOptions& options = {}) {
  for (const auto* field : {&t.head, &t.tail}) {
    const std::string problem = TrainingFieldProblem(*field);
    if (!problem.empty()) {
      throw Error("verbalize", "tuple " + t.id + " " + problem, {}, "delimiter tokens are rejected, not escaped");
    }
  }
  std::string rel = options.wrap_relation ? "<" + t.relation.name + ">" : t.relation.name;
  std::string out;
  out.reserve(t.head.size() + rel.size() + t.tail.size() + 16);
  out.append(t.head).append(" ").append(rel).append(" ").append(kGenToken).append(" ");
  out.append(t.tail).append(" ").append(kSepToken);
  return out;
}

struct TrainingLine {
  std::string head;
  std::string relation;
  std::string tail;

  friend bool operator==(const TrainingLine&, const TrainingLine&) = default;
};

// Inverse of RenderTrainingLine.
inline TrainingLine ParseTrainingLine(std::string_view line, const TrainingLineOptions& options = {}) {
  const std::string sep_suffix = " " + std::string(kSepToken);
  const std::string gen_mid = " " + std::string(kGenToken) + " ";
  if (line.size() < sep_suffix.size() || line.substr(line.size() - sep_suffix.size()) != sep_suffix) {
    throw Error("verbalize", "training line does not end with [SEP]");
  }
  line.remove_suffix(sep_suffix.size());
  const auto gen = line.find(gen_mid);
  if (gen == std::string_view::npos) throw Error("verbalize", "training line has no [GEN]");
  const std::string_view left = line.substr(0, gen);
  const auto space = left.rfind(' ');
  if (space == std::string_view::npos) throw Error("verbalize", "training line has no relation token");
  TrainingLine out;
  out.head = std::string(left.substr(0, space));
  std::string_view rel = left.substr(space + 1);
  if (options.wrap_relation) {
    if (rel.size() < 2 || rel.front() != '<' || rel.back() != '>') {
      throw Error("verbalize", "relation token is not wrapped");
    }
    rel = rel.substr(1, rel.size() - 2);
  }
  out.relation = std::string(rel);
  out.tail = std::string(line.substr(gen + gen_mid.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Few-shot priming

struct FewshotBlock {
  std::string text;                    // example lines then the query line
  std::vector<std::string> example_ids;
  nlohmann::ordered_json metadata;     // decoding parameters for downstream harnesses
};

// k seeded examples of `relation` from `pool` rendered "prefix TAIL", then
// the query prefix. Pool tuples of the relation must come from train; those
// sharing the query head are skipped.
inline FewshotBlock BuildFewshotBlock(const RelationId& relation, std::string_view query_head,
                                      const std::vector<Tuple>& pool, std::size_t k, std::uint64_t seed,
                                      const TemplateTable& table) {
  std::vector<const Tuple*> candidates;
  for (const auto& t : pool) {
    if (t.relation != relation) continue;
    if (Trim(t.head) == Trim(query_head)) continue;
    if (t.split && *t.split != Split::kTrain) {
      throw Error("verbalize", "few-shot pool tuple " + t.id + " is from " + std::string(ToString(*t.split)), {},
                  "prime only with training tuples");
    }
    candidates.push_back(&t);
  }
  if (candidates.size() < k) {
    throw Error("verbalize",
                "few-shot pool for " + relation.ToString() + " has " + std::to_string(candidates.size()) +
                    " tuples, " + std::to_string(k) + " requested");
  }
  FewshotBlock block;
  Rng rng(seed);
  for (std::size_t i : rng.Sample(candidates.size(), k)) {
    const Tuple& t = *candidates[i];
    block.text += RenderHuman(t, table);
    block.text += '\n';
    block.example_ids.push_back(t.id);
  }
  block.text += RenderPrefix(query_head, relation, table);
  block.text += '\n';
  block.metadata["relation"] = relation.ToString();
  block.metadata["k"] = k;
  block.metadata["seed"] = seed;
  block.metadata["temperature"] = 0.4;
  block.metadata["decoding_seeds"] = 3;
  block.metadata["example_ids"] = block.example_ids;
  return block;
}

}  // namespace cskg

#endif  // CSKG_VERBALIZE_HPP_
