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

// Pairwise KG comparison: coverage precision and recall over normalized
// keys, and per-relation accuracy from aggregated human annotations.

#ifndef CSKG_COMPARE_HPP_
#define CSKG_COMPARE_HPP_

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cskg/anno.hpp"
#include "cskg/common.hpp"
#include "cskg/embedded_data.hpp"
#include "cskg/kg_core.hpp"
#include "cskg/normalize.hpp"
#include "json.hpp"

namespace cskg {

struct CoverageCounts {
  std::size_t source_size = 0;            // matchable source tuples
  std::size_t matched_source_tuples = 0;  // source tuples with a key in the target
  std::size_t matched_source_keys = 0;    // source (tuple, key) pairs whose key is in the target
  std::size_t target_size = 0;            // matchable target tuples
  std::size_t target_keys = 0;            // distinct target keys
  std::size_t target_keys_hit = 0;        // distinct target keys produced by the source

  static std::optional<double> Pct(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  }
  std::optional<double> precision_pct() const { return Pct(matched_source_tuples, source_size); }
  std::optional<double> recall_raw_pct() const { return Pct(matched_source_keys, target_keys); }
  std::optional<double> recall_dedup_pct() const { return Pct(target_keys_hit, target_keys); }

  friend bool operator==(const CoverageCounts&, const CoverageCounts&) = default;
};

struct CoverageReport {
  std::string source;
  std::string target;
  MatchMode mode = MatchMode::kAllTargets;
  CoverageCounts overall;
  std::map<std::string, CoverageCounts> per_relation;  // keyed "kg:name" in the mapped space
  IndexDiagnostics source_diagnostics;
  IndexDiagnostics target_diagnostics;
  std::size_t matched_keys = 0;  // |source keys ∩ target keys|
  std::string config_digest;

  nlohmann::ordered_json ToJson() const;
};

// Digest of everything that changes normalized keys.
inline std::string CoverageConfigDigest(const RelationMapping& mapping, MatchMode mode,
                                        const NormalizerConfig& config) {
  return Digest().Add(mapping.DigestHex()).Add(ToString(mode)).Add(config.version).hex();
}

namespace detail {

inline std::string_view KeyRelation(std::string_view encoded) {
  const auto a = encoded.find('\x1f');
  const auto b = encoded.find('\x1f', a + 1);
  return encoded.substr(a + 1, b - a - 1);
}

}  // namespace detail

// Coverage of `target` by `source` over prebuilt normalized indexes.
inline CoverageReport CoverageFromIndexes(const std::string& source_id, const NormalizedIndex& source,
                                          const std::string& target_id, const NormalizedIndex& target,
                                          MatchMode mode, std::string config_digest, unsigned workers = 0) {
  CoverageReport report;
  report.source = source_id;
  report.target = target_id;
  report.mode = mode;
  report.config_digest = std::move(config_digest);
  report.source_diagnostics = source.diagnostics();
  report.target_diagnostics = target.diagnostics();

  struct Partial {
    std::size_t size = 0, matched = 0, matched_keys = 0;
    std::map<std::string, std::pair<std::size_t, std::size_t>> rel;  // size, matched
  };
  if (workers == 0) workers = DefaultWorkers();
  std::vector<Partial> partials(std::max(1u, workers));
  ParallelShards(source.tuple_count(), workers, [&](unsigned shard, std::size_t begin, std::size_t end) {
    Partial& p = partials[shard];
    std::map<std::string_view, std::pair<std::size_t, std::size_t>> rel;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& keys = source.KeysOf(i);
      if (keys.empty()) continue;
      ++p.size;
      bool found = false;
      for (const auto& k : keys) {
        const bool hit = target.Contains(k);
        found = found || hit;
        p.matched_keys += hit;
        auto& r = rel[detail::KeyRelation(k)];
        ++r.first;
        r.second += hit;
      }
      p.matched += found;
    }
    for (const auto& [name, r] : rel) p.rel[std::string(name)] = r;
  });
  for (const auto& p : partials) {
    report.overall.source_size += p.size;
    report.overall.matched_source_tuples += p.matched;
    report.overall.matched_source_keys += p.matched_keys;
    for (const auto& [name, r] : p.rel) {
      auto& row = report.per_relation[name];
      row.source_size += r.first;
      row.matched_source_tuples += r.second;
      row.matched_source_keys += r.second;
    }
  }

  report.overall.target_size = target.diagnostics().indexed;
  for (const auto& [key, postings] : target.postings()) {
    const bool hit = source.Contains(key);
    ++report.overall.target_keys;
    report.overall.target_keys_hit += hit;
    auto& row = report.per_relation[std::string(detail::KeyRelation(key))];
    ++row.target_keys;
    row.target_keys_hit += hit;
    // A tuple has at most one key per relation, so postings within a relation are disjoint.
    row.target_size += postings.size();
  }
  report.matched_keys = report.overall.target_keys_hit;
  return report;
}

// A source tuple is found iff any of its normalized keys exists in the
// target index.
inline CoverageReport Coverage(const KnowledgeGraph& source, const KnowledgeGraph& target,
                               const RelationMapping& mapping, MatchMode mode, const NormalizerConfig& config,
                               unsigned workers = 0) {
  const NormalizedIndex s = BuildNormalizedIndex(source, mapping, mode, config, workers);
  const NormalizedIndex t = BuildNormalizedIndex(target, mapping, mode, config, workers);
  return CoverageFromIndexes(source.id(), s, target.id(), t, mode, CoverageConfigDigest(mapping, mode, config),
                             workers);
}

// Distinct keys present in both indexes, sorted.
inline std::vector<std::string> MatchedKeys(const NormalizedIndex& a, const NormalizedIndex& b) {
  std::vector<std::string> out;
  const NormalizedIndex& small = a.size() <= b.size() ? a : b;
  const NormalizedIndex& large = a.size() <= b.size() ? b : a;
  for (const auto& [key, postings] : small.postings()) {
    if (large.Contains(key)) out.push_back(key);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Every ordered pair of distinct KGs, in input order (row-major).
inline std::vector<CoverageReport> CoverageMatrix(const std::vector<const KnowledgeGraph*>& kgs,
                                                  const RelationMapping& mapping, MatchMode mode,
                                                  const NormalizerConfig& config, unsigned workers = 0) {
  if (kgs.size() < 2) throw Error("compare", "coverage matrix needs at least 2 KGs");
  std::vector<NormalizedIndex> indexes;
  indexes.reserve(kgs.size());
  for (const auto* kg : kgs) indexes.push_back(BuildNormalizedIndex(*kg, mapping, mode, config, workers));
  const std::string digest = CoverageConfigDigest(mapping, mode, config);
  std::vector<CoverageReport> out;
  for (std::size_t i = 0; i < kgs.size(); ++i) {
    for (std::size_t j = 0; j < kgs.size(); ++j) {
      if (i == j) continue;
      out.push_back(CoverageFromIndexes(kgs[i]->id(), indexes[i], kgs[j]->id(), indexes[j], mode, digest, workers));
    }
  }
  return out;
}

namespace detail {

inline nlohmann::ordered_json PctJson(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json CountsJson(const CoverageCounts& c) {
  nlohmann::ordered_json j;
  j["precision_pct"] = PctJson(c.precision_pct());
  j["recall_raw_pct"] = PctJson(c.recall_raw_pct());
  j["recall_dedup_pct"] = PctJson(c.recall_dedup_pct());
  j["matched_source_tuples"] = c.matched_source_tuples;
  j["matched_source_keys"] = c.matched_source_keys;
  j["source_size"] = c.source_size;
  j["target_size"] = c.target_size;
  j["target_keys"] = c.target_keys;
  j["target_keys_hit"] = c.target_keys_hit;
  return j;
}

inline nlohmann::ordered_json DiagJson(const IndexDiagnostics& d) {
  return {{"tuples", d.tuples}, {"indexed", d.indexed}, {"unmapped", d.unmapped}, {"degenerate", d.degenerate}};
}

inline std::string PctCell(const std::optional<double>& v) { return v ? FormatFixed(*v, 1) : "NA"; }

}  // namespace detail

inline nlohmann::ordered_json CoverageReport::ToJson() const {
  nlohmann::ordered_json j;
  j["source"] = source;
  j["target"] = target;
  j["mode"] = ToString(mode);
  j["config_digest"] = config_digest;
  auto overall_json = detail::CountsJson(overall);
  for (auto& [k, v] : overall_json.items()) j[k] = v;
  j["matched_keys"] = matched_keys;
  j["source_diagnostics"] = detail::DiagJson(source_diagnostics);
  j["target_diagnostics"] = detail::DiagJson(target_diagnostics);
  j["per_relation"] = nlohmann::ordered_json::object();
  for (const auto& [rel, c] : per_relation) j["per_relation"][rel] = detail::CountsJson(c);
  return j;
}

// Per-relation rows of one report.
inline std::string CoverageToTsv(const CoverageReport& r) {
  std::string out = "relation\tprecision\trecall_raw\trecall_dedup\tmatched\tsource_size\ttarget_keys\n";
  const auto row = [&](const std::string& name, const CoverageCounts& c) {
    out += name + "\t" + detail::PctCell(c.precision_pct()) + "\t" + detail::PctCell(c.recall_raw_pct()) + "\t" +
           detail::PctCell(c.recall_dedup_pct()) + "\t" + std::to_string(c.matched_source_tuples) + "\t" +
           std::to_string(c.source_size) + "\t" + std::to_string(c.target_keys) + "\n";
  };
  for (const auto& [rel, c] : r.per_relation) row(rel, c);
  row("ALL", r.overall);
  return out;
}

// Source x target grid of one metric, rows and columns in first-seen order.
inline std::string CoverageMatrixToTsv(const std::vector<CoverageReport>& reports, std::string_view metric) {
  std::vector<std::string> names;
  const auto note = [&](const std::string& n) {
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  };
  for (const auto& r : reports) {
    note(r.source);
    note(r.target);
  }
  std::map<std::pair<std::string, std::string>, std::string> cell;
  for (const auto& r : reports) {
    std::optional<double> v;
    if (metric == "precision") v = r.overall.precision_pct();
    else if (metric == "recall_raw") v = r.overall.recall_raw_pct();
    else if (metric == "recall_dedup") v = r.overall.recall_dedup_pct();
    else throw Error("compare", "unknown metric '" + std::string(metric) + "'");
    cell[{r.source, r.target}] = detail::PctCell(v);
  }
  std::string out = std::string(metric) + " source\\target";
  for (const auto& n : names) out += "\t" + n;
  out += "\n";
  for (const auto& s : names) {
    out += s;
    for (const auto& t : names) {
      const auto it = cell.find({s, t});
      out += "\t" + (s == t ? std::string("-") : it == cell.end() ? std::string("NA") : it->second);
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Accuracy breakdown

// Relation -> row label used to merge cognate relations across KGs.
class CognateGroups {
 public:
  static CognateGroups Parse(std::string_view text, std::string_view origin = "cognate_groups") {
    CognateGroups g;
    ForEachDataLine(text, [&](std::size_t line_no, const std::vector<std::string_view>& f) {
      if (f.size() != 2) {
        throw Error("compare", "cognate row needs relation and group", std::string(origin) + ":" + std::to_string(line_no));
      }
      g.groups_[std::string(Trim(f[0]))] = std::string(Trim(f[1]));
    });
    return g;
  }

  static const CognateGroups& Default() {
    static const CognateGroups g = Parse(embedded::cognate_groups_tsv, "cognate_groups.tsv");
    return g;
  }

  // Group of a relation; defaults to its canonical name.
  std::string GroupOf(std::string_view relation, const RelationRegistry& registry) const {
    auto it = groups_.find(std::string(relation));
    if (it != groups_.end()) return it->second;
    const std::string canonical = registry.Canonical(relation);
    it = groups_.find(canonical);
    return it != groups_.end() ? it->second : canonical;
  }

 private:
  std::map<std::string, std::string> groups_;
};

struct LabeledTuple {
  std::string kg;
  std::string relation;
  FinalLabel label = FinalLabel::kNoJudgment;
};

struct ZTest {
  double z = 0.0;
  double p_value = 1.0;
  bool significant = false;
};

inline constexpr double kZCritical05 = 1.959963984540054;

// Pooled two-proportion z-test, two-sided, alpha 0.05.
inline ZTest TwoProportionZTest(std::size_t x1, std::size_t n1, std::size_t x2, std::size_t n2) {
  ZTest t;
  if (n1 == 0 || n2 == 0) return t;
  const double p1 = static_cast<double>(x1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(x2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  if (se == 0.0) return t;
  t.z = (p2 - p1) / se;
  t.p_value = std::erfc(std::fabs(t.z) / std::sqrt(2.0));
  t.significant = std::fabs(t.z) > kZCritical05;
  return t;
}

struct AccuracyRow {
  std::string kg;
  std::string group;  // "ALL" for the per-KG total
  std::size_t n = 0;
  std::size_t accept = 0, reject = 0, no_judgment = 0;
  std::optional<ZTest> vs_baseline;

  double accept_pct() const { return n ? 100.0 * static_cast<double>(accept) / static_cast<double>(n) : 0.0; }
  double reject_pct() const { return n ? 100.0 * static_cast<double>(reject) / static_cast<double>(n) : 0.0; }
  double no_judgment_pct() const { return n ? 100.0 * static_cast<double>(no_judgment) / static_cast<double>(n) : 0.0; }
};

struct AccuracyReport {
  std::vector<AccuracyRow> rows;  // sorted by kg then group, "ALL" last per kg
  std::vector<std::string> diagnostics;
  std::string baseline;
  std::string test = "two-proportion z-test on accept rate, pooled, two-sided, alpha=0.05";

  nlohmann::ordered_json ToJson() const {
    nlohmann::ordered_json j;
    j["baseline"] = baseline;
    j["significance_test"] = test;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json row{{"kg", r.kg},
                                 {"group", r.group},
                                 {"n", r.n},
                                 {"accept_pct", r.accept_pct()},
                                 {"reject_pct", r.reject_pct()},
                                 {"no_judgment_pct", r.no_judgment_pct()}};
      if (r.vs_baseline) {
        row["z"] = r.vs_baseline->z;
        row["p_value"] = r.vs_baseline->p_value;
        row["significant"] = r.vs_baseline->significant;
      }
      j["rows"].push_back(std::move(row));
    }
    j["diagnostics"] = diagnostics;
    return j;
  }

  std::string ToTsv() const {
    std::string out = "kg\tgroup\tn\taccept\treject\tno_judgment\tsignificant\n";
    for (const auto& r : rows) {
      out += r.kg + "\t" + r.group + "\t" + std::to_string(r.n) + "\t" + FormatFixed(r.accept_pct(), 1) + "\t" +
             FormatFixed(r.reject_pct(), 1) + "\t" + FormatFixed(r.no_judgment_pct(), 1) + "\t" +
             (r.vs_baseline ? (r.vs_baseline->significant ? "yes" : "no") : "-") + "\n";
    }
    return out;
  }
};

// Accept/Reject/No-Judgment percentages per (KG, cognate group) plus a
// per-KG "ALL" row. When `baseline` names a KG present in the input, every
// other KG's rows carry a z-test against the baseline's row of the same group.
inline AccuracyReport AccuracyBreakdown(const std::vector<LabeledTuple>& records, const RelationRegistry& registry,
                                        const CognateGroups& groups = CognateGroups::Default(),
                                        const std::string& baseline = {}) {
  std::map<std::pair<std::string, std::string>, AccuracyRow> cells;
  std::set<std::string> kgs, all_groups;
  for (const auto& r : records) {
    const std::string group = groups.GroupOf(r.relation, registry);
    for (const std::string& g : {group, std::string("ALL")}) {
      auto& row = cells[{r.kg, g}];
      row.kg = r.kg;
      row.group = g;
      ++row.n;
      row.accept += r.label == FinalLabel::kAccept;
      row.reject += r.label == FinalLabel::kReject;
      row.no_judgment += r.label == FinalLabel::kNoJudgment;
    }
    kgs.insert(r.kg);
    all_groups.insert(group);
  }
  AccuracyReport report;
  report.baseline = kgs.count(baseline) ? baseline : std::string();
  if (!baseline.empty() && report.baseline.empty()) {
    report.diagnostics.push_back("baseline KG '" + baseline + "' has no records; significance omitted");
  }
  for (const auto& kg : kgs) {
    std::vector<std::string> order(all_groups.begin(), all_groups.end());
    order.push_back("ALL");
    for (const auto& g : order) {
      const auto it = cells.find({kg, g});
      if (it == cells.end()) {
        report.diagnostics.push_back("kg '" + kg + "' has no records for group '" + g + "'; row omitted");
        continue;
      }
      AccuracyRow row = it->second;
      if (!report.baseline.empty() && kg != report.baseline) {
        const auto base = cells.find({report.baseline, g});
        if (base != cells.end()) {
          row.vs_baseline = TwoProportionZTest(base->second.accept, base->second.n, row.accept, row.n);
        }
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

// Attaches kg and relation from HIT export rows to aggregated records.
inline std::vector<LabeledTuple> JoinAnnotations(const std::vector<AnnotationRecord>& records,
                                                 const std::vector<HitRow>& hits) {
  std::map<std::string, const HitRow*> by_tuple;
  for (const auto& h : hits) by_tuple[h.tuple_id] = &h;
  std::vector<LabeledTuple> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto it = by_tuple.find(r.tuple_id);
    if (it == by_tuple.end()) {
      throw Error("compare", "rated tuple " + r.tuple_id + " is not in the HIT export", {},
                  "pass the HIT CSV the ratings were collected with");
    }
    out.push_back({it->second->kg, it->second->relation, r.final_label});
  }
  return out;
}

}  // namespace cskg

#endif  // CSKG_COMPARE_HPP_
