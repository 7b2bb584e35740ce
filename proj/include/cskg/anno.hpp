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

// Human evaluation support: HIT sampling, Likert vote aggregation and
// Fleiss' kappa.

#ifndef CSKG_ANNO_HPP_
#define CSKG_ANNO_HPP_

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cskg/common.hpp"
#include "cskg/kg_core.hpp"
#include "cskg/verbalize.hpp"

namespace cskg {

enum class Likert { kAlwaysOften, kSometimesLikely, kFarfetchedNever, kInvalid, kNoJudgment };
enum class FinalLabel { kAccept, kReject, kNoJudgment };

inline constexpr std::array<Likert, 5> kAllLikert = {Likert::kAlwaysOften, Likert::kSometimesLikely,
                                                     Likert::kFarfetchedNever, Likert::kInvalid,
                                                     Likert::kNoJudgment};

inline std::string_view ToString(Likert l) {
  switch (l) {
    case Likert::kAlwaysOften: return "always_often";
    case Likert::kSometimesLikely: return "sometimes_likely";
    case Likert::kFarfetchedNever: return "farfetched_never";
    case Likert::kInvalid: return "invalid";
    case Likert::kNoJudgment: return "no_judgment";
  }
  return "no_judgment";
}

inline std::string_view ToString(FinalLabel l) {
  switch (l) {
    case FinalLabel::kAccept: return "accept";
    case FinalLabel::kReject: return "reject";
    case FinalLabel::kNoJudgment: return "no_judgment";
  }
  return "no_judgment";
}

inline std::optional<Likert> ParseLikert(std::string_view s) {
  s = Trim(s);
  if (s == "always_often" || s == "always/often") return Likert::kAlwaysOften;
  if (s == "sometimes_likely" || s == "sometimes/likely") return Likert::kSometimesLikely;
  if (s == "farfetched_never" || s == "farfetched/never") return Likert::kFarfetchedNever;
  if (s == "invalid") return Likert::kInvalid;
  if (s == "no_judgment" || s == "no judgment") return Likert::kNoJudgment;
  return std::nullopt;
}

inline std::optional<FinalLabel> ParseFinalLabel(std::string_view s) {
  s = Trim(s);
  if (s == "accept") return FinalLabel::kAccept;
  if (s == "reject") return FinalLabel::kReject;
  if (s == "no_judgment") return FinalLabel::kNoJudgment;
  return std::nullopt;
}

// always/often, sometimes/likely -> accept; farfetched/never, invalid ->
// reject; no judgment stays.
inline FinalLabel Binarize(Likert l) {
  switch (l) {
    case Likert::kAlwaysOften:
    case Likert::kSometimesLikely: return FinalLabel::kAccept;
    case Likert::kFarfetchedNever:
    case Likert::kInvalid: return FinalLabel::kReject;
    case Likert::kNoJudgment: return FinalLabel::kNoJudgment;
  }
  return FinalLabel::kNoJudgment;
}

struct Rating {
  std::string hit_id;
  std::string tuple_id;
  std::string worker_id;
  Likert label = Likert::kNoJudgment;
};

// Accept or reject needs a strict majority of all ratings; anything else,
// including 1-1-1 splits, is no judgment.
inline FinalLabel AggregateVotes(const std::vector<Likert>& labels) {
  if (labels.empty()) throw Error("anno", "cannot aggregate zero ratings");
  std::size_t accept = 0, reject = 0;
  for (Likert l : labels) {
    const FinalLabel b = Binarize(l);
    accept += b == FinalLabel::kAccept;
    reject += b == FinalLabel::kReject;
  }
  if (2 * accept > labels.size()) return FinalLabel::kAccept;
  if (2 * reject > labels.size()) return FinalLabel::kReject;
  return FinalLabel::kNoJudgment;
}

inline FinalLabel AggregateVotes(const std::vector<Rating>& ratings) {
  std::vector<Likert> labels;
  labels.reserve(ratings.size());
  for (const auto& r : ratings) labels.push_back(r.label);
  return AggregateVotes(labels);
}

struct AnnotationRecord {
  std::string tuple_id;
  std::vector<Rating> ratings;
  FinalLabel final_label = FinalLabel::kNoJudgment;
};

// Groups ratings by tuple (sorted by tuple id) and aggregates each group.
// A worker rating the same tuple twice is an error.
inline std::vector<AnnotationRecord> AggregateRatings(const std::vector<Rating>& ratings) {
  std::map<std::string, AnnotationRecord> by_tuple;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : ratings) {
    if (!seen.emplace(r.tuple_id, r.worker_id).second) {
      throw Error("anno", "worker " + r.worker_id + " rated tuple " + r.tuple_id + " more than once", {},
                  "keep one rating per (tuple_id, worker_id)");
    }
    auto& rec = by_tuple[r.tuple_id];
    rec.tuple_id = r.tuple_id;
    rec.ratings.push_back(r);
  }
  std::vector<AnnotationRecord> out;
  out.reserve(by_tuple.size());
  for (auto& [id, rec] : by_tuple) {
    rec.final_label = AggregateVotes(rec.ratings);
    out.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fleiss' kappa

struct KappaResult {
  double kappa = 0.0;
  double p_bar = 0.0;  // mean observed agreement
  double p_e = 0.0;    // expected agreement
  bool degenerate = false;  // every rating in one category; kappa set to 1
  std::size_t items = 0;
  std::size_t raters = 0;
  std::size_t categories = 0;
};

// counts[i][j] = raters assigning item i to category j. Every item must
// have the same number of ratings n >= 2.
inline KappaResult FleissKappa(const std::vector<std::vector<std::size_t>>& counts) {
  if (counts.empty()) throw Error("anno", "Fleiss' kappa needs at least one item");
  const std::size_t k = counts.front().size();
  if (k == 0) throw Error("anno", "Fleiss' kappa needs at least one category");
  std::size_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != k) throw Error("anno", "item " + std::to_string(i) + " has a different category count");
    std::size_t row = 0;
    for (auto c : counts[i]) row += c;
    if (i == 0) n = row;
    if (row != n) {
      throw Error("anno", "item " + std::to_string(i) + " has " + std::to_string(row) + " ratings, expected " +
                              std::to_string(n), {}, "every item needs the same number of raters");
    }
  }
  if (n < 2) throw Error("anno", "Fleiss' kappa needs at least 2 ratings per item");

  const double big_n = static_cast<double>(counts.size());
  const double dn = static_cast<double>(n);
  KappaResult r;
  r.items = counts.size();
  r.raters = n;
  r.categories = k;
  std::vector<double> column(k, 0.0);
  double p_sum = 0.0;
  for (const auto& row : counts) {
    double sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double c = static_cast<double>(row[j]);
      sq += c * c;
      column[j] += c;
    }
    p_sum += (sq - dn) / (dn * (dn - 1.0));
  }
  r.p_bar = p_sum / big_n;
  for (double c : column) {
    const double p = c / (big_n * dn);
    r.p_e += p * p;
  }
  if (r.p_e >= 1.0) {
    r.degenerate = true;
    r.kappa = 1.0;
    return r;
  }
  r.kappa = (r.p_bar - r.p_e) / (1.0 - r.p_e);
  return r;
}

enum class KappaSpace { kBinarized, kLikert };

inline std::string_view ToString(KappaSpace s) { return s == KappaSpace::kBinarized ? "binarized-3" : "likert-5"; }

// Item x category matrix from annotation records. Records whose rating
// count differs from `raters` are skipped and counted in `skipped`.
inline std::vector<std::vector<std::size_t>> KappaCounts(const std::vector<AnnotationRecord>& records,
                                                         KappaSpace space, std::size_t raters,
                                                         std::size_t* skipped = nullptr) {
  const std::size_t k = space == KappaSpace::kBinarized ? 3 : 5;
  std::vector<std::vector<std::size_t>> counts;
  std::size_t skip = 0;
  for (const auto& rec : records) {
    if (rec.ratings.size() != raters) {
      ++skip;
      continue;
    }
    std::vector<std::size_t> row(k, 0);
    for (const auto& r : rec.ratings) {
      const std::size_t j = space == KappaSpace::kBinarized ? static_cast<std::size_t>(Binarize(r.label))
                                                            : static_cast<std::size_t>(r.label);
      ++row[j];
    }
    counts.push_back(std::move(row));
  }
  if (skipped) *skipped = skip;
  return counts;
}

// ---------------------------------------------------------------------------
// HIT sampling

inline constexpr std::size_t kTuplesPerHit = 5;

struct HitBatch {
  std::string hit_id;
  RelationId relation;
  std::vector<std::string> tuple_ids;
  std::vector<std::string> rendered_prompts;
  bool short_hit = false;  // fewer than 5 same-relation tuples available
};

// Seeded sample of n tuples without replacement, grouped by relation into
// HITs of 5 (relations in sorted order, draw order within a relation). A
// trailing partial HIT is padded with unsampled tuples of the same relation
// when possible, otherwise emitted short and flagged.
inline std::vector<HitBatch> SampleForEval(const KnowledgeGraph& kg, std::size_t n, std::uint64_t seed,
                                           const TemplateTable& table) {
  if (n > kg.size()) {
    throw Error("anno", "sample of " + std::to_string(n) + " requested from " + std::to_string(kg.size()) +
                            " tuples", {}, "lower the sample size");
  }
  const auto& tuples = kg.tuples();
  Rng rng(seed);
  const std::vector<std::size_t> drawn = rng.Sample(tuples.size(), n);
  std::vector<char> taken(tuples.size(), 0);
  std::map<RelationId, std::vector<std::size_t>> by_relation;
  for (std::size_t i : drawn) {
    taken[i] = 1;
    by_relation[tuples[i].relation].push_back(i);
  }
  std::vector<HitBatch> hits;
  for (auto& [relation, members] : by_relation) {
    const std::size_t remainder = members.size() % kTuplesPerHit;
    if (remainder != 0) {
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        if (!taken[i] && tuples[i].relation == relation) pool.push_back(i);
      }
      for (std::size_t p : rng.Sample(pool.size(), kTuplesPerHit - remainder)) {
        taken[pool[p]] = 1;
        members.push_back(pool[p]);
      }
    }
    for (std::size_t start = 0; start < members.size(); start += kTuplesPerHit) {
      HitBatch hit;
      char id[32];
      std::snprintf(id, sizeof(id), "hit-%05zu", hits.size() + 1);
      hit.hit_id = id;
      hit.relation = relation;
      for (std::size_t j = start; j < std::min(members.size(), start + kTuplesPerHit); ++j) {
        const Tuple& t = tuples[members[j]];
        hit.tuple_ids.push_back(t.id);
        hit.rendered_prompts.push_back(RenderHuman(t, table));
      }
      hit.short_hit = hit.tuple_ids.size() < kTuplesPerHit;
      hits.push_back(std::move(hit));
    }
  }
  return hits;
}

// ---------------------------------------------------------------------------
// CSV interchange

// Long format, one row per tuple: hit_id, position, kg, relation, tuple_id,
// prompt, short.
inline std::string HitsToCsv(const std::vector<HitBatch>& hits) {
  std::string out = CsvRow({"hit_id", "position", "kg", "relation", "tuple_id", "prompt", "short"});
  for (const auto& h : hits) {
    for (std::size_t i = 0; i < h.tuple_ids.size(); ++i) {
      out += CsvRow({h.hit_id, std::to_string(i + 1), h.relation.kg, h.relation.name, h.tuple_ids[i],
                     h.rendered_prompts[i], h.short_hit ? "1" : "0"});
    }
  }
  return out;
}

namespace detail {

inline std::map<std::string, std::size_t> CsvHeader(const std::vector<std::string>& header,
                                                    const std::vector<std::string>& required,
                                                    std::string_view origin) {
  std::map<std::string, std::size_t> cols;
  for (std::size_t i = 0; i < header.size(); ++i) cols[std::string(Trim(header[i]))] = i;
  for (const auto& r : required) {
    if (!cols.count(r)) {
      throw Error("anno", "missing column '" + r + "'", std::string(origin), "header must name " + Join(required, ", "));
    }
  }
  return cols;
}

}  // namespace detail

// Columns hit_id, tuple_id, worker_id, label (any order, extra columns ignored).
inline std::vector<Rating> ParseRatingsCsv(std::string_view text, std::string_view origin = "ratings") {
  const auto rows = ParseCsv(text);
  if (rows.empty()) return {};
  const auto cols = detail::CsvHeader(rows[0], {"hit_id", "tuple_id", "worker_id", "label"}, origin);
  std::vector<Rating> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string locus = std::string(origin) + ":row " + std::to_string(i + 1);
    const auto get = [&](const char* name) -> std::string {
      const std::size_t c = cols.at(name);
      if (c >= row.size()) throw Error("anno", "row is missing column '" + std::string(name) + "'", locus);
      return std::string(Trim(row[c]));
    };
    Rating r;
    r.hit_id = get("hit_id");
    r.tuple_id = get("tuple_id");
    r.worker_id = get("worker_id");
    const std::string label = get("label");
    const auto l = ParseLikert(label);
    if (!l) {
      throw Error("anno", "unknown label '" + label + "'", locus,
                  "use always_often, sometimes_likely, farfetched_never, invalid or no_judgment");
    }
    if (r.tuple_id.empty() || r.worker_id.empty()) throw Error("anno", "empty tuple_id or worker_id", locus);
    r.label = *l;
    out.push_back(std::move(r));
  }
  return out;
}

struct HitRow {
  std::string hit_id;
  std::string kg;
  std::string relation;
  std::string tuple_id;
};

inline std::vector<HitRow> ParseHitsCsv(std::string_view text, std::string_view origin = "hits") {
  const auto rows = ParseCsv(text);
  if (rows.empty()) return {};
  const auto cols = detail::CsvHeader(rows[0], {"hit_id", "kg", "relation", "tuple_id"}, origin);
  std::vector<HitRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto get = [&](const char* name) -> std::string {
      const std::size_t c = cols.at(name);
      if (c >= row.size()) {
        throw Error("anno", "row is missing column '" + std::string(name) + "'",
                    std::string(origin) + ":row " + std::to_string(i + 1));
      }
      return std::string(Trim(row[c]));
    };
    out.push_back({get("hit_id"), get("kg"), get("relation"), get("tuple_id")});
  }
  return out;
}

}  // namespace cskg

#endif  // CSKG_ANNO_HPP_
