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

// KG dump parsers (ConceptNet assertion edges, canonical tuple JSONL, ATOMIC
// TSV), the ingestion filters, ConceptNet curation and tuple JSONL output.

#ifndef CSKG_INGEST_HPP_
#define CSKG_INGEST_HPP_

#include <zlib.h>

#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cskg/common.hpp"
#include "cskg/embedded_data.hpp"
#include "cskg/kg_core.hpp"
#include "json.hpp"

namespace cskg {

enum class InputFormat { kConceptNetEdges, kGenericJsonl, kAtomicTsv };

inline std::string_view ToString(InputFormat f) {
  switch (f) {
    case InputFormat::kConceptNetEdges: return "conceptnet-edges";
    case InputFormat::kGenericJsonl: return "generic-jsonl";
    case InputFormat::kAtomicTsv: return "atomic-tsv";
  }
  return "generic-jsonl";
}

inline std::optional<InputFormat> ParseInputFormat(std::string_view s) {
  if (s == "conceptnet-edges" || s == "conceptnet") return InputFormat::kConceptNetEdges;
  if (s == "generic-jsonl" || s == "jsonl") return InputFormat::kGenericJsonl;
  if (s == "atomic-tsv" || s == "tsv") return InputFormat::kAtomicTsv;
  return std::nullopt;
}

struct IngestConfig {
  InputFormat format = InputFormat::kGenericJsonl;
  bool english_only = true;
  // Weight filter: reject weight < threshold, and weight == threshold
  // unless keep_equal. Absent weights are rejected while the filter is on.
  std::optional<double> min_weight_exclusive;
  bool keep_equal = false;
  std::optional<std::set<std::string>> relation_whitelist;
  std::optional<std::set<std::string>> relation_blacklist;
  bool dedup_exact = true;

  // ConceptNet: drop edges with weight <= 0.5.
  static IngestConfig ConceptNetPreset() {
    IngestConfig c;
    c.format = InputFormat::kConceptNetEdges;
    c.min_weight_exclusive = 0.5;
    c.keep_equal = false;
    return c;
  }

  // TransOMCS: keep confidence >= 0.5.
  static IngestConfig TransOmcsPreset() {
    IngestConfig c;
    c.format = InputFormat::kGenericJsonl;
    c.min_weight_exclusive = 0.5;
    c.keep_equal = true;
    return c;
  }

  void Validate() const {
    if (relation_whitelist && relation_blacklist) {
      throw Error("ingest", "relation whitelist and blacklist are mutually exclusive", {},
                  "set only one of them");
    }
    if (min_weight_exclusive && !(*min_weight_exclusive >= 0.0)) {
      throw Error("ingest", "min weight must be >= 0");
    }
  }

  std::string DigestHex() const {
    Digest d;
    d.Add(ToString(format)).Add(english_only ? "en" : "any");
    d.Add(min_weight_exclusive ? FormatFixed(*min_weight_exclusive, 12) : "none");
    d.Add(keep_equal ? "ge" : "gt").Add(dedup_exact ? "dedup" : "keep-dups");
    for (const auto* list : {&relation_whitelist, &relation_blacklist}) {
      d.Add(list->has_value() ? "list" : "nolist");
      if (*list) {
        for (const auto& r : **list) d.Add(r);
      }
    }
    return d.hex();
  }

  bool PassesWeight(const std::optional<double>& weight) const {
    if (!min_weight_exclusive) return true;
    if (!weight) return false;
    if (*weight > *min_weight_exclusive) return true;
    return keep_equal && *weight == *min_weight_exclusive;
  }
};

namespace reason {
inline constexpr std::string_view kNonEnglish = "non-english";
inline constexpr std::string_view kLowWeight = "low-weight";
inline constexpr std::string_view kBlacklisted = "blacklisted-relation";
inline constexpr std::string_view kNotWhitelisted = "not-whitelisted";
inline constexpr std::string_view kDuplicate = "duplicate";
inline constexpr std::string_view kMalformed = "malformed";
inline constexpr std::string_view kEmptyTail = "empty-tail";
inline constexpr std::string_view kRemovedRelation = "removed-relation";
inline constexpr std::string_view kDeterministicFact = "deterministic-fact";
inline constexpr std::string_view kDroppedId = "dropped-id";
}  // namespace reason

struct IngestReport {
  std::size_t read = 0;
  std::size_t kept = 0;
  std::map<std::string, std::size_t> rejected_by;
  // Non-fatal notes (e.g. unmapped relations passed through by curation).
  std::map<std::string, std::size_t> warnings;
  // First few malformed inputs, "locus: problem".
  std::vector<std::string> samples;

  void Reject(std::string_view why, const std::string& locus = {}, const std::string& detail = {}) {
    ++rejected_by[std::string(why)];
    if (why == reason::kMalformed && samples.size() < 20 && !locus.empty()) {
      samples.push_back(locus + ": " + detail);
    }
  }

  std::size_t rejected() const {
    std::size_t n = 0;
    for (const auto& [r, c] : rejected_by) n += c;
    return n;
  }

  bool Balanced() const { return read == kept + rejected(); }

  nlohmann::ordered_json ToJson() const {
    nlohmann::ordered_json j;
    j["read"] = read;
    j["kept"] = kept;
    j["rejected_by"] = nlohmann::ordered_json::object();
    for (const auto& [r, c] : rejected_by) j["rejected_by"][r] = c;
    j["warnings"] = nlohmann::ordered_json::object();
    for (const auto& [r, c] : warnings) j["warnings"][r] = c;
    return j;
  }
};

using TupleSink = std::function<void(Tuple&&)>;

// ---------------------------------------------------------------------------
// Line sources

// Reads lines from a file, transparently gunzipping compressed input.
class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path) {
    file_ = gzopen(path.c_str(), "rb");
    if (file_ == nullptr) {
      throw Error("ingest", "cannot open input", path, "check the path and permissions");
    }
    gzbuffer(file_, 1 << 17);
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;
  ~LineReader() {
    if (file_ != nullptr) gzclose(file_);
  }

  // False at end of input. The trailing newline (and CR) is stripped.
  bool Next(std::string& line) {
    line.clear();
    char buf[8192];
    bool any = false;
    while (gzgets(file_, buf, sizeof(buf)) != nullptr) {
      any = true;
      line += buf;
      if (!line.empty() && line.back() == '\n') break;
    }
    if (!any) {
      int err = 0;
      const char* msg = gzerror(file_, &err);
      if (err != Z_OK && err != Z_STREAM_END) throw Error("ingest", msg ? msg : "read error", path_);
      return false;
    }
    if (!line.empty() && line.back() == '\n') line.pop_back();
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  gzFile file_ = nullptr;
};

using LineFn = std::function<void(std::size_t line_no, std::string_view line)>;

inline void ForEachLine(std::istream& in, const LineFn& fn) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(++n, line);
  }
}

inline void ForEachLine(const std::string& path, const LineFn& fn) {
  LineReader reader(path);
  std::string line;
  std::size_t n = 0;
  while (reader.Next(line)) fn(++n, line);
}

// ---------------------------------------------------------------------------
// Shared filter chain

namespace detail {

class FilterChain {
 public:
  FilterChain(const IngestConfig& config, IngestReport& report) : config_(config), report_(report) {
    config_.Validate();
  }

  // Applies relation lists, weight and dedup filters; emits survivors.
  void Offer(Tuple&& t, const TupleSink& sink) {
    const std::string& rel = t.relation.name;
    if (config_.relation_blacklist && config_.relation_blacklist->count(rel)) {
      report_.Reject(reason::kBlacklisted);
      return;
    }
    if (config_.relation_whitelist && !config_.relation_whitelist->count(rel)) {
      report_.Reject(reason::kNotWhitelisted);
      return;
    }
    if (!config_.PassesWeight(t.weight)) {
      report_.Reject(reason::kLowWeight);
      return;
    }
    if (config_.dedup_exact) {
      std::string key;
      key.reserve(t.head.size() + rel.size() + t.tail.size() + 2);
      key.append(t.head).append(1, '\x1f').append(rel).append(1, '\x1f').append(t.tail);
      if (!seen_.insert(std::move(key)).second) {
        report_.Reject(reason::kDuplicate);
        return;
      }
    }
    if (!ids_.insert(t.id).second) {
      report_.Reject(reason::kMalformed, t.id, "duplicate tuple id");
      return;
    }
    ++report_.kept;
    sink(std::move(t));
  }

 private:
  const IngestConfig& config_;
  IngestReport& report_;
  std::unordered_set<std::string> seen_;
  std::unordered_set<std::string> ids_;
};

inline std::string ResolveName(const RelationRegistry* registry, std::string_view kg, std::string_view name) {
  if (registry != nullptr) {
    if (auto id = registry->Resolve(kg, name)) return id->name;
  }
  return std::string(name);
}

// "/c/en/ice_cream/n/..." -> "ice cream". Empty on a malformed URI.
inline std::string ConceptTerm(std::string_view uri) {
  if (uri.substr(0, 3) != "/c/") return {};
  const auto parts = SplitView(uri, '/');
  if (parts.size() < 4 || parts[2].empty() || parts[3].empty()) return {};
  std::string term(parts[3]);
  std::replace(term.begin(), term.end(), '_', ' ');
  return std::string(Trim(term));
}

inline bool IsEnglishConcept(std::string_view uri) { return uri.substr(0, 6) == "/c/en/"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// ConceptNet assertion dump

// Lines: edge URI, relation URI, start URI, end URI, JSON metadata.
class ConceptNetEdgeParser {
 public:
  ConceptNetEdgeParser(const IngestConfig& config, IngestReport& report, std::string kg = std::string(kg::kConceptNet),
                       const RelationRegistry* registry = nullptr)
      : config_(config), report_(report), chain_(config, report), kg_(std::move(kg)), registry_(registry) {}

  void Line(std::size_t line_no, std::string_view line, const TupleSink& sink) {
    ++report_.read;
    const std::string locus = "line " + std::to_string(line_no);
    const auto f = SplitView(line, '\t');
    if (f.size() < 5) {
      report_.Reject(reason::kMalformed, locus, "expected 5 tab-separated fields");
      return;
    }
    const std::string_view rel_uri = Trim(f[1]);
    if (rel_uri.substr(0, 3) != "/r/" || rel_uri.size() == 3) {
      report_.Reject(reason::kMalformed, locus, "bad relation URI");
      return;
    }
    const std::string_view start = Trim(f[2]);
    const std::string_view end = Trim(f[3]);
    Tuple t;
    t.head = detail::ConceptTerm(start);
    t.tail = detail::ConceptTerm(end);
    const std::string rel_name(rel_uri.substr(3));
    if (t.head.empty() || t.tail.empty() || HasWhitespace(rel_name)) {
      report_.Reject(reason::kMalformed, locus, "bad concept URI");
      return;
    }
    if (config_.english_only && !(detail::IsEnglishConcept(start) && detail::IsEnglishConcept(end))) {
      report_.Reject(reason::kNonEnglish);
      return;
    }
    t.relation = {kg_, detail::ResolveName(registry_, kg_, rel_name)};
    t.weight = ReadWeight(f[4]);
    t.source = kg_;
    t.id = kg_ + ":" + std::to_string(line_no);
    chain_.Offer(std::move(t), sink);
  }

 private:
  static std::optional<double> ReadWeight(std::string_view meta) {
    const auto j = nlohmann::json::parse(meta, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    const auto it = j.find("weight");
    if (it == j.end() || !it->is_number()) return std::nullopt;
    const double w = it->get<double>();
    if (!(w >= 0.0)) return std::nullopt;
    return w;
  }

  const IngestConfig& config_;
  IngestReport& report_;
  detail::FilterChain chain_;
  std::string kg_;
  const RelationRegistry* registry_;
};

// ---------------------------------------------------------------------------
// Canonical tuple JSONL

// One object per line: head, relation, tail, optional weight/split/id.
class JsonlTupleParser {
 public:
  JsonlTupleParser(const IngestConfig& config, IngestReport& report, std::string kg,
                   const RelationRegistry* registry = nullptr)
      : report_(report), chain_(config, report), kg_(std::move(kg)), registry_(registry) {}

  void Line(std::size_t line_no, std::string_view line, const TupleSink& sink) {
    ++report_.read;
    const std::string locus = "line " + std::to_string(line_no);
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      report_.Reject(reason::kMalformed, locus, "not a JSON object");
      return;
    }
    const auto text = [&](const char* key) -> std::optional<std::string> {
      const auto it = j.find(key);
      if (it == j.end() || !it->is_string()) return std::nullopt;
      return it->get<std::string>();
    };
    Tuple t;
    const auto head = text("head");
    const auto rel = text("relation");
    const auto tail = text("tail");
    if (!head || !rel || !tail || Trim(*head).empty() || Trim(*tail).empty() || Trim(*rel).empty() ||
        HasWhitespace(Trim(*rel))) {
      report_.Reject(reason::kMalformed, locus, "missing or empty head/relation/tail");
      return;
    }
    t.head = std::string(Trim(*head));
    t.tail = std::string(Trim(*tail));
    t.relation = {kg_, detail::ResolveName(registry_, kg_, Trim(*rel))};
    if (const auto it = j.find("weight"); it != j.end() && !it->is_null()) {
      if (!it->is_number() || !(it->get<double>() >= 0.0)) {
        report_.Reject(reason::kMalformed, locus, "weight must be a non-negative number");
        return;
      }
      t.weight = it->get<double>();
    }
    if (const auto s = text("split")) {
      t.split = ParseSplit(*s);
      if (!t.split) {
        report_.Reject(reason::kMalformed, locus, "unknown split '" + *s + "'");
        return;
      }
    }
    t.source = kg_;
    const auto id = text("id");
    t.id = id && !id->empty() ? *id : kg_ + ":" + std::to_string(line_no);
    chain_.Offer(std::move(t), sink);
  }

 private:
  IngestReport& report_;
  detail::FilterChain chain_;
  std::string kg_;
  const RelationRegistry* registry_;
};

// ---------------------------------------------------------------------------
// ATOMIC TSV

// Column order of the released ATOMIC file when no header row is present.
inline const std::vector<std::string>& DefaultAtomicColumns() {
  static const std::vector<std::string> cols = {"oEffect", "oReact", "oWant",  "xAttr", "xEffect",
                                                "xIntent", "xNeed",  "xReact", "xWant"};
  return cols;
}

// Rows: event, one JSON string array per relation, optional split column.
// A header whose first field is "event" names the columns; other unknown
// columns are ignored. Every tail element, malformed cell and malformed row
// counts as one read unit.
class AtomicTsvParser {
 public:
  AtomicTsvParser(const IngestConfig& config, IngestReport& report, std::string kg = std::string(kg::kAtomic),
                  const RelationRegistry* registry = nullptr)
      : report_(report), chain_(config, report), kg_(std::move(kg)), registry_(registry) {}

  void Line(std::size_t line_no, std::string_view line, const TupleSink& sink) {
    const auto f = SplitView(line, '\t');
    const std::string locus = "line " + std::to_string(line_no);
    if (line_no == 1 && Trim(f[0]) == "event") {
      columns_.clear();
      split_column_.reset();
      for (std::size_t i = 1; i < f.size(); ++i) {
        const std::string name(Trim(f[i]));
        if (name == "split") {
          split_column_ = i;
          columns_.emplace_back();
        } else {
          columns_.push_back(detail::ResolveName(registry_, kg_, name));
        }
      }
      if (!registry_) return;
      for (auto& c : columns_) {
        if (!c.empty() && !registry_->Contains({kg_, c})) c.clear();
      }
      return;
    }
    if (columns_.empty()) {
      columns_ = DefaultAtomicColumns();
      for (auto& c : columns_) c = detail::ResolveName(registry_, kg_, c);
    }
    const std::string event(Trim(f[0]));
    const std::size_t expected = columns_.size() + 1;
    if (event.empty() || f.size() < expected || f.size() > expected + 1) {
      ++report_.read;
      report_.Reject(reason::kMalformed, locus, "expected event + " + std::to_string(columns_.size()) + " columns");
      return;
    }
    std::optional<Split> split;
    const std::optional<std::size_t> split_col = split_column_ ? split_column_
                                                 : f.size() == expected + 1 ? std::optional<std::size_t>(expected)
                                                                            : std::nullopt;
    if (split_col) {
      split = ParseSplit(f[*split_col]);
      if (!split) {
        ++report_.read;
        report_.Reject(reason::kMalformed, locus, "unknown split '" + std::string(f[*split_col]) + "'");
        return;
      }
    }
    for (std::size_t c = 1; c < f.size() && c <= columns_.size(); ++c) {
      const std::string& rel = columns_[c - 1];
      if (rel.empty()) continue;
      const auto cell = nlohmann::json::parse(f[c], nullptr, false);
      if (cell.is_discarded() || !cell.is_array()) {
        ++report_.read;
        report_.Reject(reason::kMalformed, locus, "column " + rel + " is not a JSON array");
        continue;
      }
      for (std::size_t k = 0; k < cell.size(); ++k) {
        ++report_.read;
        if (!cell[k].is_string()) {
          report_.Reject(reason::kMalformed, locus, "non-string tail in " + rel);
          continue;
        }
        const std::string tail(Trim(cell[k].get<std::string>()));
        std::string lowered = tail;
        for (char& ch : lowered) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (tail.empty() || lowered == "none") {
          report_.Reject(reason::kEmptyTail);
          continue;
        }
        Tuple t;
        t.head = event;
        t.relation = {kg_, rel};
        t.tail = tail;
        t.source = kg_;
        t.split = split;
        t.id = kg_ + ":" + std::to_string(line_no) + ":" + rel + ":" + std::to_string(k);
        chain_.Offer(std::move(t), sink);
      }
    }
  }

 private:
  IngestReport& report_;
  detail::FilterChain chain_;
  std::string kg_;
  const RelationRegistry* registry_;
  std::vector<std::string> columns_;
  std::optional<std::size_t> split_column_;
};

struct IngestResult {
  std::vector<Tuple> tuples;
  IngestReport report;
};

// Parses `in` according to config.format. `kg` defaults per format.
inline IngestReport Ingest(std::istream& in, const IngestConfig& config, const std::string& kg,
                           const TupleSink& sink, const RelationRegistry* registry = nullptr) {
  IngestReport report;
  switch (config.format) {
    case InputFormat::kConceptNetEdges: {
      ConceptNetEdgeParser p(config, report, kg, registry);
      ForEachLine(in, [&](std::size_t n, std::string_view l) { p.Line(n, l, sink); });
      break;
    }
    case InputFormat::kGenericJsonl: {
      JsonlTupleParser p(config, report, kg, registry);
      ForEachLine(in, [&](std::size_t n, std::string_view l) { p.Line(n, l, sink); });
      break;
    }
    case InputFormat::kAtomicTsv: {
      AtomicTsvParser p(config, report, kg, registry);
      ForEachLine(in, [&](std::size_t n, std::string_view l) { p.Line(n, l, sink); });
      break;
    }
  }
  return report;
}

inline IngestReport IngestFile(const std::string& path, const IngestConfig& config, const std::string& kg,
                               const TupleSink& sink, const RelationRegistry* registry = nullptr) {
  IngestReport report;
  const auto run = [&](auto& parser) {
    ForEachLine(path, [&](std::size_t n, std::string_view l) { parser.Line(n, l, sink); });
  };
  switch (config.format) {
    case InputFormat::kConceptNetEdges: {
      ConceptNetEdgeParser p(config, report, kg, registry);
      run(p);
      break;
    }
    case InputFormat::kGenericJsonl: {
      JsonlTupleParser p(config, report, kg, registry);
      run(p);
      break;
    }
    case InputFormat::kAtomicTsv: {
      AtomicTsvParser p(config, report, kg, registry);
      run(p);
      break;
    }
  }
  return report;
}

inline IngestResult ParseConceptNetEdges(std::istream& in, const IngestConfig& config,
                                         const std::string& kg = std::string(kg::kConceptNet)) {
  IngestConfig c = config;
  c.format = InputFormat::kConceptNetEdges;
  IngestResult r;
  r.report = Ingest(in, c, kg, [&](Tuple&& t) { r.tuples.push_back(std::move(t)); });
  return r;
}

inline IngestResult ParseGenericJsonl(std::istream& in, const std::string& kg, const IngestConfig& config,
                                      const RelationRegistry* registry = nullptr) {
  IngestConfig c = config;
  c.format = InputFormat::kGenericJsonl;
  IngestResult r;
  r.report = Ingest(in, c, kg, [&](Tuple&& t) { r.tuples.push_back(std::move(t)); }, registry);
  return r;
}

inline IngestResult ParseAtomicTsv(std::istream& in, const IngestConfig& config,
                                   const std::string& kg = std::string(kg::kAtomic),
                                   const RelationRegistry* registry = nullptr) {
  IngestConfig c = config;
  c.format = InputFormat::kAtomicTsv;
  IngestResult r;
  r.report = Ingest(in, c, kg, [&](Tuple&& t) { r.tuples.push_back(std::move(t)); }, registry);
  return r;
}

// ---------------------------------------------------------------------------
// ConceptNet curation

struct CurationRules {
  std::set<std::string> remove;
  std::vector<std::string> remove_prefix;
  struct Retarget {
    std::string relation;
    std::string pattern;
    std::regex regex;
    std::string target;
  };
  std::vector<Retarget> retarget;
  struct DropFact {
    std::string relation;
    bool on_head = false;
    std::unordered_set<std::string> terms;
  };
  std::vector<DropFact> drop_fact;
  std::unordered_set<std::string> drop_ids;
  std::string version;

  static CurationRules Parse(std::string_view text, std::string_view origin = "curation_rules") {
    CurationRules rules;
    ForEachDataLine(text, [&](std::size_t line_no, const std::vector<std::string_view>& f) {
      const std::string locus = std::string(origin) + ":" + std::to_string(line_no);
      const std::string_view kind = Trim(f[0]);
      const auto need = [&](std::size_t n) {
        if (f.size() != n) throw Error("ingest", std::string(kind) + " rule needs " + std::to_string(n) + " fields", locus);
      };
      if (kind == "remove") {
        need(2);
        rules.remove.emplace(Trim(f[1]));
      } else if (kind == "remove-prefix") {
        need(2);
        rules.remove_prefix.emplace_back(Trim(f[1]));
      } else if (kind == "retarget") {
        need(4);
        Retarget r{std::string(Trim(f[1])), std::string(Trim(f[2])), {}, std::string(Trim(f[3]))};
        try {
          r.regex = std::regex(r.pattern, std::regex::ECMAScript | std::regex::optimize);
        } catch (const std::regex_error& e) {
          throw Error("ingest", "bad tail pattern: " + std::string(e.what()), locus);
        }
        rules.retarget.push_back(std::move(r));
      } else if (kind == "drop-fact") {
        need(4);
        DropFact d;
        d.relation = std::string(Trim(f[1]));
        const std::string_view side = Trim(f[2]);
        if (side != "head" && side != "tail") throw Error("ingest", "drop-fact side must be head or tail", locus);
        d.on_head = side == "head";
        for (auto term : SplitView(f[3], ',')) {
          if (!Trim(term).empty()) d.terms.emplace(Trim(term));
        }
        rules.drop_fact.push_back(std::move(d));
      } else {
        throw Error("ingest", "unknown rule kind '" + std::string(kind) + "'", locus,
                    "use remove, remove-prefix, retarget or drop-fact");
      }
    });
    rules.version = Digest().Add(text).hex();
    return rules;
  }

  static CurationRules Default() { return Parse(embedded::curation_rules_tsv, "curation_rules.tsv"); }

  // One tuple id per line.
  void AddDropIds(std::string_view text) {
    ForEachDataLine(text, [&](std::size_t, const std::vector<std::string_view>& f) {
      drop_ids.emplace(Trim(f[0]));
    });
    Digest d;
    d.Add(version);
    std::vector<std::string> sorted(drop_ids.begin(), drop_ids.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& id : sorted) d.Add(id);
    version = d.hex();
  }

  bool Removes(const std::string& relation) const {
    if (remove.count(relation)) return true;
    return std::any_of(remove_prefix.begin(), remove_prefix.end(),
                       [&](const std::string& p) { return relation.rfind(p, 0) == 0; });
  }
};

// Drops removal-list relations, deterministic facts and listed ids, then
// moves survivors into the ATOMIC-2020 vocabulary: a matching retarget rule
// wins, otherwise the mapping's primary target. Unmapped survivors pass
// through unchanged and are counted under warnings["unmapped-relation"].
class ConceptNetCurator {
 public:
  ConceptNetCurator(const RelationMapping& mapping, const CurationRules& rules, IngestReport& report)
      : mapping_(mapping), rules_(rules), report_(report) {}

  void Offer(Tuple&& t, const TupleSink& sink) {
    ++report_.read;
    if (rules_.drop_ids.count(t.id)) {
      report_.Reject(reason::kDroppedId);
      return;
    }
    if (rules_.Removes(t.relation.name)) {
      report_.Reject(reason::kRemovedRelation);
      return;
    }
    for (const auto& d : rules_.drop_fact) {
      if (d.relation != t.relation.name) continue;
      std::string side = d.on_head ? t.head : t.tail;
      for (char& c : side) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (d.terms.count(std::string(Trim(side)))) {
        report_.Reject(reason::kDeterministicFact);
        return;
      }
    }
    const MappingEntry* entry = mapping_.Find(t.relation);
    if (entry == nullptr) {
      ++report_.warnings["unmapped-relation"];
      ++report_.kept;
      sink(std::move(t));
      return;
    }
    RelationId target = entry->primary;
    for (const auto& r : rules_.retarget) {
      if (r.relation == t.relation.name && std::regex_match(t.tail, r.regex)) {
        target = {std::string(kg::kAtomic2020), r.target};
        break;
      }
    }
    t.relation = std::move(target);
    ++report_.kept;
    sink(std::move(t));
  }

 private:
  const RelationMapping& mapping_;
  const CurationRules& rules_;
  IngestReport& report_;
};

inline IngestResult ApplyConceptNetCuration(std::vector<Tuple> tuples, const RelationMapping& mapping,
                                            const CurationRules& rules) {
  IngestResult r;
  ConceptNetCurator curator(mapping, rules, r.report);
  for (auto& t : tuples) curator.Offer(std::move(t), [&](Tuple&& kept) { r.tuples.push_back(std::move(kept)); });
  return r;
}

// ---------------------------------------------------------------------------
// Tuple JSONL output and loading

inline nlohmann::ordered_json TupleToJson(const Tuple& t) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["head"] = t.head;
  j["relation"] = t.relation.name;
  j["tail"] = t.tail;
  if (t.weight) j["weight"] = *t.weight;
  if (t.split) j["split"] = ToString(*t.split);
  j["source"] = t.source;
  if (t.relation.kg != t.source) j["kg"] = t.relation.kg;
  return j;
}

inline void WriteTupleJsonl(std::ostream& out, const std::vector<Tuple>& tuples) {
  for (const auto& t : tuples) out << TupleToJson(t).dump() << '\n';
}

// Loads a canonical tuple file into a frozen KG (no filtering, no dedup).
inline KnowledgeGraph LoadKnowledgeGraph(const std::string& path, const std::string& kg,
                                         std::shared_ptr<const RelationRegistry> registry,
                                         IngestReport* report_out = nullptr) {
  IngestConfig c;
  c.format = InputFormat::kGenericJsonl;
  c.dedup_exact = false;
  KnowledgeGraph graph(kg, registry);
  const IngestReport report =
      IngestFile(path, c, kg, [&](Tuple&& t) { graph.Add(std::move(t)); }, registry.get());
  graph.Freeze();
  if (report_out) *report_out = report;
  return graph;
}

inline KnowledgeGraph MakeKnowledgeGraph(const std::string& kg, std::shared_ptr<const RelationRegistry> registry,
                                         std::vector<Tuple> tuples) {
  KnowledgeGraph graph(kg, std::move(registry));
  for (auto& t : tuples) graph.Add(std::move(t));
  graph.Freeze();
  return graph;
}

}  // namespace cskg

#endif  // CSKG_INGEST_HPP_
