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

// Concept normalization for cross-KG matching: lowercase, strip punctuation
// and stopwords, handle PersonX/Y/Z mentions, lemmatize, and build the
// normalized key index over a knowledge graph.

#ifndef CSKG_NORMALIZE_HPP_
#define CSKG_NORMALIZE_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cskg/common.hpp"
#include "cskg/embedded_data.hpp"
#include "cskg/kg_core.hpp"
#include "cskg/text.hpp"

namespace cskg {

enum class Pos { kVerb, kNoun, kAdj };

inline std::optional<Pos> ParsePos(std::string_view s) {
  if (s == "verb" || s == "v") return Pos::kVerb;
  if (s == "noun" || s == "n") return Pos::kNoun;
  if (s == "adj" || s == "a") return Pos::kAdj;
  return std::nullopt;
}

// (surface, POS) -> lemma table.
class LemmaLexicon {
 public:
  static LemmaLexicon Parse(std::string_view text, std::string_view origin = "lemmas") {
    LemmaLexicon lex;
    ForEachDataLine(text, [&](std::size_t line_no, const std::vector<std::string_view>& f) {
      const std::string locus = std::string(origin) + ":" + std::to_string(line_no);
      if (f.size() != 3) throw Error("normalize", "lexicon row needs surface, pos, lemma", locus);
      const auto pos = ParsePos(Trim(f[1]));
      if (!pos) throw Error("normalize", "unknown POS '" + std::string(f[1]) + "'", locus);
      const std::string surface(Trim(f[0]));
      const std::string lemma(Trim(f[2]));
      if (surface.empty() || lemma.empty()) throw Error("normalize", "empty lexicon field", locus);
      if (!lex.table_[static_cast<int>(*pos)].emplace(surface, lemma).second) {
        throw Error("normalize", "duplicate lexicon entry for '" + surface + "'", locus);
      }
    });
    return lex;
  }

  const std::string* Find(std::string_view surface, Pos pos) const {
    const auto& table = table_[static_cast<int>(pos)];
    const auto it = table.find(std::string(surface));
    return it == table.end() ? nullptr : &it->second;
  }

  std::size_t size() const {
    return table_[0].size() + table_[1].size() + table_[2].size();
  }

  template <typename Fn>
  void ForEach(Fn&& fn) const {
    for (int p = 0; p < 3; ++p) {
      for (const auto& [surface, lemma] : table_[p]) fn(surface, static_cast<Pos>(p), lemma);
    }
  }

 private:
  std::array<std::unordered_map<std::string, std::string>, 3> table_;
};

namespace detail {

inline bool IsVowelAt(std::string_view w, std::size_t i) {
  const char c = w[i];
  if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return true;
  return c == 'y' && i > 0 && !IsVowelAt(w, i - 1);
}

inline bool HasVowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (IsVowelAt(w, i)) return true;
  }
  return false;
}

// Number of vowel-consonant sequences, [C](VC)^m[V].
inline int Measure(std::string_view w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = IsVowelAt(w, i);
    if (!v && prev_vowel) ++m;
    prev_vowel = v;
  }
  return m;
}

// Consonant-vowel-consonant ending whose last letter is not w, x or y.
inline bool EndsCvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  if (last == 'w' || last == 'x' || last == 'y') return false;
  return !IsVowelAt(w, n - 3) && IsVowelAt(w, n - 2) && !IsVowelAt(w, n - 1);
}

inline bool EndsWith(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

inline bool IsAsciiWord(std::string_view w) {
  return std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

// Repairs a stem left after removing -ed/-ing: undouble a final consonant
// or restore a silent e.
inline std::string RestoreStem(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !IsVowelAt(stem, n - 1)) {
    const char c = stem[n - 1];
    if (c != 'l' && c != 's' && c != 'z') stem.pop_back();
    return stem;
  }
  const auto with_e = [&] { return stem + "e"; };
  if (EndsWith(stem, "v")) return with_e();
  if (EndsWith(stem, "bl") || EndsWith(stem, "iz")) return with_e();
  if (n >= 3 && EndsWith(stem, "at") && !IsVowelAt(stem, n - 3)) return with_e();
  if (n >= 3 && EndsWith(stem, "c")) return with_e();
  if (n >= 3 && (stem[n - 1] == 's' || stem[n - 1] == 'z') && IsVowelAt(stem, n - 2) &&
      IsVowelAt(stem, n - 3)) {
    return with_e();
  }
  if (n >= 3 && stem[n - 1] == 'z') return with_e();
  if (Measure(stem) == 1 && EndsCvc(stem)) return with_e();
  return stem;
}

// One suffix-stripping step; returns the input when no rule applies.
inline std::string SuffixRule(const std::string& w, Pos pos) {
  if (!IsAsciiWord(w)) {
    // Non-ASCII tokens only get the plain plural rule.
    if (w.size() >= 4 && EndsWith(w, "s") && !EndsWith(w, "ss")) return w.substr(0, w.size() - 1);
    return w;
  }
  const std::size_t n = w.size();
  if (pos == Pos::kAdj) return w;
  if (EndsWith(w, "s")) {
    if (n >= 5 && EndsWith(w, "ies")) return w.substr(0, n - 3) + "y";
    if (n >= 5 && (EndsWith(w, "sses") || EndsWith(w, "shes") || EndsWith(w, "ches") ||
                   EndsWith(w, "xes") || EndsWith(w, "zzes"))) {
      return w.substr(0, n - 2);
    }
    if (n >= 4 && !EndsWith(w, "ss") && !EndsWith(w, "us") && !EndsWith(w, "is")) {
      return w.substr(0, n - 1);
    }
    return w;
  }
  if (pos != Pos::kVerb) return w;
  if (EndsWith(w, "eed")) return w;
  if (n >= 5 && EndsWith(w, "ied")) return w.substr(0, n - 3) + "y";
  if (n >= 4 && EndsWith(w, "ed")) {
    const std::string stem = w.substr(0, n - 2);
    return HasVowel(stem) ? RestoreStem(stem) : w;
  }
  if (n >= 5 && EndsWith(w, "ing")) {
    const std::string stem = w.substr(0, n - 3);
    return HasVowel(stem) ? RestoreStem(stem) : w;
  }
  return w;
}

}  // namespace detail

// Lexicon lookup (preferred POS first, then the others) with suffix-rule
// fallback, iterated to a fixed point so that lemmatizing a lemma is a no-op.
inline std::string Lemmatize(const std::string& word, Pos preferred, const LemmaLexicon& lexicon) {
  std::string current = word;
  for (int step = 0; step < 12; ++step) {
    std::string next;
    if (const std::string* hit = lexicon.Find(current, preferred)) {
      next = *hit;
    } else {
      const std::string* other = nullptr;
      for (Pos p : {Pos::kVerb, Pos::kNoun, Pos::kAdj}) {
        if (p == preferred) continue;
        if ((other = lexicon.Find(current, p)) != nullptr) break;
      }
      next = other ? *other : detail::SuffixRule(current, preferred);
    }
    if (next == current || next.empty()) return current;
    current = std::move(next);
  }
  return current;
}

struct NormalizerConfig {
  std::unordered_set<std::string> stopwords;
  std::shared_ptr<const LemmaLexicon> lexicon;
  std::string person_token = "person";
  std::string blank_token = "blank";
  std::string version;  // digest of stopwords + lexicon + tokens

  // Shipped stopword list and lexicon.
  static NormalizerConfig Default() {
    static const NormalizerConfig shared =
        FromData(embedded::stopwords_txt, embedded::lemmas_tsv);
    return shared;
  }

  static NormalizerConfig FromData(std::string_view stopwords_text, std::string_view lemmas_text,
                                   std::string person = "person", std::string blank = "blank") {
    NormalizerConfig cfg;
    ForEachDataLine(stopwords_text, [&](std::size_t, const std::vector<std::string_view>& f) {
      cfg.stopwords.emplace(Trim(f[0]));
    });
    cfg.lexicon = std::make_shared<LemmaLexicon>(LemmaLexicon::Parse(lemmas_text));
    cfg.person_token = std::move(person);
    cfg.blank_token = std::move(blank);
    cfg.version = Digest()
                      .Add(stopwords_text)
                      .Add(lemmas_text)
                      .Add(cfg.person_token)
                      .Add(cfg.blank_token)
                      .hex();
    cfg.Validate();
    return cfg;
  }

  // Throws when the invariants do not hold.
  void Validate() const {
    for (const auto& w : stopwords) {
      if (text::Tokenize(w) != std::vector<std::string>{w}) {
        throw Error("normalize", "stopword '" + w + "' is not a single lowercase token");
      }
    }
    for (const std::string* token : {&person_token, &blank_token}) {
      if (text::Tokenize(*token) != std::vector<std::string>{*token}) {
        throw Error("normalize", "'" + *token + "' is not a single lowercase token");
      }
      if (stopwords.count(*token)) throw Error("normalize", "'" + *token + "' is a stopword");
      if (lexicon) {
        for (Pos p : {Pos::kVerb, Pos::kNoun}) {
          if (Lemmatize(*token, p, *lexicon) != *token) {
            throw Error("normalize", "'" + *token + "' is not its own lemma");
          }
        }
      }
    }
    if (!lexicon) throw Error("normalize", "normalizer has no lemma lexicon");
  }
};

namespace detail {

// Private-use code point standing in for a "___" blank until output.
inline constexpr std::string_view kBlankSentinel = "\xEE\x80\x80";  // U+E000

inline bool IsPersonMention(std::string_view token) {
  return token == "personx" || token == "persony" || token == "personz";
}

inline bool UsesPersonRule(std::string_view kg) {
  return kg == kg::kAtomic || kg == kg::kAtomic2020;
}

// Runs of two or more underscores become the blank sentinel.
inline std::string MarkBlanks(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '_') {
      std::size_t j = i;
      while (j < s.size() && s[j] == '_') ++j;
      if (j - i >= 2) {
        out += ' ';
        out += kBlankSentinel;
        out += ' ';
      } else {
        out += ' ';
      }
      i = j;
      continue;
    }
    out += s[i++];
  }
  return out;
}

}  // namespace detail

// Canonical token string for a head or tail concept. Steps, in order:
// lowercase, collapse whitespace, strip punctuation; for ATOMIC-family KGs
// drop a leading PersonX/Y/Z and replace later ones with person_token;
// remove stopwords; lemmatize (verb reading for the first token of
// multi-token phrases, noun otherwise); emit "___" as blank_token.
inline std::string NormalizeConcept(std::string_view text, std::string_view kg,
                                    const NormalizerConfig& config) {
  std::vector<std::string> tokens = text::Tokenize(detail::MarkBlanks(text));

  if (detail::UsesPersonRule(kg)) {
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (detail::IsPersonMention(tokens[i])) {
        if (i == 0) continue;
        kept.push_back(config.person_token);
      } else {
        kept.push_back(std::move(tokens[i]));
      }
    }
    tokens = std::move(kept);
  }

  std::erase_if(tokens, [&](const std::string& t) { return config.stopwords.count(t) != 0; });

  const bool phrase = tokens.size() >= 2;
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string word;
    if (tokens[i] == detail::kBlankSentinel) {
      word = config.blank_token;
    } else {
      const Pos pos = (i == 0 && phrase) ? Pos::kVerb : Pos::kNoun;
      word = Lemmatize(tokens[i], pos, *config.lexicon);
      // A lemma that would be filtered on a second pass keeps its surface.
      if (config.stopwords.count(word) || detail::IsPersonMention(word)) word = tokens[i];
    }
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Keys and index

struct NormalizedKey {
  std::string head_key;
  RelationId relation;  // in the mapped (target) space
  std::string tail_key;

  friend auto operator<=>(const NormalizedKey&, const NormalizedKey&) = default;
  friend bool operator==(const NormalizedKey&, const NormalizedKey&) = default;

  bool degenerate() const { return head_key.empty() || tail_key.empty(); }

  // Flat form used as a hash key; 0x1f never survives tokenization.
  std::string Encode() const {
    std::string out;
    out.reserve(head_key.size() + tail_key.size() + relation.kg.size() + relation.name.size() + 3);
    out += head_key;
    out += '\x1f';
    out += relation.kg;
    out += ':';
    out += relation.name;
    out += '\x1f';
    out += tail_key;
    return out;
  }

  static NormalizedKey Decode(std::string_view flat) {
    const auto parts = SplitView(flat, '\x1f');
    NormalizedKey key;
    key.head_key = std::string(parts.at(0));
    const auto rel = parts.at(1);
    const auto colon = rel.find(':');
    key.relation = {std::string(rel.substr(0, colon)), std::string(rel.substr(colon + 1))};
    key.tail_key = std::string(parts.at(2));
    return key;
  }
};

// One key per mapped target relation (a single key in primary-only mode).
// Unmapped relations give an empty result.
inline std::vector<NormalizedKey> NormalizeTuple(const Tuple& t, const RelationMapping& mapping,
                                                 MatchMode mode, const NormalizerConfig& config) {
  const std::vector<RelationId> targets = mapping.Targets(t.relation, mode);
  if (targets.empty()) return {};
  const std::string head = NormalizeConcept(t.head, t.relation.kg, config);
  const std::string tail = NormalizeConcept(t.tail, t.relation.kg, config);
  std::vector<NormalizedKey> keys;
  keys.reserve(targets.size());
  for (const auto& target : targets) keys.push_back({head, target, tail});
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

struct IndexDiagnostics {
  std::size_t tuples = 0;
  std::size_t unmapped = 0;    // relation has no mapping entry
  std::size_t degenerate = 0;  // empty head or tail key
  std::size_t indexed = 0;     // tuples contributing at least one matchable key
};

// Normalized keys of one KG: per-tuple key lists, the distinct key set with
// multiplicities, and the degenerate bucket excluded from matching.
class NormalizedIndex {
 public:
  // key -> indices of tuples (into the KG's tuple vector) that produce it
  using Postings = std::vector<std::uint32_t>;

  std::size_t size() const { return postings_.size(); }
  bool Contains(const std::string& encoded) const { return postings_.count(encoded) != 0; }

  const Postings* Find(const std::string& encoded) const {
    const auto it = postings_.find(encoded);
    return it == postings_.end() ? nullptr : &it->second;
  }

  std::size_t Multiplicity(const std::string& encoded) const {
    const Postings* p = Find(encoded);
    return p ? p->size() : 0;
  }

  const std::unordered_map<std::string, Postings>& postings() const { return postings_; }
  const Postings& degenerate_bucket() const { return degenerate_; }
  const IndexDiagnostics& diagnostics() const { return diagnostics_; }

  // Encoded matchable keys of tuple i, sorted.
  const std::vector<std::string>& KeysOf(std::size_t tuple_index) const { return tuple_keys_[tuple_index]; }
  std::size_t tuple_count() const { return tuple_keys_.size(); }

  std::vector<std::string> SortedKeys() const {
    std::vector<std::string> keys;
    keys.reserve(postings_.size());
    for (const auto& [k, p] : postings_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    return keys;
  }

 private:
  friend NormalizedIndex BuildNormalizedIndex(const KnowledgeGraph&, const RelationMapping&, MatchMode,
                                              const NormalizerConfig&, unsigned);

  std::unordered_map<std::string, Postings> postings_;
  Postings degenerate_;
  std::vector<std::vector<std::string>> tuple_keys_;
  IndexDiagnostics diagnostics_;
};

// Normalizes every tuple (sharded over `workers`) and merges in tuple order,
// so the result does not depend on the worker count.
inline NormalizedIndex BuildNormalizedIndex(const KnowledgeGraph& graph, const RelationMapping& mapping,
                                            MatchMode mode, const NormalizerConfig& config,
                                            unsigned workers = 0) {
  const auto& tuples = graph.tuples();
  const std::size_t n = tuples.size();
  NormalizedIndex index;
  index.tuple_keys_.resize(n);
  std::vector<char> unmapped(n, 0), degenerate(n, 0);

  ParallelShards(n, workers, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto keys = NormalizeTuple(tuples[i], mapping, mode, config);
      if (keys.empty()) {
        unmapped[i] = 1;
        continue;
      }
      if (keys.front().degenerate()) {  // head/tail shared by all keys of a tuple
        degenerate[i] = 1;
        continue;
      }
      auto& out = index.tuple_keys_[i];
      out.reserve(keys.size());
      for (const auto& k : keys) out.push_back(k.Encode());
    }
  });

  index.postings_.reserve(n);
  auto& diag = index.diagnostics_;
  diag.tuples = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (unmapped[i]) {
      ++diag.unmapped;
      continue;
    }
    if (degenerate[i]) {
      ++diag.degenerate;
      index.degenerate_.push_back(static_cast<std::uint32_t>(i));
      continue;
    }
    ++diag.indexed;
    for (const auto& k : index.tuple_keys_[i]) index.postings_[k].push_back(static_cast<std::uint32_t>(i));
  }
  return index;
}

}  // namespace cskg

#endif  // CSKG_NORMALIZE_HPP_
