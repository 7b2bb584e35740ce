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

// Automated tail-generation metrics: corpus BLEU-1..4, ROUGE-L, METEOR
// (exact + stem stages) and CIDEr-D.

#ifndef CSKG_GENMETRICS_HPP_
#define CSKG_GENMETRICS_HPP_

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cskg/common.hpp"
#include "cskg/kg_core.hpp"
#include "cskg/normalize.hpp"
#include "cskg/text.hpp"
#include "json.hpp"

namespace cskg {

struct GenerationRecord {
  std::string head;
  RelationId relation;
  std::string hypothesis;
  std::vector<std::string> references;
};

struct ScoreReport {
  std::array<double, 4> bleu = {0, 0, 0, 0};
  double rouge_l = 0.0;
  double meteor = 0.0;
  double cider = 0.0;
  std::size_t n = 0;
  std::string corpus_digest;  // digest of the references that set CIDEr document frequencies
  bool low_n = false;

  nlohmann::ordered_json ToJson() const {
    nlohmann::ordered_json j;
    for (int i = 0; i < 4; ++i) j["bleu" + std::to_string(i + 1)] = bleu[i];
    j["meteor"] = meteor;
    j["rouge_l"] = rouge_l;
    j["cider"] = cider;
    j["n"] = n;
    j["corpus_digest"] = corpus_digest;
    if (low_n) j["low_n"] = true;
    return j;
  }

  // Column order: Bleu-1..4, METEOR, ROUGE-L, CIDEr.
  std::string TsvRow(const std::string& system) const {
    std::string out = system;
    for (double b : bleu) out += "\t" + FormatFixed(b, 3);
    out += "\t" + FormatFixed(meteor, 3) + "\t" + FormatFixed(rouge_l, 3) + "\t" + FormatFixed(cider, 3) + "\n";
    return out;
  }

  static std::string TsvHeader() { return "system\tbleu1\tbleu2\tbleu3\tbleu4\tmeteor\trouge_l\tcider\n"; }
};

// Parameters recorded next to every score report.
inline nlohmann::ordered_json MetricSettings() {
  return {{"tokenizer", "lowercase, punctuation split, whitespace"},
          {"bleu", "corpus-level, closest reference length brevity penalty, zero matches -> 1e-9, "
                   "orders without hypothesis n-grams skipped"},
          {"rouge_l", "LCS F-measure, beta=1.2, max over references"},
          {"meteor", "exact then stem unigram matching, alpha=0.9, fragmentation penalty 0.5*(chunks/matches)^3 "
                     "when chunks > 1, no synonym stage"},
          {"cider", "CIDEr-D, n=1..4, df over this run's references, sigma=6, length = token count, x10"}};
}

namespace metrics {

using Tokens = std::vector<std::string>;
using NgramCounts = std::map<std::string, std::size_t>;

inline Tokens Tok(std::string_view s) { return text::Tokenize(s); }

// n-grams of order n joined with a space.
inline NgramCounts Ngrams(const Tokens& t, std::size_t n) {
  NgramCounts out;
  if (t.size() < n) return out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    std::string g = t[i];
    for (std::size_t k = 1; k < n; ++k) g.append(1, ' ').append(t[i + k]);
    ++out[g];
  }
  return out;
}

// ---------------------------------------------------------------------------
// BLEU

struct BleuStats {
  std::array<double, 4> match = {0, 0, 0, 0};
  std::array<double, 4> guess = {0, 0, 0, 0};
  double hyp_len = 0;
  double ref_len = 0;

  BleuStats& operator+=(const BleuStats& o) {
    for (int i = 0; i < 4; ++i) {
      match[i] += o.match[i];
      guess[i] += o.guess[i];
    }
    hyp_len += o.hyp_len;
    ref_len += o.ref_len;
    return *this;
  }
};

inline BleuStats BleuRecord(const Tokens& hyp, const std::vector<Tokens>& refs) {
  BleuStats s;
  s.hyp_len = static_cast<double>(hyp.size());
  // Closest reference length, shorter on ties.
  std::size_t best = refs.front().size();
  for (const auto& r : refs) {
    const auto d = [&](std::size_t len) { return len > hyp.size() ? len - hyp.size() : hyp.size() - len; };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
  }
  s.ref_len = static_cast<double>(best);
  for (std::size_t n = 1; n <= 4; ++n) {
    const NgramCounts h = Ngrams(hyp, n);
    NgramCounts max_ref;
    for (const auto& r : refs) {
      for (const auto& [g, c] : Ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
    }
    for (const auto& [g, c] : h) {
      s.guess[n - 1] += static_cast<double>(c);
      const auto it = max_ref.find(g);
      if (it != max_ref.end()) s.match[n - 1] += static_cast<double>(std::min(c, it->second));
    }
  }
  return s;
}

inline std::array<double, 4> BleuFromStats(const BleuStats& s) {
  std::array<double, 4> out = {0, 0, 0, 0};
  if (s.hyp_len == 0) return out;
  const double bp = s.hyp_len > s.ref_len ? 1.0 : std::exp(1.0 - s.ref_len / s.hyp_len);
  double log_sum = 0.0;
  int orders = 0;
  for (int n = 0; n < 4; ++n) {
    if (s.guess[n] > 0) {
      log_sum += std::log(std::max(s.match[n], 1e-9) / s.guess[n]);
      ++orders;
    }
    out[n] = orders == 0 ? 0.0 : bp * std::exp(log_sum / orders);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ROUGE-L

inline std::size_t Lcs(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline double RougeL(const Tokens& hyp, const std::vector<Tokens>& refs) {
  constexpr double kBeta2 = 1.2 * 1.2;
  double best = 0.0;
  for (const auto& r : refs) {
    const std::size_t lcs = Lcs(hyp, r);
    if (lcs == 0) continue;
    const double p = static_cast<double>(lcs) / static_cast<double>(hyp.size());
    const double rec = static_cast<double>(lcs) / static_cast<double>(r.size());
    best = std::max(best, (1.0 + kBeta2) * p * rec / (rec + kBeta2 * p));
  }
  return best;
}

// ---------------------------------------------------------------------------
// METEOR

inline std::string Stem(const std::string& w) {
  static const LemmaLexicon empty;
  return Lemmatize(w, Pos::kVerb, empty);
}

inline double MeteorPair(const Tokens& hyp, const Tokens& ref) {
  if (hyp.empty() || ref.empty()) return 0.0;
  std::vector<long> align(hyp.size(), -1);  // hyp index -> ref index
  std::vector<char> used(ref.size(), 0);
  const auto stage = [&](const Tokens& h, const Tokens& r) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (align[i] >= 0) continue;
      long prev = -1;
      for (std::size_t k = i; k-- > 0;) {
        if (align[k] >= 0) {
          prev = align[k];
          break;
        }
      }
      long pick = -1;
      const std::size_t after = static_cast<std::size_t>(prev + 1);
      if (after < r.size() && !used[after] && r[after] == h[i]) {
        pick = static_cast<long>(after);
      } else {
        for (std::size_t j = 0; j < r.size(); ++j) {
          if (!used[j] && r[j] == h[i]) {
            pick = static_cast<long>(j);
            break;
          }
        }
      }
      if (pick >= 0) {
        align[i] = pick;
        used[static_cast<std::size_t>(pick)] = 1;
      }
    }
  };
  stage(hyp, ref);
  Tokens hs, rs;
  for (const auto& w : hyp) hs.push_back(Stem(w));
  for (const auto& w : ref) rs.push_back(Stem(w));
  stage(hs, rs);

  double m = 0;
  std::size_t chunks = 0;
  long last_h = -2, last_r = -2;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (align[i] < 0) continue;
    ++m;
    if (!(static_cast<long>(i) == last_h + 1 && align[i] == last_r + 1)) ++chunks;
    last_h = static_cast<long>(i);
    last_r = align[i];
  }
  if (m == 0) return 0.0;
  const double p = m / static_cast<double>(hyp.size());
  const double r = m / static_cast<double>(ref.size());
  const double fmean = 10.0 * p * r / (r + 9.0 * p);
  const double penalty = chunks > 1 ? 0.5 * std::pow(static_cast<double>(chunks) / m, 3.0) : 0.0;
  return fmean * (1.0 - penalty);
}

inline double Meteor(const Tokens& hyp, const std::vector<Tokens>& refs) {
  double best = 0.0;
  for (const auto& r : refs) best = std::max(best, MeteorPair(hyp, r));
  return best;
}

// ---------------------------------------------------------------------------
// CIDEr-D

struct CiderVector {
  std::array<std::unordered_map<std::string, double>, 4> weight;
  std::array<double, 4> norm = {0, 0, 0, 0};
  double length = 0;
};

inline std::array<NgramCounts, 4> AllNgrams(const Tokens& t) {
  return {Ngrams(t, 1), Ngrams(t, 2), Ngrams(t, 3), Ngrams(t, 4)};
}

inline CiderVector CiderVec(const std::array<NgramCounts, 4>& counts, std::size_t length,
                            const std::unordered_map<std::string, double>& df, double log_n) {
  CiderVector v;
  v.length = static_cast<double>(length);
  for (int n = 0; n < 4; ++n) {
    for (const auto& [g, tf] : counts[n]) {
      const auto it = df.find(g);
      const double d = it == df.end() ? 0.0 : it->second;
      const double w = static_cast<double>(tf) * (log_n - std::log(std::max(1.0, d)));
      v.weight[n][g] = w;
      v.norm[n] += w * w;
    }
    v.norm[n] = std::sqrt(v.norm[n]);
  }
  return v;
}

inline double CiderSim(const CiderVector& h, const CiderVector& r) {
  constexpr double kSigma = 6.0;
  const double delta = h.length - r.length;
  double total = 0.0;
  for (int n = 0; n < 4; ++n) {
    double val = 0.0;
    for (const auto& [g, w] : h.weight[n]) {
      const auto it = r.weight[n].find(g);
      if (it != r.weight[n].end()) val += std::min(w, it->second) * it->second;
    }
    if (h.norm[n] != 0.0 && r.norm[n] != 0.0) val /= h.norm[n] * r.norm[n];
    total += val * std::exp(-(delta * delta) / (2.0 * kSigma * kSigma));
  }
  return total;
}

}  // namespace metrics

// All metrics over `records`; CIDEr document frequencies come from these
// records' references.
inline ScoreReport ScoreCorpus(const std::vector<GenerationRecord>& records, unsigned workers = 0) {
  if (records.empty()) throw Error("genmetrics", "no records to score");
  using metrics::Tokens;
  const std::size_t n = records.size();
  std::vector<Tokens> hyps(n);
  std::vector<std::vector<Tokens>> refs(n);
  Digest digest;
  for (std::size_t i = 0; i < n; ++i) {
    if (records[i].references.empty()) {
      throw Error("genmetrics", "record " + std::to_string(i) + " has no references", {},
                  "every generation needs at least one reference tail");
    }
    hyps[i] = metrics::Tok(records[i].hypothesis);
    for (const auto& r : records[i].references) {
      refs[i].push_back(metrics::Tok(r));
      digest.Add(r);
    }
    digest.Add("\x1e");
  }

  // Document frequency: records whose references contain the n-gram.
  std::unordered_map<std::string, double> df;
  std::vector<std::vector<std::array<metrics::NgramCounts, 4>>> ref_ngrams(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::map<std::string, char> present;
    for (const auto& r : refs[i]) {
      ref_ngrams[i].push_back(metrics::AllNgrams(r));
      for (const auto& counts : ref_ngrams[i].back()) {
        for (const auto& [g, c] : counts) present[g] = 1;
      }
    }
    for (const auto& [g, c] : present) df[g] += 1.0;
  }
  const double log_n = std::log(static_cast<double>(n));

  std::vector<metrics::BleuStats> bleu(n);
  std::vector<double> rouge(n), meteor(n), cider(n);
  ParallelShards(n, workers, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      bleu[i] = metrics::BleuRecord(hyps[i], refs[i]);
      rouge[i] = metrics::RougeL(hyps[i], refs[i]);
      meteor[i] = metrics::Meteor(hyps[i], refs[i]);
      const auto hv = metrics::CiderVec(metrics::AllNgrams(hyps[i]), hyps[i].size(), df, log_n);
      double sum = 0.0;
      for (std::size_t k = 0; k < refs[i].size(); ++k) {
        sum += metrics::CiderSim(hv, metrics::CiderVec(ref_ngrams[i][k], refs[i][k].size(), df, log_n));
      }
      cider[i] = sum / 4.0 / static_cast<double>(refs[i].size()) * 10.0;
    }
  });

  ScoreReport report;
  report.n = n;
  report.corpus_digest = digest.hex();
  metrics::BleuStats total;
  double rs = 0, ms = 0, cs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += bleu[i];
    rs += rouge[i];
    ms += meteor[i];
    cs += cider[i];
  }
  report.bleu = metrics::BleuFromStats(total);
  report.rouge_l = rs / static_cast<double>(n);
  report.meteor = ms / static_cast<double>(n);
  report.cider = cs / static_cast<double>(n);
  return report;
}

// Scores each relation's records on their own (CIDEr df per partition).
// Partitions with fewer than 2 records are flagged low_n.
inline std::map<std::string, ScoreReport> ScorePerRelation(const std::vector<GenerationRecord>& records,
                                                           unsigned workers = 0) {
  std::map<std::string, std::vector<GenerationRecord>> parts;
  for (const auto& r : records) parts[r.relation.ToString()].push_back(r);
  std::map<std::string, ScoreReport> out;
  for (const auto& [rel, part] : parts) {
    ScoreReport rep = ScoreCorpus(part, workers);
    rep.low_n = part.size() < 2;
    out.emplace(rel, std::move(rep));
  }
  return out;
}

// {head, relation, generation, references:[...]} per line.
inline std::vector<GenerationRecord> ParseGenerationsJsonl(std::istream& in, const std::string& kg,
                                                           std::string_view origin = "generations") {
  std::vector<GenerationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string locus = std::string(origin) + ":" + std::to_string(line_no);
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error("genmetrics", "not a JSON object", locus);
    GenerationRecord r;
    try {
      r.head = j.value("head", "");
      r.relation = {kg, j.at("relation").get<std::string>()};
      r.hypothesis = j.at("generation").get<std::string>();
      r.references = j.at("references").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error("genmetrics", std::string("bad record: ") + e.what(), locus,
                  "fields are head, relation, generation, references");
    }
    if (r.references.empty()) throw Error("genmetrics", "empty reference list", locus);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cskg

#endif  // CSKG_GENMETRICS_HPP_
