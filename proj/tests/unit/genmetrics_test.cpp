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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cskg/cskg.hpp"

namespace cskg {
namespace {

namespace m = metrics;

std::vector<GenerationRecord> LoadFixture(const std::string& name) {
  std::ifstream in(std::string(CSKG_FIXTURE_DIR) + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  return ParseGenerationsJsonl(in, "atomic2020", name);
}

nlohmann::json LoadJson(const std::string& name) {
  std::ifstream in(std::string(CSKG_FIXTURE_DIR) + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  return nlohmann::json::parse(in);
}

std::vector<m::Tokens> TokAll(const std::vector<std::string>& v) {
  std::vector<m::Tokens> out;
  for (const auto& s : v) out.push_back(m::Tok(s));
  return out;
}

void ExpectMatchesGolden(const std::string& fixture, const std::string& golden) {
  const auto records = LoadFixture(fixture);
  const auto want = LoadJson(golden);
  ASSERT_EQ(records.size(), want["records"].size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto h = m::Tok(records[i].hypothesis);
    const auto refs = TokAll(records[i].references);
    const auto& w = want["records"][i];
    const auto b = m::BleuFromStats(m::BleuRecord(h, refs));
    for (int n = 0; n < 4; ++n) EXPECT_NEAR(b[n], w["bleu"][n].get<double>(), 1e-9) << i << " bleu" << n + 1;
    EXPECT_NEAR(m::RougeL(h, refs), w["rouge_l"].get<double>(), 1e-9) << i;
    EXPECT_NEAR(m::Meteor(h, refs), w["meteor"].get<double>(), 1e-9) << i;
  }
  const auto rep = ScoreCorpus(records);
  const auto& c = want["corpus"];
  for (int n = 0; n < 4; ++n) EXPECT_NEAR(rep.bleu[n], c["bleu" + std::to_string(n + 1)].get<double>(), 1e-9);
  EXPECT_NEAR(rep.meteor, c["meteor"].get<double>(), 1e-9);
  EXPECT_NEAR(rep.rouge_l, c["rouge_l"].get<double>(), 1e-9);
  EXPECT_NEAR(rep.cider, c["cider"].get<double>(), 1e-9);
}

TEST(GenMetricsGolden, HandFixtureMatchesOracle) {
  ExpectMatchesGolden("metrics_fixture.jsonl", "metrics_fixture_golden.json");
}

TEST(GenMetricsGolden, RandomFixtureMatchesOracle) {
  ExpectMatchesGolden("metrics_random.jsonl", "metrics_random_golden.json");
}

TEST(GenMetricsExamples, HandValues) {
  // "have energy" vs {"have energy", "feel rested"}: exact copy of a reference.
  const std::vector<m::Tokens> refs = {{"have", "energy"}, {"feel", "rested"}};
  const m::Tokens hyp = {"have", "energy"};
  const auto b = m::BleuFromStats(m::BleuRecord(hyp, refs));
  EXPECT_DOUBLE_EQ(b[0], 1.0);
  EXPECT_DOUBLE_EQ(b[3], 1.0);
  EXPECT_DOUBLE_EQ(m::RougeL(hyp, refs), 1.0);
  EXPECT_DOUBLE_EQ(m::Meteor(hyp, refs), 1.0);

  // LCS("to rest and get some energy", "to get some energy") = 4; P = 4/6, R = 1.
  const m::Tokens h2 = m::Tok("to rest and get some energy");
  const double p = 4.0 / 6.0, r = 1.0, b2 = 1.44;
  EXPECT_NEAR(m::RougeL(h2, {m::Tok("to get some energy")}), (1 + b2) * p * r / (r + b2 * p), 1e-15);

  // "resting in the kitchen" vs "rests in kitchen": resting/rests meet at the stem stage.
  // 3 matches in 2 chunks: P = 3/4, R = 1.
  const double fmean = 10 * 0.75 * 1.0 / (1.0 + 9 * 0.75);
  EXPECT_NEAR(m::MeteorPair(m::Tok("resting in the kitchen"), m::Tok("rests in kitchen")),
              fmean * (1 - 0.5 * std::pow(2.0 / 3.0, 3)), 1e-15);
  EXPECT_EQ(m::Stem("resting"), m::Stem("rests"));
}

TEST(GenMetricsExamples, MeteorSingleChunkHasNoPenalty) {
  // One contiguous match: the penalty is zero.
  const double p = 1.0, r = 0.5;
  EXPECT_NEAR(m::MeteorPair({"a"}, {"a", "b"}), 10 * p * r / (r + 9 * p), 1e-15);
}

TEST(GenMetricsExamples, BleuBrevityAndSkippedOrders) {
  // One-token hypothesis: orders 2..4 have no n-grams and are skipped.
  const auto b = m::BleuFromStats(m::BleuRecord({"cat"}, {{"cat", "sat"}}));
  EXPECT_NEAR(b[0], std::exp(1.0 - 2.0), 1e-15);
  EXPECT_NEAR(b[3], b[0], 1e-15);
  // Closest reference length, ties resolve to the shorter one.
  const auto s = m::BleuRecord({"a", "b", "c"}, {{"a", "b"}, {"a", "b", "c", "d"}});
  EXPECT_EQ(s.ref_len, 2.0);
  // Zero bigram matches floor at 1e-9.
  const auto z = m::BleuFromStats(m::BleuRecord({"a", "b"}, {{"b", "a"}}));
  EXPECT_NEAR(z[1], std::sqrt(1.0 * 1e-9), 1e-18);
}

TEST(GenMetricsExamples, EmptyHypothesis) {
  const std::vector<m::Tokens> refs = {{"x"}};
  const auto b = m::BleuFromStats(m::BleuRecord({}, refs));
  for (double v : b) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(m::RougeL({}, refs), 0.0);
  EXPECT_EQ(m::Meteor({}, refs), 0.0);
}

TEST(GenMetricsExamples, ErrorsAndParsing) {
  EXPECT_THROW(ScoreCorpus({}), Error);
  GenerationRecord r;
  r.relation = {"atomic2020", "xAttr"};
  r.hypothesis = "x";
  EXPECT_THROW(ScoreCorpus({r}), Error);

  std::istringstream bad("{\"relation\":\"xAttr\",\"generation\":\"a\"}\n");
  try {
    ParseGenerationsJsonl(bad, "atomic2020", "gen.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("gen.jsonl:1"), std::string::npos) << e.what();
  }
  std::istringstream empty_refs("\n{\"relation\":\"xAttr\",\"generation\":\"a\",\"references\":[]}\n");
  EXPECT_THROW(ParseGenerationsJsonl(empty_refs, "atomic2020"), Error);
  std::istringstream not_json("nope\n");
  EXPECT_THROW(ParseGenerationsJsonl(not_json, "atomic2020"), Error);
}

// Sequences over {a, b} up to length 4 against a direct count.
TEST(GenMetricsNgrams, ExhaustiveSmallSequences) {
  std::size_t checked = 0;
  for (std::size_t len = 0; len <= 4; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      m::Tokens t;
      for (std::size_t i = 0; i < len; ++i) t.push_back((mask >> i) & 1 ? "b" : "a");
      for (std::size_t n = 1; n <= 4; ++n) {
        std::map<std::string, std::size_t> want;
        for (std::size_t i = 0; i + n <= t.size(); ++i) {
          std::string g;
          for (std::size_t k = 0; k < n; ++k) g += (k ? " " : "") + t[i + k];
          ++want[g];
        }
        const auto got = m::Ngrams(t, n);
        EXPECT_EQ(got, want);
        std::size_t total = 0;
        for (const auto& [g, c] : got) total += c;
        EXPECT_EQ(total, t.size() >= n ? t.size() - n + 1 : 0);
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 31u * 4);
}

class GenMetricsProperty : public ::testing::Test {
 protected:
  Rng rng{0xC0FFEE};

  std::string Word(const std::string& alphabet) {
    std::string w;
    const std::size_t len = 2 + rng.Below(4);
    for (std::size_t i = 0; i < len; ++i) w += alphabet[rng.Below(alphabet.size())];
    return w;
  }
  std::string Sentence(const std::string& alphabet, std::size_t lo, std::size_t hi) {
    std::string s;
    const std::size_t len = lo + rng.Below(hi - lo + 1);
    for (std::size_t i = 0; i < len; ++i) s += (i ? " " : "") + Word(alphabet);
    return s;
  }
  std::vector<GenerationRecord> Corpus(std::size_t n) {
    std::vector<GenerationRecord> out;
    const char* rels[] = {"xAttr", "xWant", "AtLocation"};
    for (std::size_t i = 0; i < n; ++i) {
      GenerationRecord r;
      r.relation = {"atomic2020", rels[rng.Below(3)]};
      r.hypothesis = Sentence("abcde", 1, 6);
      for (std::size_t k = 0, nr = 1 + rng.Below(3); k < nr; ++k) r.references.push_back(Sentence("abcde", 1, 6));
      out.push_back(std::move(r));
    }
    return out;
  }
};

TEST_F(GenMetricsProperty, IdentityScoresOne) {
  for (int i = 0; i < 1000; ++i) {
    const auto s = m::Tok(Sentence("abcdefgh", 1, 9));
    std::vector<m::Tokens> refs = {s, m::Tok(Sentence("abcdefgh", 1, 9))};
    if (rng.Below(2)) std::swap(refs[0], refs[1]);
    const auto b = m::BleuFromStats(m::BleuRecord(s, refs));
    for (double v : b) ASSERT_NEAR(v, 1.0, 1e-12);
    ASSERT_NEAR(m::RougeL(s, refs), 1.0, 1e-12);
    ASSERT_NEAR(m::Meteor(s, refs), 1.0, 1e-12);
  }
}

TEST_F(GenMetricsProperty, DisjointScoresZero) {
  std::vector<GenerationRecord> corpus;
  for (int i = 0; i < 1000; ++i) {
    GenerationRecord r;
    r.relation = {"atomic2020", "xAttr"};
    r.hypothesis = Sentence("pqr", 1, 8);
    r.references = {Sentence("xyz", 1, 8), Sentence("xyz", 1, 8)};
    const auto h = m::Tok(r.hypothesis);
    const auto refs = TokAll(r.references);
    ASSERT_EQ(m::RougeL(h, refs), 0.0);
    ASSERT_EQ(m::Meteor(h, refs), 0.0);
    ASSERT_LT(m::BleuFromStats(m::BleuRecord(h, refs))[0], 1e-8);
    corpus.push_back(std::move(r));
  }
  const auto rep = ScoreCorpus(corpus);
  EXPECT_EQ(rep.cider, 0.0);
  EXPECT_EQ(rep.meteor, 0.0);
  EXPECT_EQ(rep.rouge_l, 0.0);
}

TEST_F(GenMetricsProperty, RecordOrderDoesNotMatter) {
  for (int trial = 0; trial < 20; ++trial) {
    auto corpus = Corpus(60);
    const auto a = ScoreCorpus(corpus);
    rng.Shuffle(corpus);
    for (auto& r : corpus) rng.Shuffle(r.references);
    const auto b = ScoreCorpus(corpus);
    for (int n = 0; n < 4; ++n) EXPECT_NEAR(a.bleu[n], b.bleu[n], 1e-12);
    EXPECT_NEAR(a.meteor, b.meteor, 1e-12);
    EXPECT_NEAR(a.rouge_l, b.rouge_l, 1e-12);
    EXPECT_NEAR(a.cider, b.cider, 1e-12);
  }
}

TEST_F(GenMetricsProperty, MoreReferencesNeverLowerRougeOrMeteor) {
  for (int i = 0; i < 1000; ++i) {
    const auto h = m::Tok(Sentence("abcd", 1, 6));
    std::vector<m::Tokens> refs = {m::Tok(Sentence("abcd", 1, 6))};
    const double r0 = m::RougeL(h, refs), m0 = m::Meteor(h, refs);
    refs.push_back(m::Tok(Sentence("abcd", 1, 6)));
    ASSERT_GE(m::RougeL(h, refs), r0);
    ASSERT_GE(m::Meteor(h, refs), m0);
  }
}

TEST_F(GenMetricsProperty, CaseSpacingAndPunctuationDoNotMatter) {
  for (int trial = 0; trial < 10; ++trial) {
    auto corpus = Corpus(40);
    auto noisy = corpus;
    const auto mangle = [&](std::string s) {
      std::string out;
      for (char c : s) {
        if (c == ' ') {
          out += rng.Below(2) ? "  " : " , ";
        } else {
          out += rng.Below(2) ? static_cast<char>(c - 'a' + 'A') : c;
        }
      }
      return "  " + out + ".";
    };
    for (auto& r : noisy) {
      r.hypothesis = mangle(r.hypothesis);
      for (auto& ref : r.references) ref = mangle(ref);
    }
    const auto a = ScoreCorpus(corpus), b = ScoreCorpus(noisy);
    EXPECT_EQ(a.bleu, b.bleu);
    EXPECT_EQ(a.meteor, b.meteor);
    EXPECT_EQ(a.rouge_l, b.rouge_l);
    EXPECT_EQ(a.cider, b.cider);
  }
}

TEST_F(GenMetricsProperty, BoundsAndWorkerIndependence) {
  const auto corpus = Corpus(300);
  const auto a = ScoreCorpus(corpus, 1);
  const auto b = ScoreCorpus(corpus, 4);
  EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
  for (double v : a.bleu) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_GE(a.cider, 0.0);
  EXPECT_LE(a.cider, 10.0 + 1e-9);
  EXPECT_GE(a.meteor, 0.0);
  EXPECT_LE(a.meteor, 1.0);
}

TEST(GenMetricsExamples, CiderCopyScoresTen) {
  // Every n-gram of the copy has df 1 of 2, so each order has cosine 1.
  GenerationRecord copy, miss;
  copy.relation = miss.relation = {"atomic2020", "xAttr"};
  copy.hypothesis = "zz yy xx ww";
  copy.references = {"zz yy xx ww"};
  miss.hypothesis = "qq";
  miss.references = {"rr"};
  EXPECT_NEAR(ScoreCorpus({copy, miss}).cider, (10.0 + 0.0) / 2.0, 1e-12);
  // An n-gram present in every record's references carries no weight.
  miss.references = {"zz yy xx ww"};
  EXPECT_EQ(ScoreCorpus({copy, miss}).cider, 0.0);
}

TEST(GenMetricsPerRelation, SinglePartitionEqualsCorpus) {
  const auto records = LoadFixture("metrics_random.jsonl");
  std::vector<GenerationRecord> only;
  for (const auto& r : records) {
    if (r.relation.name == "xAttr") only.push_back(r);
  }
  ASSERT_GE(only.size(), 2u);
  const auto per = ScorePerRelation(only);
  ASSERT_EQ(per.size(), 1u);
  EXPECT_EQ(per.begin()->second.ToJson().dump(), ScoreCorpus(only).ToJson().dump());
  EXPECT_FALSE(per.begin()->second.low_n);
}

TEST(GenMetricsPerRelation, PartitionsAreLocal) {
  const auto records = LoadFixture("metrics_random.jsonl");
  const auto per = ScorePerRelation(records);
  std::vector<GenerationRecord> without;
  for (const auto& r : records) {
    if (r.relation.name != "xWant") without.push_back(r);
  }
  const auto per2 = ScorePerRelation(without);
  EXPECT_EQ(per.size(), per2.size() + 1);
  for (const auto& [rel, rep] : per2) EXPECT_EQ(rep.ToJson().dump(), per.at(rel).ToJson().dump()) << rel;
}

TEST(GenMetricsPerRelation, CiderDocumentFrequencyIsPerPartition) {
  const auto records = LoadFixture("metrics_random.jsonl");
  const auto per = ScorePerRelation(records);
  const auto all = ScoreCorpus(records);
  double weighted = 0.0;
  std::size_t n = 0;
  for (const auto& [rel, rep] : per) {
    weighted += rep.cider * static_cast<double>(rep.n);
    n += rep.n;
    EXPECT_NE(rep.corpus_digest, all.corpus_digest);
  }
  ASSERT_EQ(n, records.size());
  EXPECT_GT(std::abs(weighted / static_cast<double>(n) - all.cider), 1e-6);
  // ROUGE-L is per record, so the weighted mean recovers the corpus value.
  double rouge = 0.0;
  for (const auto& [rel, rep] : per) rouge += rep.rouge_l * static_cast<double>(rep.n);
  EXPECT_NEAR(rouge / static_cast<double>(n), all.rouge_l, 1e-12);
}

TEST(GenMetricsPerRelation, SingletonFlaggedLowN) {
  const auto records = LoadFixture("metrics_fixture.jsonl");
  const auto per = ScorePerRelation(records);
  ASSERT_EQ(per.size(), 3u);
  for (const auto& [rel, rep] : per) EXPECT_TRUE(rep.low_n) << rel;
  EXPECT_TRUE(per.begin()->second.ToJson().contains("low_n"));
}

TEST(GenMetricsReport, TsvAndSettings) {
  ScoreReport r;
  r.bleu = {0.5, 0.25, 0.125, 0.0625};
  r.meteor = 0.3;
  r.rouge_l = 0.4;
  r.cider = 1.23456;
  EXPECT_EQ(ScoreReport::TsvHeader(), "system\tbleu1\tbleu2\tbleu3\tbleu4\tmeteor\trouge_l\tcider\n");
  EXPECT_EQ(r.TsvRow("comet"), "comet\t0.500\t0.250\t0.125\t0.062\t0.300\t0.400\t1.235\n");
  const auto s = MetricSettings();
  for (const char* k : {"tokenizer", "bleu", "rouge_l", "meteor", "cider"}) EXPECT_TRUE(s.contains(k)) << k;
}

}  // namespace
}  // namespace cskg
