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
#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include "cskg/cskg.hpp"

namespace cskg {
namespace {

std::string Edge(const std::string& rel, const std::string& start, const std::string& end,
                 const std::string& meta = R"({"weight": 1.0})") {
  return "/a/[" + rel + "]\t/r/" + rel + "\t" + start + "\t" + end + "\t" + meta + "\n";
}

IngestResult Edges(const std::string& text, const IngestConfig& config = IngestConfig::ConceptNetPreset()) {
  std::istringstream in(text);
  return ParseConceptNetEdges(in, config);
}

IngestResult Jsonl(const std::string& text, IngestConfig config = {}) {
  std::istringstream in(text);
  return ParseGenericJsonl(in, "atomic2020", config, LoadDefaultRegistries().get());
}

IngestResult Tsv(const std::string& text, IngestConfig config = {}) {
  std::istringstream in(text);
  return ParseAtomicTsv(in, config, "atomic", LoadDefaultRegistries().get());
}

TEST(ConceptNetEdges, ExtractsFields) {
  const auto r = Edges(Edge("AtLocation", "/c/en/bread", "/c/en/pantry", R"({"weight": 2.0})"));
  ASSERT_EQ(r.tuples.size(), 1u);
  const Tuple& t = r.tuples[0];
  EXPECT_EQ(t.head, "bread");
  EXPECT_EQ(t.relation, (RelationId{"conceptnet", "AtLocation"}));
  EXPECT_EQ(t.tail, "pantry");
  EXPECT_EQ(t.weight, 2.0);
  EXPECT_EQ(t.source, "conceptnet");
}

TEST(ConceptNetEdges, DecodesUriTerms) {
  const auto r = Edges(Edge("UsedFor", "/c/en/ice_cream/n/wn/food", "/c/en/eat_dessert/v"));
  ASSERT_EQ(r.tuples.size(), 1u);
  EXPECT_EQ(r.tuples[0].head, "ice cream");
  EXPECT_EQ(r.tuples[0].tail, "eat dessert");
}

TEST(ConceptNetEdges, NonEnglishRejected) {
  const auto r = Edges(Edge("AtLocation", "/c/en/bread", "/c/fr/pain"));
  EXPECT_EQ(r.report.kept, 0u);
  EXPECT_EQ(r.report.rejected_by.at("non-english"), 1u);
}

TEST(ConceptNetEdges, WeightAtThresholdRejected) {
  const auto r = Edges(Edge("AtLocation", "/c/en/bread", "/c/en/pantry", R"({"weight": 0.5})"));
  EXPECT_EQ(r.report.kept, 0u);
  EXPECT_EQ(r.report.rejected_by.at("low-weight"), 1u);
  const auto above = Edges(Edge("AtLocation", "/c/en/bread", "/c/en/pantry", R"({"weight": 0.5000001})"));
  EXPECT_EQ(above.report.kept, 1u);
}

TEST(ConceptNetEdges, UnparseableWeightIsAbsent) {
  const std::string line = Edge("AtLocation", "/c/en/bread", "/c/en/pantry", R"({"weight": "heavy"})");
  EXPECT_EQ(Edges(line).report.rejected_by.at("low-weight"), 1u);
  IngestConfig open = IngestConfig::ConceptNetPreset();
  open.min_weight_exclusive.reset();
  const auto r = Edges(line, open);
  ASSERT_EQ(r.tuples.size(), 1u);
  EXPECT_FALSE(r.tuples[0].weight.has_value());
}

TEST(ConceptNetEdges, MalformedLinesNeverAbort) {
  const std::string text = "garbage\n" + Edge("AtLocation", "/c/en/a", "/c/en/b") + "/a\t/x/bad\t/c/en/a\t/c/en/b\t{}\n" +
                           Edge("AtLocation", "/c/en/", "/c/en/b") + Edge("AtLocation", "/c/en/c", "/c/en/d");
  const auto r = Edges(text);
  EXPECT_EQ(r.report.read, 5u);
  EXPECT_EQ(r.report.kept, 2u);
  EXPECT_EQ(r.report.rejected_by.at("malformed"), 3u);
  ASSERT_FALSE(r.report.samples.empty());
  EXPECT_EQ(r.report.samples[0].rfind("line 1", 0), 0u);
}

TEST(ConceptNetEdges, DuplicatesRemoved) {
  const std::string e = Edge("AtLocation", "/c/en/bread", "/c/en/pantry");
  const auto r = Edges(e + e);
  EXPECT_EQ(r.report.kept, 1u);
  EXPECT_EQ(r.report.rejected_by.at("duplicate"), 1u);
}

TEST(ConceptNetEdges, RelationLists) {
  const std::string text = Edge("AtLocation", "/c/en/a", "/c/en/b") + Edge("IsA", "/c/en/a", "/c/en/c");
  IngestConfig c = IngestConfig::ConceptNetPreset();
  c.relation_blacklist = std::set<std::string>{"IsA"};
  auto r = Edges(text, c);
  EXPECT_EQ(r.report.kept, 1u);
  EXPECT_EQ(r.report.rejected_by.at("blacklisted-relation"), 1u);
  c.relation_blacklist.reset();
  c.relation_whitelist = std::set<std::string>{"IsA"};
  r = Edges(text, c);
  EXPECT_EQ(r.report.kept, 1u);
  EXPECT_EQ(r.report.rejected_by.at("not-whitelisted"), 1u);
  c.relation_blacklist = std::set<std::string>{};
  EXPECT_THROW(Edges(text, c), Error);
}

TEST(IngestConfig, PresetsEncodeBothThresholdRules) {
  const auto cn = IngestConfig::ConceptNetPreset();
  const auto tm = IngestConfig::TransOmcsPreset();
  EXPECT_FALSE(cn.PassesWeight(0.5));
  EXPECT_TRUE(cn.PassesWeight(0.51));
  EXPECT_TRUE(tm.PassesWeight(0.5));
  EXPECT_FALSE(tm.PassesWeight(0.49));
  EXPECT_FALSE(tm.PassesWeight(std::nullopt));
  EXPECT_NE(cn.DigestHex(), tm.DigestHex());
  IngestConfig bad;
  bad.min_weight_exclusive = -1;
  EXPECT_THROW(bad.Validate(), Error);
}

TEST(GenericJsonl, KeepsPlainTuple) {
  const auto r = Jsonl(R"({"head":"bread","relation":"MadeUpOf","tail":"dough"})" "\n");
  ASSERT_EQ(r.tuples.size(), 1u);
  EXPECT_EQ(r.tuples[0].relation, (RelationId{"atomic2020", "MadeUpOf"}));
  EXPECT_EQ(r.tuples[0].id, "atomic2020:1");
}

TEST(GenericJsonl, DuplicateLineRejected) {
  const std::string line = R"({"head":"bread","relation":"MadeUpOf","tail":"dough"})" "\n";
  const auto r = Jsonl(line + line);
  EXPECT_EQ(r.report.kept, 1u);
  EXPECT_EQ(r.report.rejected_by.at("duplicate"), 1u);
  IngestConfig keep;
  keep.dedup_exact = false;
  EXPECT_EQ(Jsonl(line + line, keep).report.kept, 2u);
}

TEST(GenericJsonl, HinderedByResolves) {
  const auto r = Jsonl(R"({"head":"X runs out of steam","relation":"HinderedBy","tail":"drinks too much coffee"})" "\n");
  ASSERT_EQ(r.tuples.size(), 1u);
  EXPECT_TRUE(LoadDefaultRegistries()->Contains(r.tuples[0].relation));
}

TEST(GenericJsonl, MissingFieldsAreMalformed) {
  const auto r = Jsonl("{\"head\":\"a\",\"tail\":\"b\"}\nnot json\n{\"head\":\"a\",\"relation\":\"xWant\",\"tail\":\"  \"}\n"
                       "{\"head\":\"a\",\"relation\":\"xWant\",\"tail\":\"b\",\"split\":\"holdout\"}\n"
                       "{\"head\":\"a\",\"relation\":\"xWant\",\"tail\":\"b\",\"weight\":-2}\n");
  EXPECT_EQ(r.report.read, 5u);
  EXPECT_EQ(r.report.kept, 0u);
  EXPECT_EQ(r.report.rejected_by.at("malformed"), 5u);
}

TEST(GenericJsonl, ReadsOptionalFields) {
  const auto r = Jsonl(R"({"id":"q1","head":"a","relation":"isAfter","tail":"b","weight":0.7,"split":"dev"})" "\n");
  ASSERT_EQ(r.tuples.size(), 1u);
  EXPECT_EQ(r.tuples[0].id, "q1");
  EXPECT_EQ(r.tuples[0].relation.name, "IsAfter");
  EXPECT_EQ(r.tuples[0].weight, 0.7);
  EXPECT_EQ(r.tuples[0].split, Split::kDev);
}

TEST(GenericJsonl, WriteThenReadIsIdentity) {
  const auto r = Jsonl(R"({"id":"q1","head":"a","relation":"xWant","tail":"b","weight":0.25,"split":"test"})" "\n"
                       R"({"id":"q2","head":"c \"quoted\"","relation":"xNeed","tail":"d"})" "\n");
  std::ostringstream out;
  WriteTupleJsonl(out, r.tuples);
  EXPECT_EQ(Jsonl(out.str()).tuples, r.tuples);
}

TEST(AtomicTsv, FansOutTails) {
  const auto r = Tsv("PersonX eats breakfast\t[]\t[]\t[]\t[\"healthy\",\"hungry\"]\t[]\t[]\t[]\t[]\t[]\ttrn\n");
  ASSERT_EQ(r.tuples.size(), 2u);
  EXPECT_EQ(r.tuples[0].relation, (RelationId{"atomic", "xAttr"}));
  EXPECT_EQ(r.tuples[0].tail, "healthy");
  EXPECT_EQ(r.tuples[1].tail, "hungry");
  EXPECT_EQ(r.tuples[0].split, Split::kTrain);
}

TEST(AtomicTsv, NoneTailsDropped) {
  const auto r = Tsv("PersonX sleeps\t[]\t[]\t[]\t[]\t[]\t[]\t[]\t[]\t[\"none\"]\n");
  EXPECT_EQ(r.tuples.size(), 0u);
  EXPECT_EQ(r.report.rejected_by.at("empty-tail"), 1u);
  EXPECT_TRUE(r.report.Balanced());
}

TEST(AtomicTsv, SplitColumnTagsTuples) {
  const auto r = Tsv("PersonX sleeps\t[]\t[]\t[]\t[\"tired\"]\t[]\t[]\t[]\t[]\t[\"to rest\"]\ttest\n");
  ASSERT_EQ(r.tuples.size(), 2u);
  for (const auto& t : r.tuples) EXPECT_EQ(t.split, Split::kTest);
}

TEST(AtomicTsv, BadCellSkippedRowContinues) {
  const auto r = Tsv("PersonX sleeps\t[]\t[]\t[]\t[\"tired\"\t[]\t[]\t[]\t[]\t[\"to rest\"]\n");
  ASSERT_EQ(r.tuples.size(), 1u);
  EXPECT_EQ(r.tuples[0].relation.name, "xWant");
  EXPECT_EQ(r.report.rejected_by.at("malformed"), 1u);
  EXPECT_TRUE(r.report.Balanced());
}

TEST(AtomicTsv, HeaderSelectsColumns) {
  const auto r = Tsv("event\txWant\tprefix\tsplit\nPersonX naps\t[\"to wake\"]\t[\"nap\"]\tdev\n");
  ASSERT_EQ(r.tuples.size(), 1u);
  EXPECT_EQ(r.tuples[0].relation.name, "xWant");
  EXPECT_EQ(r.tuples[0].split, Split::kDev);
}

TEST(AtomicTsv, FixtureFile) {
  IngestResult r;
  IngestConfig c;
  c.format = InputFormat::kAtomicTsv;
  r.report = IngestFile(std::string(CSKG_FIXTURE_DIR) + "/atomic.tsv", c, "atomic",
                        [&](Tuple&& t) { r.tuples.push_back(std::move(t)); }, LoadDefaultRegistries().get());
  EXPECT_TRUE(r.report.Balanced());
  EXPECT_GT(r.report.kept, 0u);
  for (const auto& t : r.tuples) EXPECT_EQ(CheckTuple(t), "");
}

// Random ConceptNet-like streams for the property suites.
std::string RandomEdges(Rng& rng, int n) {
  static const char* langs[] = {"en", "en", "en", "fr", "de", "ja"};
  static const char* rels[] = {"AtLocation", "IsA", "UsedFor", "Desires", "CapableOf"};
  static const char* words[] = {"bread", "pantry", "cat", "milk", "sofa", "oven", "bake", "dog"};
  std::string text;
  for (int i = 0; i < n; ++i) {
    const auto roll = rng.Below(20);
    if (roll == 0) {
      text += "broken line\n";
      continue;
    }
    const std::string start = std::string("/c/") + langs[rng.Below(6)] + "/" + words[rng.Below(8)];
    const std::string end = std::string("/c/") + langs[rng.Below(6)] + "/" + words[rng.Below(8)];
    std::string meta = roll == 1 ? "{}" : "{\"weight\": " + FormatFixed(static_cast<double>(rng.Below(9)) / 4, 2) + "}";
    text += Edge(rels[rng.Below(5)], start, end, meta);
  }
  return text;
}

TEST(IngestProperties, ConservationOverRandomStreams) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string text = RandomEdges(rng, 1 + static_cast<int>(rng.Below(80)));
    const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    IngestConfig open;
    open.format = InputFormat::kConceptNetEdges;
    for (const auto& config : {IngestConfig::ConceptNetPreset(), open}) {
      const auto r = Edges(text, config);
      EXPECT_EQ(r.report.read, lines);
      EXPECT_TRUE(r.report.Balanced());
      EXPECT_EQ(r.report.kept, r.tuples.size());
    }
  }
}

TEST(IngestProperties, AddingFiltersNeverIncreasesKept) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string text = RandomEdges(rng, 60);
    IngestConfig c;
    c.format = InputFormat::kConceptNetEdges;
    c.english_only = false;
    c.dedup_exact = false;
    std::size_t prev = Edges(text, c).report.kept;
    c.english_only = true;
    std::size_t next = Edges(text, c).report.kept;
    EXPECT_LE(next, prev);
    prev = next;
    c.dedup_exact = true;
    next = Edges(text, c).report.kept;
    EXPECT_LE(next, prev);
    prev = next;
    c.min_weight_exclusive = 0.5;
    next = Edges(text, c).report.kept;
    EXPECT_LE(next, prev);
    prev = next;
    c.relation_blacklist = std::set<std::string>{"IsA"};
    next = Edges(text, c).report.kept;
    EXPECT_LE(next, prev);
  }
}

TEST(IngestProperties, Deterministic) {
  Rng rng(9);
  const std::string text = RandomEdges(rng, 500);
  const auto a = Edges(text);
  const auto b = Edges(text);
  EXPECT_EQ(a.tuples, b.tuples);
  EXPECT_EQ(a.report.ToJson(), b.report.ToJson());
}

TEST(IngestProperties, EnglishFilterExactness) {
  Rng rng(10);
  IngestConfig c;
  c.format = InputFormat::kConceptNetEdges;
  c.dedup_exact = false;
  for (int trial = 0; trial < 100; ++trial) {
    const std::string text = RandomEdges(rng, 50);
    const auto r = Edges(text, c);
    std::set<std::string> kept_ids;
    for (const auto& t : r.tuples) kept_ids.insert(t.id);
    std::size_t line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      const auto f = SplitFields(line, '\t');
      if (f.size() < 5) continue;
      const bool english = f[2].rfind("/c/en/", 0) == 0 && f[3].rfind("/c/en/", 0) == 0;
      EXPECT_EQ(kept_ids.count("conceptnet:" + std::to_string(line_no)) == 1, english) << line;
    }
  }
}

TEST(IngestFile, ReadsGzipTransparently) {
  const std::string text = Edge("AtLocation", "/c/en/bread", "/c/en/pantry") + Edge("UsedFor", "/c/en/oven", "/c/en/bake");
  const auto path = std::filesystem::temp_directory_path() / "cskg_ingest_test.csv.gz";
  gzFile f = gzopen(path.string().c_str(), "wb");
  ASSERT_NE(f, nullptr);
  gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
  gzclose(f);
  std::vector<Tuple> got;
  const auto report = IngestFile(path.string(), IngestConfig::ConceptNetPreset(), "conceptnet",
                                 [&](Tuple&& t) { got.push_back(std::move(t)); });
  std::filesystem::remove(path);
  EXPECT_EQ(report.read, 2u);
  EXPECT_EQ(got, Edges(text).tuples);
}

TEST(IngestFile, MissingFileIsError) {
  EXPECT_THROW(IngestFile("/nonexistent/cskg.tsv", IngestConfig::ConceptNetPreset(), "conceptnet", [](Tuple&&) {}),
               Error);
}

// Curation

Tuple Cn(const std::string& h, const std::string& r, const std::string& t, const std::string& id) {
  return {h, {"conceptnet", r}, t, 1.0, "conceptnet", std::nullopt, id};
}

IngestResult Curate(std::vector<Tuple> tuples) {
  return ApplyConceptNetCuration(std::move(tuples), LoadDefaultRegistries()->mapping(), CurationRules::Default());
}

TEST(Curation, DropsIsA) {
  const auto r = Curate({Cn("tortilla", "IsA", "flatbread", "1")});
  EXPECT_TRUE(r.tuples.empty());
  EXPECT_EQ(r.report.rejected_by.at("removed-relation"), 1u);
}

TEST(Curation, RemapsToPrimaryTarget) {
  const auto r = Curate({Cn("cake", "HasSubevent", "mix batter", "1"), Cn("knife", "UsedFor", "cut", "2")});
  ASSERT_EQ(r.tuples.size(), 2u);
  EXPECT_EQ(r.tuples[0].relation, (RelationId{"atomic2020", "HasSubEvent"}));
  EXPECT_EQ(r.tuples[1].relation, (RelationId{"atomic2020", "ObjectUse"}));
  EXPECT_EQ(r.tuples[0].source, "conceptnet");
}

TEST(Curation, DropsGeographicFacts) {
  const auto r = Curate({Cn("shenzhen", "AtLocation", "china", "1"), Cn("milk", "AtLocation", "fridge", "2")});
  ASSERT_EQ(r.tuples.size(), 1u);
  EXPECT_EQ(r.tuples[0].head, "milk");
  EXPECT_EQ(r.report.rejected_by.at("deterministic-fact"), 1u);
}

TEST(Curation, RetargetRules) {
  const auto r = Curate({Cn("study", "MotivatedByGoal", "because exams", "1"), Cn("study", "MotivatedByGoal", "pass", "2"),
                         Cn("dog", "HasA", "many fleas", "3"), Cn("dog", "HasA", "tail", "4")});
  ASSERT_EQ(r.tuples.size(), 4u);
  EXPECT_EQ(r.tuples[0].relation.name, "xReason");
  EXPECT_EQ(r.tuples[2].relation.name, "HasProperty");
  EXPECT_EQ(r.tuples[3].relation.name, "MadeUpOf");
}

TEST(Curation, UnmappedPassesThroughWithWarning) {
  const auto r = Curate({Cn("a", "Unheard", "b", "1")});
  ASSERT_EQ(r.tuples.size(), 1u);
  EXPECT_EQ(r.tuples[0].relation, (RelationId{"conceptnet", "Unheard"}));
  EXPECT_EQ(r.report.warnings.at("unmapped-relation"), 1u);
}

TEST(Curation, DropIdsAndPrefixRules) {
  CurationRules rules = CurationRules::Default();
  rules.AddDropIds("7\n");
  const auto r = ApplyConceptNetCuration({Cn("a", "Desires", "b", "7"), Cn("a", "dbpedia/genre", "b", "8")},
                                         LoadDefaultRegistries()->mapping(), rules);
  EXPECT_TRUE(r.tuples.empty());
  EXPECT_EQ(r.report.rejected_by.at("dropped-id"), 1u);
  EXPECT_EQ(r.report.rejected_by.at("removed-relation"), 1u);
  EXPECT_TRUE(r.report.Balanced());
}

}  // namespace
}  // namespace cskg
