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

// cskg: command-line front end for ingestion, normalization, comparison,
// splitting, export, scoring and annotation aggregation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cskg/cskg.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kInputs = "Inputs";
constexpr const char* kOutputs = "Outputs";

struct Globals {
  unsigned threads = 0;
  std::uint64_t seed = 13;
  std::string data_dir;
  std::string mapping;
};

// Identity of one run: tool version, config digest and seed.
struct Provenance {
  std::string command;
  std::string digest;
  std::uint64_t seed = 0;

  ordered_json ToJson() const {
    return {{"tool", "cskg"}, {"tool_version", cskg::kToolVersion}, {"command", command},
            {"config_digest", digest}, {"seed", seed}};
  }
  std::string TsvHeader() const {
    return "# cskg " + std::string(cskg::kToolVersion) + " command=" + command + " config_digest=" + digest +
           " seed=" + std::to_string(seed) + "\n";
  }
};

std::string FileDigest(const std::string& path) {
  cskg::Digest d;
  if (!fs::exists(path)) return "missing";
  std::ifstream in(path, std::ios::binary);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    d.Add(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return d.hex();
}

// Digest of a subcommand's effective options. Output locations are excluded
// and input files contribute their content, so equal digests mean equal
// artifacts.
Provenance MakeProvenance(const CLI::App& sub, const Globals& g, const cskg::Resources& res) {
  cskg::Digest d;
  d.Add(cskg::kToolVersion).Add(sub.get_name()).Add(res.digest).Add(g.seed);
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_group() == kOutputs || opt->get_name() == "--help") continue;
    d.Add(opt->get_name());
    for (const auto& r : opt->results()) {
      d.Add(r);
      if (opt->get_group() == kInputs) {
        const auto eq = r.find('=');
        d.Add(FileDigest(eq == std::string::npos ? r : r.substr(eq + 1)));
      }
    }
  }
  return {sub.get_name(), d.hex(), g.seed};
}

void WriteBytes(const std::string& path, const std::string& bytes) {
  if (path == "-") {
    std::cout << bytes;
    return;
  }
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cskg::Error("cli", "cannot write output", path, "check that the directory is writable");
  out << bytes;
}

void WriteJson(const std::string& path, const ordered_json& body, const Provenance& prov) {
  ordered_json j;
  j["meta"] = prov.ToJson();
  for (const auto& [k, v] : body.items()) j[k] = v;
  WriteBytes(path, j.dump(2) + "\n");
}

void WriteTsv(const std::string& path, const std::string& body, const Provenance& prov) {
  WriteBytes(path, prov.TsvHeader() + body);
}

// JSONL, CSV and plain text carry their provenance in "<path>.meta.json".
void WriteWithSidecar(const std::string& path, const std::string& body, const Provenance& prov,
                      const ordered_json& extra = ordered_json::object()) {
  WriteBytes(path, body);
  if (path == "-") return;
  ordered_json meta = prov.ToJson();
  for (const auto& [k, v] : extra.items()) meta[k] = v;
  WriteBytes(path + ".meta.json", meta.dump(2) + "\n");
}

void WriteReport(const std::string& path, const std::string& format, const ordered_json& json,
                 const std::string& tsv, const Provenance& prov) {
  if (format == "json") {
    WriteJson(path, json, prov);
  } else {
    WriteTsv(path, tsv, prov);
  }
}

std::string TuplesJsonl(const std::vector<cskg::Tuple>& tuples) {
  std::ostringstream os;
  cskg::WriteTupleJsonl(os, tuples);
  return os.str();
}

cskg::MatchMode ParseMode(const std::string& s) {
  const auto m = cskg::ParseMatchMode(s);
  if (!m) throw cskg::Error("cli", "unknown match mode '" + s + "'", {}, "use primary-only or all-targets");
  return *m;
}

std::array<double, 3> ParseRatios(const std::string& s) {
  const auto parts = cskg::SplitFields(s, ',');
  if (parts.size() != 3) throw cskg::Error("split", "ratios need three comma-separated values", {}, "e.g. 0.8,0.1,0.1");
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    try {
      std::size_t used = 0;
      out[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw cskg::Error("split", "bad ratio '" + parts[i] + "'", {}, "e.g. 0.8,0.1,0.1");
    }
  }
  return out;
}

std::set<std::string> ParseList(const std::string& s) {
  std::set<std::string> out;
  for (const auto& p : cskg::SplitFields(s, ',')) {
    if (!cskg::Trim(p).empty()) out.emplace(cskg::Trim(p));
  }
  return out;
}

// "id=path" pairs.
std::vector<std::pair<std::string, std::string>> ParseNamedInputs(const std::vector<std::string>& items) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw cskg::Error("cli", "expected KG=PATH, got '" + item + "'", {}, "e.g. --kg atomic=atomic.jsonl");
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

void RequireFile(const std::string& path) {
  if (!fs::exists(path)) throw cskg::Error("cli", "input file does not exist", path, "check the path");
}

void PrintIngestSummary(const std::string& path, const cskg::IngestReport& r) {
  std::cerr << path << ": read " << r.read << ", kept " << r.kept;
  for (const auto& [reason, n] : r.rejected_by) std::cerr << ", " << reason << " " << n;
  for (const auto& [w, n] : r.warnings) std::cerr << ", warning " << w << " " << n;
  std::cerr << "\n";
  for (const auto& s : r.samples) std::cerr << "  malformed " << s << "\n";
}

// ---------------------------------------------------------------------------
// Ingest options shared by `ingest` and `pipeline`

struct IngestOptions {
  std::string format = "generic-jsonl";
  std::string preset = "none";
  double min_weight = -1.0;
  bool keep_equal = false;
  std::string whitelist;
  std::string blacklist;
  bool all_languages = false;
  bool no_dedup = false;

  void Register(CLI::App* sub) {
    sub->add_option("--format", format, "Input format: conceptnet-edges, generic-jsonl, atomic-tsv")
        ->capture_default_str();
    sub->add_option("--preset", preset, "Filter preset: none, conceptnet (weight > 0.5), transomcs (weight >= 0.5)")
        ->capture_default_str();
    sub->add_option("--min-weight", min_weight, "Reject tuples with weight below (or equal to) this value");
    sub->add_flag("--keep-equal", keep_equal, "Keep tuples whose weight equals --min-weight");
    sub->add_option("--whitelist", whitelist, "Comma-separated relations to keep");
    sub->add_option("--blacklist", blacklist, "Comma-separated relations to drop");
    sub->add_flag("--all-languages", all_languages, "Keep non-English ConceptNet edges");
    sub->add_flag("--no-dedup", no_dedup, "Keep exact duplicate tuples");
  }

  cskg::IngestConfig Build() const {
    cskg::IngestConfig c;
    if (preset == "conceptnet") {
      c = cskg::IngestConfig::ConceptNetPreset();
    } else if (preset == "transomcs") {
      c = cskg::IngestConfig::TransOmcsPreset();
    } else if (preset != "none") {
      throw cskg::Error("ingest", "unknown preset '" + preset + "'", {}, "use none, conceptnet or transomcs");
    }
    const auto f = cskg::ParseInputFormat(format);
    if (!f) throw cskg::Error("ingest", "unknown format '" + format + "'", {}, "use conceptnet-edges, generic-jsonl or atomic-tsv");
    c.format = *f;
    if (min_weight >= 0.0) c.min_weight_exclusive = min_weight;
    if (keep_equal) c.keep_equal = true;
    if (!whitelist.empty()) c.relation_whitelist = ParseList(whitelist);
    if (!blacklist.empty()) c.relation_blacklist = ParseList(blacklist);
    c.english_only = !all_languages;
    c.dedup_exact = !no_dedup;
    c.Validate();
    return c;
  }
};

std::string DefaultKgFor(cskg::InputFormat f) {
  switch (f) {
    case cskg::InputFormat::kConceptNetEdges: return std::string(cskg::kg::kConceptNet);
    case cskg::InputFormat::kAtomicTsv: return std::string(cskg::kg::kAtomic);
    case cskg::InputFormat::kGenericJsonl: return std::string(cskg::kg::kAtomic2020);
  }
  return std::string(cskg::kg::kAtomic2020);
}

cskg::KnowledgeGraph IngestToGraph(const std::string& path, const cskg::IngestConfig& config, const std::string& kg,
                                   const cskg::Resources& res, cskg::IngestReport& report) {
  RequireFile(path);
  cskg::KnowledgeGraph graph(kg, res.registry);
  report = cskg::IngestFile(path, config, kg, [&](cskg::Tuple&& t) { graph.Add(std::move(t)); }, res.registry.get());
  graph.Freeze();
  return graph;
}

cskg::KnowledgeGraph LoadGraph(const std::string& path, const std::string& kg, const cskg::Resources& res) {
  RequireFile(path);
  cskg::IngestReport report;
  auto graph = cskg::LoadKnowledgeGraph(path, kg, res.registry, &report);
  if (report.rejected() > 0) PrintIngestSummary(path, report);
  return graph;
}

// Writes train/dev/test tuple files, the assignment and the split report.
void WriteSplitArtifacts(const std::string& dir, const cskg::KnowledgeGraph& kg, const cskg::SplitResult& result,
                         const cskg::SplitConfig& config, const Provenance& prov) {
  for (cskg::Split s : cskg::kAllSplits) {
    const std::string name = std::string(cskg::ToString(s));
    WriteWithSidecar((fs::path(dir) / (name + ".jsonl")).string(), TuplesJsonl(cskg::TuplesInSplit(kg, result, s)),
                     prov);
  }
  WriteWithSidecar((fs::path(dir) / "assignment.jsonl").string(), result.AssignmentJsonl(), prov);
  ordered_json report = result.SummaryJson();
  report["config"] = {{"ratios", config.ratios},
                      {"max_head_tuples_eval", config.max_head_tuples_eval},
                      {"min_confidence", config.min_confidence ? ordered_json(*config.min_confidence) : ordered_json()},
                      {"preserve_upstream", config.preserve_upstream}};
  WriteJson((fs::path(dir) / "split_report.json").string(), report, prov);
}

std::string TrainingLines(const std::vector<cskg::Tuple>& tuples, const cskg::TrainingLineOptions& opts) {
  std::string out;
  for (const auto& t : tuples) {
    out += cskg::RenderTrainingLine(t, opts);
    out += '\n';
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cskg: commonsense knowledge graph toolkit"};
  app.set_version_flag("--version", std::string(cskg::kToolVersion));
  app.set_config("--config", "", "TOML config file; [section] per subcommand, every key overridable by flag");
  app.require_subcommand(1);
  Globals g;
  if (const char* env = std::getenv("CSKG_DATA_DIR")) g.data_dir = env;
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--seed", g.seed, "Top-level random seed")->capture_default_str();
  app.add_option("--data-dir", g.data_dir, "Directory overriding shipped data tables (env CSKG_DATA_DIR)");
  app.add_option("--mapping", g.mapping, "Relation mapping file overriding the shipped one");

  std::function<void()> run;
  const auto resources = [&] {
    return cskg::Resources::Load(g.data_dir.empty() ? std::nullopt : std::optional<std::string>(g.data_dir),
                                 g.mapping.empty() ? std::nullopt : std::optional<std::string>(g.mapping));
  };

  // ingest -------------------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "Parse and filter a KG dump into canonical tuple JSONL");
  struct {
    std::string input, kg, output, drop_ids, report;
    bool curate = false;
    IngestOptions opts;
  } in_args;
  ingest->add_option("--input", in_args.input, "KG dump (gzip accepted)")->required()->group(kInputs);
  ingest->add_option("--kg", in_args.kg, "KG identifier (default from format)");
  in_args.opts.Register(ingest);
  ingest->add_flag("--curate", in_args.curate, "Apply ConceptNet curation and map relations into ATOMIC-2020");
  ingest->add_option("--drop-ids", in_args.drop_ids, "File of tuple ids to drop during curation")->group(kInputs);
  ingest->add_option("--output", in_args.output, "Canonical tuple JSONL")->required()->group(kOutputs);
  ingest->add_option("--report", in_args.report, "Ingest report JSON")->group(kOutputs);
  ingest->callback([&] {
    run = [&] {
      const auto res = resources();
      const auto config = in_args.opts.Build();
      const std::string kg = in_args.kg.empty() ? DefaultKgFor(config.format) : in_args.kg;
      RequireFile(in_args.input);
      std::vector<cskg::Tuple> tuples;
      cskg::IngestReport report = cskg::IngestFile(
          in_args.input, config, kg, [&](cskg::Tuple&& t) { tuples.push_back(std::move(t)); }, res.registry.get());
      PrintIngestSummary(in_args.input, report);
      ordered_json extra{{"ingest", report.ToJson()}};
      if (in_args.curate) {
        cskg::CurationRules rules = res.curation;
        if (!in_args.drop_ids.empty()) rules.AddDropIds(cskg::ReadFile(in_args.drop_ids));
        auto curated = cskg::ApplyConceptNetCuration(std::move(tuples), *res.mapping, rules);
        PrintIngestSummary("curation", curated.report);
        extra["curation"] = curated.report.ToJson();
        tuples = std::move(curated.tuples);
      }
      const Provenance prov = MakeProvenance(*ingest, g, res);
      WriteWithSidecar(in_args.output, TuplesJsonl(tuples), prov, extra);
      if (!in_args.report.empty()) WriteJson(in_args.report, extra, prov);
    };
  });

  // normalize ----------------------------------------------------------------
  auto* normalize = app.add_subcommand("normalize", "Dump normalized keys of a tuple file as JSONL");
  struct {
    std::string input, kg = "atomic2020", mode = "all-targets", output = "-";
  } norm_args;
  normalize->add_option("--input", norm_args.input, "Canonical tuple JSONL")->required()->group(kInputs);
  normalize->add_option("--kg", norm_args.kg, "KG identifier")->capture_default_str();
  normalize->add_option("--mode", norm_args.mode, "primary-only or all-targets")->capture_default_str();
  normalize->add_option("--output", norm_args.output, "Key JSONL ('-' = stdout)")->group(kOutputs);
  normalize->callback([&] {
    run = [&] {
      const auto res = resources();
      const auto mode = ParseMode(norm_args.mode);
      const auto graph = LoadGraph(norm_args.input, norm_args.kg, res);
      std::string out;
      cskg::IndexDiagnostics diag;
      diag.tuples = graph.size();
      for (const auto& t : graph.tuples()) {
        const auto keys = cskg::NormalizeTuple(t, *res.mapping, mode, res.normalizer);
        if (keys.empty()) {
          ++diag.unmapped;
          out += nlohmann::json{{"id", t.id}, {"status", "unmapped"}}.dump() + "\n";
          continue;
        }
        const bool degenerate = keys.front().degenerate();
        degenerate ? ++diag.degenerate : ++diag.indexed;
        for (const auto& k : keys) {
          ordered_json j{{"id", t.id},
                         {"head_key", k.head_key},
                         {"relation", k.relation.ToString()},
                         {"tail_key", k.tail_key}};
          if (degenerate) j["status"] = "degenerate";
          out += j.dump() + "\n";
        }
      }
      std::cerr << "tuples " << diag.tuples << ", indexed " << diag.indexed << ", unmapped " << diag.unmapped
                << ", degenerate " << diag.degenerate << "\n";
      WriteWithSidecar(norm_args.output, out, MakeProvenance(*normalize, g, res),
                       {{"normalizer_version", res.normalizer.version},
                        {"diagnostics", {{"tuples", diag.tuples}, {"indexed", diag.indexed},
                                         {"unmapped", diag.unmapped}, {"degenerate", diag.degenerate}}}});
    };
  });

  // compare ------------------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "Coverage precision/recall between KGs");
  struct {
    std::string source, source_kg, target, target_kg, mode = "all-targets", format = "tsv", output = "-";
    std::vector<std::string> kgs;
  } cmp_args;
  compare->add_option("--source", cmp_args.source, "Source tuple JSONL")->group(kInputs);
  compare->add_option("--source-kg", cmp_args.source_kg, "Source KG id");
  compare->add_option("--target", cmp_args.target, "Target tuple JSONL")->group(kInputs);
  compare->add_option("--target-kg", cmp_args.target_kg, "Target KG id");
  compare->add_option("--kg", cmp_args.kgs, "KG=PATH, repeated, for the full pairwise matrix")->group(kInputs);
  compare->add_option("--mode", cmp_args.mode, "primary-only or all-targets")->capture_default_str();
  compare->add_option("--format", cmp_args.format, "json or tsv")->capture_default_str()
      ->check(CLI::IsMember({"json", "tsv"}));
  compare->add_option("--output", cmp_args.output, "Report path ('-' = stdout)")->group(kOutputs);
  compare->callback([&] {
    run = [&] {
      const auto res = resources();
      const auto mode = ParseMode(cmp_args.mode);
      const Provenance prov = MakeProvenance(*compare, g, res);
      if (!cmp_args.kgs.empty()) {
        std::vector<cskg::KnowledgeGraph> graphs;
        for (const auto& [id, path] : ParseNamedInputs(cmp_args.kgs)) graphs.push_back(LoadGraph(path, id, res));
        std::vector<const cskg::KnowledgeGraph*> ptrs;
        for (const auto& gr : graphs) ptrs.push_back(&gr);
        const auto reports = cskg::CoverageMatrix(ptrs, *res.mapping, mode, res.normalizer, g.threads);
        ordered_json j{{"reports", ordered_json::array()}};
        for (const auto& r : reports) j["reports"].push_back(r.ToJson());
        const std::string tsv = cskg::CoverageMatrixToTsv(reports, "precision") + "\n" +
                                cskg::CoverageMatrixToTsv(reports, "recall_raw") + "\n" +
                                cskg::CoverageMatrixToTsv(reports, "recall_dedup");
        WriteReport(cmp_args.output, cmp_args.format, j, tsv, prov);
        return;
      }
      if (cmp_args.source.empty() || cmp_args.target.empty()) {
        throw cskg::Error("compare", "need --source and --target, or at least two --kg", {},
                          "e.g. --source a.jsonl --source-kg atomic --target b.jsonl --target-kg atomic2020");
      }
      const auto source = LoadGraph(cmp_args.source, cmp_args.source_kg.empty() ? "source" : cmp_args.source_kg, res);
      const auto target = LoadGraph(cmp_args.target, cmp_args.target_kg.empty() ? "target" : cmp_args.target_kg, res);
      const auto report = cskg::Coverage(source, target, *res.mapping, mode, res.normalizer, g.threads);
      WriteReport(cmp_args.output, cmp_args.format, report.ToJson(), cskg::CoverageToTsv(report), prov);
    };
  });

  // split --------------------------------------------------------------------
  auto* split = app.add_subcommand("split", "Head-disjoint train/dev/test split");
  struct {
    std::string input, kg = "atomic2020", ratios, output_dir;
    std::size_t cap = 500;
    double min_confidence = -1.0;
    bool preserve_upstream = false;
  } split_args;
  split->add_option("--input", split_args.input, "Canonical tuple JSONL")->required()->group(kInputs);
  split->add_option("--kg", split_args.kg, "KG identifier")->capture_default_str();
  split->add_option("--ratios", split_args.ratios, "train,dev,test (default: ATOMIC-2020 proportions)");
  split->add_option("--cap", split_args.cap, "Max tuples per dev/test head")->capture_default_str();
  split->add_option("--min-confidence", split_args.min_confidence, "Drop tuples with weight below this");
  split->add_flag("--preserve-upstream", split_args.preserve_upstream, "Keep upstream split tags per head");
  split->add_option("--output-dir", split_args.output_dir, "Directory for split files")->required()->group(kOutputs);
  const auto build_split_config = [&](const std::string& ratios, std::size_t cap, double min_conf, bool preserve) {
    cskg::SplitConfig c;
    if (!ratios.empty()) c.ratios = ParseRatios(ratios);
    c.max_head_tuples_eval = cap;
    if (min_conf >= 0.0) c.min_confidence = min_conf;
    c.preserve_upstream = preserve;
    c.seed = cskg::DeriveSeed(g.seed, "split");
    c.Validate();
    return c;
  };
  split->callback([&] {
    run = [&] {
      const auto config = build_split_config(split_args.ratios, split_args.cap, split_args.min_confidence,
                                             split_args.preserve_upstream);
      const auto res = resources();
      const auto graph = LoadGraph(split_args.input, split_args.kg, res);
      const auto result = cskg::MakeAdversarialSplit(graph, config, res.normalizer, g.threads);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      WriteSplitArtifacts(split_args.output_dir, graph, result, config, MakeProvenance(*split, g, res));
      std::cerr << "train " << result.counts[0] << ", dev " << result.counts[1] << ", test " << result.counts[2]
                << ", dropped " << result.dropped_low_confidence << "\n";
    };
  });

  // score --------------------------------------------------------------------
  auto* score = app.add_subcommand("score", "BLEU/METEOR/ROUGE-L/CIDEr of generated tails");
  struct {
    std::string input, kg = "atomic2020", system = "system", format = "tsv", output = "-";
    bool per_relation = false;
  } score_args;
  score->add_option("--input", score_args.input, "Generations JSONL {head, relation, generation, references}")
      ->required()->group(kInputs);
  score->add_option("--kg", score_args.kg, "KG of the relations")->capture_default_str();
  score->add_option("--system", score_args.system, "System name for the TSV row")->capture_default_str();
  score->add_flag("--per-relation", score_args.per_relation, "Also score each relation separately");
  score->add_option("--format", score_args.format, "json or tsv")->capture_default_str()
      ->check(CLI::IsMember({"json", "tsv"}));
  score->add_option("--output", score_args.output, "Report path ('-' = stdout)")->group(kOutputs);
  score->callback([&] {
    run = [&] {
      const auto res = resources();
      RequireFile(score_args.input);
      std::ifstream in(score_args.input);
      const auto records = cskg::ParseGenerationsJsonl(in, score_args.kg, score_args.input);
      const auto report = cskg::ScoreCorpus(records, g.threads);
      ordered_json j{{"settings", cskg::MetricSettings()}, {"overall", report.ToJson()}};
      std::string tsv = cskg::ScoreReport::TsvHeader() + report.TsvRow(score_args.system);
      if (score_args.per_relation) {
        for (const auto& [rel, r] : cskg::ScorePerRelation(records, g.threads)) {
          j["per_relation"][rel] = r.ToJson();
          tsv += r.TsvRow(score_args.system + ":" + rel + (r.low_n ? ":low-n" : ""));
        }
      }
      WriteReport(score_args.output, score_args.format, j, tsv, MakeProvenance(*score, g, res));
    };
  });

  // sample-hits --------------------------------------------------------------
  auto* sample = app.add_subcommand("sample-hits", "Sample tuples into 5-tuple same-relation HITs");
  struct {
    std::string input, kg = "atomic2020", output;
    std::size_t n = 3000;
  } sample_args;
  sample->add_option("--input", sample_args.input, "Canonical tuple JSONL")->required()->group(kInputs);
  sample->add_option("--kg", sample_args.kg, "KG identifier")->capture_default_str();
  sample->add_option("-n,--count", sample_args.n, "Tuples to sample")->capture_default_str();
  sample->add_option("--output", sample_args.output, "HIT CSV")->required()->group(kOutputs);
  sample->callback([&] {
    run = [&] {
      const auto res = resources();
      const auto graph = LoadGraph(sample_args.input, sample_args.kg, res);
      const auto hits = cskg::SampleForEval(graph, sample_args.n, cskg::DeriveSeed(g.seed, "sample-hits"), res.templates);
      std::size_t short_hits = 0;
      for (const auto& h : hits) short_hits += h.short_hit;
      if (short_hits) std::cerr << "warning: " << short_hits << " short HIT(s)\n";
      WriteWithSidecar(sample_args.output, cskg::HitsToCsv(hits), MakeProvenance(*sample, g, res),
                       {{"hits", hits.size()}, {"short_hits", short_hits}});
    };
  });

  // aggregate-votes ----------------------------------------------------------
  auto* votes = app.add_subcommand("aggregate-votes", "Majority labels, accuracy breakdown and Fleiss' kappa");
  struct {
    std::string ratings, hits, baseline, kappa_space = "binarized", format = "tsv", output = "-", labels;
  } vote_args;
  votes->add_option("--ratings", vote_args.ratings, "Ratings CSV (hit_id, tuple_id, worker_id, label)")
      ->required()->group(kInputs);
  votes->add_option("--hits", vote_args.hits, "HIT CSV from sample-hits")->required()->group(kInputs);
  votes->add_option("--baseline", vote_args.baseline, "KG used as the significance baseline");
  votes->add_option("--kappa-space", vote_args.kappa_space, "binarized or likert")->capture_default_str()
      ->check(CLI::IsMember({"binarized", "likert"}));
  votes->add_option("--format", vote_args.format, "json or tsv")->capture_default_str()
      ->check(CLI::IsMember({"json", "tsv"}));
  votes->add_option("--output", vote_args.output, "Accuracy report ('-' = stdout)")->group(kOutputs);
  votes->add_option("--labels", vote_args.labels, "Per-tuple final labels CSV")->group(kOutputs);
  votes->callback([&] {
    run = [&] {
      const auto res = resources();
      const auto ratings = cskg::ParseRatingsCsv(cskg::ReadFile(vote_args.ratings), vote_args.ratings);
      const auto hits = cskg::ParseHitsCsv(cskg::ReadFile(vote_args.hits), vote_args.hits);
      const auto records = cskg::AggregateRatings(ratings);
      const auto labeled = cskg::JoinAnnotations(records, hits);
      const auto report = cskg::AccuracyBreakdown(labeled, *res.registry, res.cognates, vote_args.baseline);
      for (const auto& d : report.diagnostics) std::cerr << "note: " << d << "\n";

      const auto space = vote_args.kappa_space == "likert" ? cskg::KappaSpace::kLikert : cskg::KappaSpace::kBinarized;
      std::map<std::size_t, std::size_t> rater_counts;
      for (const auto& r : records) ++rater_counts[r.ratings.size()];
      std::size_t raters = 0, best = 0;
      for (const auto& [n, c] : rater_counts) {
        if (c > best) best = c, raters = n;
      }
      ordered_json kappa{{"space", cskg::ToString(space)}, {"raters_per_item", raters}};
      std::size_t skipped = 0;
      const auto counts = cskg::KappaCounts(records, space, raters, &skipped);
      if (skipped) std::cerr << "warning: " << skipped << " tuple(s) without " << raters << " ratings left out of kappa\n";
      if (raters >= 2 && !counts.empty()) {
        const auto k = cskg::FleissKappa(counts);
        kappa["kappa"] = k.kappa;
        kappa["items"] = k.items;
        kappa["degenerate"] = k.degenerate;
      } else {
        kappa["kappa"] = nullptr;
      }
      kappa["skipped_items"] = skipped;

      ordered_json j = report.ToJson();
      j["fleiss_kappa"] = kappa;
      j["tuples"] = records.size();
      std::string tsv = report.ToTsv();
      tsv += "# fleiss_kappa(" + std::string(cskg::ToString(space)) + ")=" +
             (kappa["kappa"].is_null() ? std::string("NA") : cskg::FormatFixed(kappa["kappa"].get<double>(), 4)) + "\n";
      const Provenance prov = MakeProvenance(*votes, g, res);
      WriteReport(vote_args.output, vote_args.format, j, tsv, prov);
      if (!vote_args.labels.empty()) {
        std::string csv = cskg::CsvRow({"tuple_id", "final_label", "ratings"});
        for (const auto& r : records) {
          csv += cskg::CsvRow({r.tuple_id, std::string(cskg::ToString(r.final_label)), std::to_string(r.ratings.size())});
        }
        WriteWithSidecar(vote_args.labels, csv, prov);
      }
    };
  });

  // export-training ----------------------------------------------------------
  auto* export_training = app.add_subcommand("export-training", "Write 'HEAD REL [GEN] TAIL [SEP]' lines");
  struct {
    std::string input, kg = "atomic2020", split = "all", output;
    bool wrap = false;
  } train_args;
  export_training->add_option("--input", train_args.input, "Canonical tuple JSONL")->required()->group(kInputs);
  export_training->add_option("--kg", train_args.kg, "KG identifier")->capture_default_str();
  export_training->add_option("--split", train_args.split, "Only tuples tagged with this split, or all")
      ->capture_default_str()->check(CLI::IsMember({"all", "train", "dev", "test"}));
  export_training->add_flag("--wrap-relation", train_args.wrap, "Render the relation as <name>");
  export_training->add_option("--output", train_args.output, "Training text file")->required()->group(kOutputs);
  export_training->callback([&] {
    run = [&] {
      const auto res = resources();
      const auto graph = LoadGraph(train_args.input, train_args.kg, res);
      std::vector<cskg::Tuple> chosen;
      for (const auto& t : graph.tuples()) {
        if (train_args.split == "all" || (t.split && cskg::ToString(*t.split) == train_args.split)) chosen.push_back(t);
      }
      cskg::TrainingLineOptions opts;
      opts.wrap_relation = train_args.wrap;
      WriteWithSidecar(train_args.output, TrainingLines(chosen, opts), MakeProvenance(*export_training, g, res),
                       {{"lines", chosen.size()}, {"wrap_relation", train_args.wrap}});
    };
  });

  // export-prompts -----------------------------------------------------------
  auto* export_prompts = app.add_subcommand("export-prompts", "Few-shot (or zero-shot) prompts for query tuples");
  struct {
    std::string queries, pool, kg = "atomic2020", output;
    std::size_t k = 5;
  } prompt_args;
  export_prompts->add_option("--queries", prompt_args.queries, "Tuples whose heads are queried")->required()->group(kInputs);
  export_prompts->add_option("--pool", prompt_args.pool, "Training tuples to draw examples from")->group(kInputs);
  export_prompts->add_option("--kg", prompt_args.kg, "KG identifier")->capture_default_str();
  export_prompts->add_option("-k,--examples", prompt_args.k, "Examples per prompt")->capture_default_str();
  export_prompts->add_option("--output", prompt_args.output, "Prompt JSONL")->required()->group(kOutputs);
  export_prompts->callback([&] {
    run = [&] {
      const auto res = resources();
      const auto queries = LoadGraph(prompt_args.queries, prompt_args.kg, res);
      std::vector<cskg::Tuple> pool;
      if (!prompt_args.pool.empty()) pool = LoadGraph(prompt_args.pool, prompt_args.kg, res).tuples();
      const std::uint64_t base = cskg::DeriveSeed(g.seed, "export-prompts");
      std::string out;
      for (const auto& q : queries.tuples()) {
        const auto block = cskg::BuildFewshotBlock(q.relation, q.head, pool, prompt_args.k,
                                                   cskg::DeriveSeed(base, q.id), res.templates);
        ordered_json j{{"id", q.id},
                       {"relation", q.relation.name},
                       {"prompt", block.text},
                       {"example_ids", block.example_ids},
                       {"reference", q.tail}};
        out += j.dump() + "\n";
      }
      WriteWithSidecar(prompt_args.output, out, MakeProvenance(*export_prompts, g, res),
                       {{"k", prompt_args.k}, {"temperature", 0.4}, {"decoding_seeds", 3}});
    };
  });

  // stats --------------------------------------------------------------------
  auto* stats = app.add_subcommand("stats", "Tuple counts per relation and category");
  struct {
    std::string input, kg = "atomic2020", format = "tsv", output = "-";
  } stats_args;
  stats->add_option("--input", stats_args.input, "Canonical tuple JSONL")->required()->group(kInputs);
  stats->add_option("--kg", stats_args.kg, "KG identifier")->capture_default_str();
  stats->add_option("--format", stats_args.format, "json or tsv")->capture_default_str()
      ->check(CLI::IsMember({"json", "tsv"}));
  stats->add_option("--output", stats_args.output, "Report path ('-' = stdout)")->group(kOutputs);
  stats->callback([&] {
    run = [&] {
      const auto res = resources();
      const auto graph = LoadGraph(stats_args.input, stats_args.kg, res);
      const auto s = cskg::ComputeStats(graph);
      if (s.unknown_relations) {
        std::cerr << "warning: " << s.unknown_relations << " tuple(s) with relations outside the registry counted as other\n";
      }
      WriteReport(stats_args.output, stats_args.format, s.ToJson(), s.ToTsv(), MakeProvenance(*stats, g, res));
    };
  });

  // pipeline -----------------------------------------------------------------
  auto* pipeline = app.add_subcommand("pipeline", "ingest -> normalize -> compare | split | export");
  struct {
    std::string task = "compare", mode = "all-targets", ratios, output_dir;
    std::vector<std::string> inputs;
    std::size_t cap = 500;
    double min_confidence = -1.0;
    bool preserve_upstream = false, wrap = false;
    IngestOptions opts;
  } pipe_args;
  pipeline->add_option("--task", pipe_args.task, "compare, split or export")->capture_default_str()
      ->check(CLI::IsMember({"compare", "split", "export"}));
  pipeline->add_option("--input", pipe_args.inputs, "KG=PATH, repeated")->required()->group(kInputs);
  pipe_args.opts.Register(pipeline);
  pipeline->add_option("--mode", pipe_args.mode, "primary-only or all-targets")->capture_default_str();
  pipeline->add_option("--ratios", pipe_args.ratios, "train,dev,test");
  pipeline->add_option("--cap", pipe_args.cap, "Max tuples per dev/test head")->capture_default_str();
  pipeline->add_option("--min-confidence", pipe_args.min_confidence, "Drop tuples with weight below this");
  pipeline->add_flag("--preserve-upstream", pipe_args.preserve_upstream, "Keep upstream split tags per head");
  pipeline->add_flag("--wrap-relation", pipe_args.wrap, "Render training-line relations as <name>");
  pipeline->add_option("--output-dir", pipe_args.output_dir, "Artifact directory")->required()->group(kOutputs);
  pipeline->callback([&] {
    run = [&] {
      // Everything that can be checked without reading inputs is checked first.
      const auto ingest_config = pipe_args.opts.Build();
      const auto mode = ParseMode(pipe_args.mode);
      const auto named = ParseNamedInputs(pipe_args.inputs);
      std::optional<cskg::SplitConfig> split_config;
      if (pipe_args.task != "compare") {
        split_config = build_split_config(pipe_args.ratios, pipe_args.cap, pipe_args.min_confidence,
                                          pipe_args.preserve_upstream);
        if (named.size() != 1) throw cskg::Error("cli", pipe_args.task + " pipeline takes exactly one --input");
      } else if (named.size() < 2) {
        throw cskg::Error("cli", "compare pipeline needs at least two --input KG=PATH");
      }
      for (const auto& [id, path] : named) RequireFile(path);
      const auto res = resources();
      const Provenance prov = MakeProvenance(*pipeline, g, res);

      std::vector<cskg::KnowledgeGraph> graphs;
      ordered_json ingest_reports = ordered_json::object();
      for (const auto& [id, path] : named) {
        cskg::IngestReport report;
        graphs.push_back(IngestToGraph(path, ingest_config, id, res, report));
        PrintIngestSummary(path, report);
        ingest_reports[id] = report.ToJson();
      }
      const fs::path dir(pipe_args.output_dir);
      WriteJson((dir / "ingest_report.json").string(), {{"ingest", ingest_reports}}, prov);

      if (pipe_args.task == "compare") {
        std::vector<const cskg::KnowledgeGraph*> ptrs;
        for (const auto& gr : graphs) ptrs.push_back(&gr);
        const auto reports = cskg::CoverageMatrix(ptrs, *res.mapping, mode, res.normalizer, g.threads);
        ordered_json j{{"reports", ordered_json::array()}};
        for (const auto& r : reports) j["reports"].push_back(r.ToJson());
        WriteJson((dir / "coverage.json").string(), j, prov);
        WriteTsv((dir / "coverage.tsv").string(),
                 cskg::CoverageMatrixToTsv(reports, "precision") + "\n" +
                     cskg::CoverageMatrixToTsv(reports, "recall_raw") + "\n" +
                     cskg::CoverageMatrixToTsv(reports, "recall_dedup"),
                 prov);
        return;
      }
      const auto& graph = graphs.front();
      const auto result = cskg::MakeAdversarialSplit(graph, *split_config, res.normalizer, g.threads);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      WriteSplitArtifacts(pipe_args.output_dir, graph, result, *split_config, prov);
      if (pipe_args.task == "export") {
        const auto train = cskg::TuplesInSplit(graph, result, cskg::Split::kTrain);
        cskg::TrainingLineOptions opts;
        opts.wrap_relation = pipe_args.wrap;
        const std::string lines = TrainingLines(train, opts);
        const auto n = static_cast<std::size_t>(std::count(lines.begin(), lines.end(), '\n'));
        if (n != result.counts[0]) {
          throw cskg::Error("cli", "training export has " + std::to_string(n) + " lines for " +
                                       std::to_string(result.counts[0]) + " train tuples");
        }
        WriteWithSidecar((dir / "train.txt").string(), lines, prov, {{"lines", n}});
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (run) run();
  } catch (const cskg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: [cli] " << e.what() << "\n";
    return 2;
  }
  return 0;
}
