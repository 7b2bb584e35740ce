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

// Bundle of the data tables every command needs, loaded from the embedded
// defaults or, file by file, from an override directory.

#ifndef CSKG_RESOURCES_HPP_
#define CSKG_RESOURCES_HPP_

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "cskg/common.hpp"
#include "cskg/compare.hpp"
#include "cskg/embedded_data.hpp"
#include "cskg/ingest.hpp"
#include "cskg/kg_core.hpp"
#include "cskg/normalize.hpp"
#include "cskg/verbalize.hpp"

namespace cskg {

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read file", path, "check the path and permissions");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Resources {
  std::shared_ptr<const RelationRegistry> registry;
  std::shared_ptr<const RelationMapping> mapping;
  NormalizerConfig normalizer;
  TemplateTable templates;
  CognateGroups cognates;
  CurationRules curation;
  std::string digest;  // over every table's text

  // Tables come from `dir` when it holds a file of the same name, else from
  // the embedded defaults. `mapping_path` overrides the mapping alone.
  static Resources Load(const std::optional<std::string>& dir = std::nullopt,
                        const std::optional<std::string>& mapping_path = std::nullopt) {
    Digest d;
    const auto table = [&](const char* name, std::string_view fallback) {
      std::string text(fallback);
      if (dir) {
        const auto p = std::filesystem::path(*dir) / name;
        if (std::filesystem::exists(p)) text = ReadFile(p.string());
      }
      d.Add(name).Add(text);
      return text;
    };
    Resources r;
    const std::string relations = table("relations.tsv", embedded::relations_tsv);
    const std::string aliases = table("relation_aliases.tsv", embedded::relation_aliases_tsv);
    std::string mapping_text = table("mapping.tsv", embedded::mapping_tsv);
    if (mapping_path) {
      mapping_text = ReadFile(*mapping_path);
      d.Add("mapping-override").Add(mapping_text);
    }
    auto registry = std::make_shared<RelationRegistry>(RelationRegistry::Parse(relations, aliases, "relations.tsv"));
    auto mapping = std::make_shared<RelationMapping>(
        RelationMapping::Parse(mapping_text, mapping_path ? *mapping_path : "mapping.tsv"));
    const auto violations = ValidateMapping(*mapping, *registry);
    if (!violations.empty()) {
      throw Error("kg_core", "invalid relation mapping: " + violations.front(), mapping_path.value_or("mapping.tsv"),
                  std::to_string(violations.size()) + " violation(s); every relation must be in the registry");
    }
    registry->set_mapping(mapping);
    r.registry = registry;
    r.mapping = mapping;
    r.normalizer = NormalizerConfig::FromData(table("stopwords.txt", embedded::stopwords_txt),
                                              table("lemmas.tsv", embedded::lemmas_tsv));
    r.templates = TemplateTable::Parse(table("templates.tsv", embedded::templates_tsv), *registry, "templates.tsv");
    r.cognates = CognateGroups::Parse(table("cognate_groups.tsv", embedded::cognate_groups_tsv));
    r.curation = CurationRules::Parse(table("curation_rules.tsv", embedded::curation_rules_tsv));
    r.digest = d.hex();
    return r;
  }
};

}  // namespace cskg

#endif  // CSKG_RESOURCES_HPP_
