// Copyright 2026 The relaxtag Authors.
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

#include "model_dir.h"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "relaxtag/corpus.h"
#include "relaxtag/error.h"

namespace relaxtag::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char *kFormatVersion = "1";

std::string Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string DigestKey(std::string_view file) { return fmt::format("sha256.{}", file); }

std::string RuleKey(const ConstraintPattern &p, const TagSet &tagset) {
  return FormatConstraint(p, tagset, false);
}

}  // namespace

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read {}", path.string()));
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void WriteFile(const fs::path &path, const std::string &contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  if (!out.flush()) throw DataError(fmt::format("cannot write {}", path.string()));
}

std::string Sha256Hex(const std::string &data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::map<std::string, std::string> ParseKeyValues(const std::string &text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) throw DataError("expected key = value", number);
    const std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    if (key.empty()) throw DataError("empty key", number);
    out[key] = Trim(std::string_view(trimmed).substr(eq + 1));
  }
  return out;
}

void AssignCompatibilities(std::vector<ConstraintPattern> &rules, const HandCounts &counts,
                           const TagSet &tagset, const AlgorithmSpec &spec,
                           std::optional<double> beta, double tiny) {
  std::vector<std::size_t> estimated;
  std::vector<PairCounts> pairs;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto it = counts.find(RuleKey(rules[r], tagset));
    if (it != counts.end()) {
      estimated.push_back(r);
      pairs.push_back(it->second);
    } else if (!rules[r].compatibility) {
      throw DataError(fmt::format("no compatibility value or training counts for {}",
                                  RuleKey(rules[r], tagset)),
                      rules[r].line);
    }
  }
  const std::vector<double> values =
      HandCompatibilities(pairs, spec.measure, spec.confiner, beta, tiny);
  for (std::size_t k = 0; k < estimated.size(); ++k) {
    rules[estimated[k]].compatibility = values[k];
  }
}

void WriteModelDir(const TrainInputs &inputs, const fs::path &dir) {
  const TagSet tagset =
      InFile(inputs.tagset_name, [&] { return TagSet::Parse(inputs.tagset_text); });
  const Corpus corpus = InFile(inputs.corpus_name,
                               [&] { return ParseTaggedCorpus(inputs.corpus_text, tagset); });
  const Lexicon lexicon = BuildLexicon(corpus);
  const StatModel model = EstimateModel(corpus, lexicon, tagset, inputs.tiny);

  std::vector<ConstraintPattern> rules;
  HandCounts counts;
  if (inputs.rules_text) {
    rules = InFile(inputs.rules_name,
                   [&] { return ParseConstraints(*inputs.rules_text, tagset); });
    for (const ConstraintPattern &p : rules) {
      if (!p.compatibility) counts[RuleKey(p, tagset)] = CountPattern(p, corpus);
    }
    InFile(inputs.rules_name, [&] {
      AssignCompatibilities(rules, counts, tagset, ParseAlgorithmName(inputs.annotate_with),
                            inputs.beta, inputs.tiny);
    });
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  WriteModelTables(model, tagset, dir);
  WriteFile(dir / kTagSetFile, tagset.Serialize());

  std::vector<std::string> files = {kTagSetFile};
  files.insert(files.end(), std::begin(kModelTableNames), std::end(kModelTableNames));
  if (inputs.rules_text) {
    WriteFile(dir / kRulesFile, FormatConstraints(rules, tagset));
    WriteHandCounts(counts, dir / kHandCountsFile);
    files.push_back(kRulesFile);
    files.push_back(kHandCountsFile);
  } else {
    fs::remove(dir / kRulesFile, ec);
    fs::remove(dir / kHandCountsFile, ec);
  }

  std::string manifest = "# relaxtag model directory\n";
  manifest += fmt::format("format = {}\n", kFormatVersion);
  manifest += fmt::format("corpus.sha256 = {}\n", Sha256Hex(inputs.corpus_text));
  manifest += fmt::format("tiny = {}\n", inputs.tiny);
  manifest += fmt::format("tokens = {}\n", model.num_tokens());
  manifest += fmt::format("sequences = {}\n", model.num_sequences());
  if (inputs.rules_text) manifest += fmt::format("rule_values = {}\n", inputs.annotate_with);
  for (const std::string &file : files) {
    manifest += fmt::format("{} = {}\n", DigestKey(file), Sha256Hex(ReadFile(dir / file)));
  }
  WriteFile(dir / kManifestFile, manifest);
}

ModelDir LoadModelDir(const fs::path &dir) {
  ModelDir out;
  out.manifest = ParseKeyValues(ReadFile(dir / kManifestFile));
  const auto field = [&](const std::string &key) -> const std::string & {
    const auto it = out.manifest.find(key);
    if (it == out.manifest.end()) {
      throw DataError(fmt::format("{}: manifest has no {}", dir.string(), key));
    }
    return it->second;
  };
  if (field("format") != kFormatVersion) {
    throw DataError(fmt::format("{}: unsupported model format {}", dir.string(),
                                field("format")));
  }

  std::vector<std::string> files = {kTagSetFile};
  files.insert(files.end(), std::begin(kModelTableNames), std::end(kModelTableNames));
  const bool has_rules = out.manifest.count(DigestKey(kRulesFile)) > 0;
  if (has_rules) {
    files.push_back(kRulesFile);
    files.push_back(kHandCountsFile);
  }
  for (const std::string &file : files) {
    if (Sha256Hex(ReadFile(dir / file)) != field(DigestKey(file))) {
      throw DataError(fmt::format("{}: {} does not match the manifest (stale model?)",
                                  dir.string(), file));
    }
  }

  out.tagset = InFile((dir / kTagSetFile).string(),
                      [&] { return TagSet::Load(dir / kTagSetFile); });
  out.model = InFile(dir.string(), [&] { return ReadModelTables(out.tagset, dir); });
  if (fmt::format("{}", out.model.tiny()) != field("tiny") ||
      std::to_string(out.model.num_tokens()) != field("tokens")) {
    throw DataError(fmt::format("{}: tables disagree with the manifest", dir.string()));
  }
  if (has_rules) {
    out.rules = InFile((dir / kRulesFile).string(),
                       [&] { return LoadConstraints(dir / kRulesFile, out.tagset); });
    out.hand_counts = InFile((dir / kHandCountsFile).string(),
                             [&] { return ReadHandCounts(dir / kHandCountsFile); });
  }
  return out;
}

}  // namespace relaxtag::cli
