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

#ifndef RELAXTAG_TOOLS_MODEL_DIR_H_
#define RELAXTAG_TOOLS_MODEL_DIR_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relaxtag/constraints.h"
#include "relaxtag/error.h"
#include "relaxtag/model.h"
#include "relaxtag/relax.h"
#include "relaxtag/tagset.h"

namespace relaxtag::cli {

// Whole file as a string. Throws DataError when it cannot be read.
std::string ReadFile(const std::filesystem::path &path);
void WriteFile(const std::filesystem::path &path, const std::string &contents);

// Runs fn, prefixing the message of any DataError with `name`.
template <typename Fn>
auto InFile(const std::string &name, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DataError &e) {
    throw DataError(name + ": " + e.what());
  }
}

// Lowercase hex SHA-256.
std::string Sha256Hex(const std::string &data);

// "key = value" lines; '#' starts a comment line. Throws DataError naming
// the line of a malformed entry.
std::map<std::string, std::string> ParseKeyValues(const std::string &text);

// A trained model directory:
//   manifest.txt      digests and training parameters
//   tagset.tags       copy of the training tag set
//   lexical.tsv, bigram.tsv, trigram.tsv, start.tsv
//   constraints.rules hand-written rules with compatibility values (optional)
//   hand_counts.tsv   pattern counts behind the estimated values (optional)
struct ModelDir {
  TagSet tagset;
  StatModel model;
  std::vector<ConstraintPattern> rules;
  HandCounts hand_counts;
  std::map<std::string, std::string> manifest;
};

inline constexpr const char *kManifestFile = "manifest.txt";
inline constexpr const char *kTagSetFile = "tagset.tags";
inline constexpr const char *kRulesFile = "constraints.rules";
inline constexpr const char *kHandCountsFile = "hand_counts.tsv";

struct TrainInputs {
  std::string corpus_name, tagset_name, rules_name;
  std::string corpus_text;
  std::string tagset_text;
  std::optional<std::string> rules_text;
  double tiny = kDefaultTiny;
  std::string annotate_with = "SsApViFsB";
  std::optional<double> beta;
};

// Trains on the inputs and writes the directory. Output is a function of
// the inputs only.
void WriteModelDir(const TrainInputs &inputs, const std::filesystem::path &dir);

// Loads and cross-checks every file against the manifest. Throws DataError
// for stale or inconsistent directories.
ModelDir LoadModelDir(const std::filesystem::path &dir);

// Fills in the compatibility of every rule whose counts are in `counts`
// under the algorithm's measure and confiner. Rules with neither counts nor a
// value raise DataError.
void AssignCompatibilities(std::vector<ConstraintPattern> &rules, const HandCounts &counts,
                           const TagSet &tagset, const AlgorithmSpec &spec,
                           std::optional<double> beta, double tiny);

}  // namespace relaxtag::cli

#endif  // RELAXTAG_TOOLS_MODEL_DIR_H_
