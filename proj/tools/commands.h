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

#ifndef RELAXTAG_TOOLS_COMMANDS_H_
#define RELAXTAG_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relaxtag/model.h"

namespace relaxtag::cli {

struct TrainOptions {
  std::string corpus;
  std::string tagset;
  std::string model_dir;
  std::string constraints;
  double tiny = kDefaultTiny;
  std::string algorithm = "SsApViFsB";
  std::optional<double> beta;
};

// Shared by tag and sweep.
struct LabelOptions {
  std::string model_dir;
  std::string constraints;
  int max_iters = 500;
  double epsilon = 1e-3;
  std::optional<double> beta;
  std::string init = "lexical";
  bool include_target_weight = true;
  std::uint64_t seed = 1;
  double temperature = 1.0;
  double decay = 0.9;
  bool sample = false;
  unsigned threads = 0;
};

struct TagOptions {
  LabelOptions label;
  std::string algorithm = "SsApViFsB";
  std::string input = "-";
  std::string output = "-";
  std::string snapshots;
  bool tagged_input = false;
  bool most_likely = false;
  bool viterbi = false;
  bool verbose = false;
};

struct SweepOptions {
  LabelOptions label;
  std::vector<std::string> algorithms;
  std::string corpus;
  std::string tsv;
  bool all_words = false;
};

struct EvalOptions {
  std::string gold;
  std::string predicted;
  std::string model_dir;
  bool ambiguous_only = false;
};

struct CheckOptions {
  std::string constraints;
  std::string tagset;
  std::string model_dir;
  std::string corpus;
};

// Each returns the process exit code and throws relaxtag::Error subclasses
// on failure.
int RunTrain(const TrainOptions &options);
int RunTag(const TagOptions &options);
int RunSweep(const SweepOptions &options);
int RunEval(const EvalOptions &options);
int RunCheckConstraints(const CheckOptions &options);

}  // namespace relaxtag::cli

#endif  // RELAXTAG_TOOLS_COMMANDS_H_
