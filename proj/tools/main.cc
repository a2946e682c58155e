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

// relaxtag: train, tag, evaluate and sweep relaxation-labelling taggers.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.h"
#include "model_dir.h"
#include "relaxtag/error.h"

namespace relaxtag::cli {
namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

void AddLabelOptions(CLI::App &cmd, LabelOptions &o) {
  cmd.add_option("--model-dir", o.model_dir, "Trained model directory");
  cmd.add_option("--constraints", o.constraints,
                 "Hand-written constraint file (default: the one trained into the model)");
  cmd.add_option("--max-iters", o.max_iters, "Iteration cap")->capture_default_str();
  cmd.add_option("--epsilon", o.epsilon, "Stop when no weight moves more than this")
      ->capture_default_str();
  cmd.add_option("--beta", o.beta, "Confiner beta (default: fitted)");
  cmd.add_option("--init", o.init, "Initial weights: lexical, winner or uniform")
      ->capture_default_str();
  cmd.add_option("--include-target-weight", o.include_target_weight,
                 "Include the target's own weight in constraint products")
      ->capture_default_str();
  cmd.add_option("--seed", o.seed, "Seed for softmax sampling")->capture_default_str();
  cmd.add_option("--temperature", o.temperature, "Softmax initial temperature")
      ->capture_default_str();
  cmd.add_option("--decay", o.decay, "Softmax temperature decay per iteration")
      ->capture_default_str();
  cmd.add_flag("--sample", o.sample, "Softmax update draws one tag per word");
  cmd.add_option("--threads", o.threads, "Worker threads (0: one per core)")
      ->capture_default_str();
}

// Options named in the config file that were not given on the command line
// take the file's value.
void ApplyConfig(CLI::App &app, CLI::App &cmd, const std::string &path) {
  std::map<std::string, std::string> entries;
  try {
    entries = ParseKeyValues(ReadFile(path));
  } catch (const DataError &e) {
    throw ConfigError(fmt::format("config {}: {}", path, e.what()));
  }
  for (const auto &[key, value] : entries) {
    CLI::Option *opt = cmd.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      bool known = false;
      for (const CLI::App *other : app.get_subcommands({})) {
        known |= other->get_option_no_throw("--" + key) != nullptr;
      }
      if (!known) throw ConfigError(fmt::format("{}: unknown key '{}'", path, key));
      continue;
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

void Require(const std::vector<std::pair<const char *, const std::string *>> &fields) {
  for (const auto &[flag, value] : fields) {
    if (value->empty()) throw ConfigError(fmt::format("missing required option {}", flag));
  }
}

int Main(int argc, char **argv) {
  CLI::App app{"Relaxation-labelling part-of-speech tagger"};
  app.set_version_flag("--version", "relaxtag 0.1.0");
  app.require_subcommand(1);
  app.fallthrough();
  std::string config;
  app.add_option("--config", config, "File of 'key = value' lines; flags take precedence");

  TrainOptions train;
  CLI::App *train_cmd = app.add_subcommand("train", "Estimate a model from a tagged corpus");
  train_cmd->add_option("--corpus", train.corpus, "Tagged corpus (surface<TAB>tag lines)");
  train_cmd->add_option("--tagset", train.tagset, "Tag set file");
  train_cmd->add_option("--model-dir", train.model_dir, "Output model directory");
  train_cmd->add_option("--constraints", train.constraints, "Hand-written constraint file");
  train_cmd->add_option("--tiny", train.tiny, "Probability floor for unseen events")
      ->capture_default_str();
  train_cmd->add_option("--algorithm", train.algorithm,
                        "Algorithm whose values annotate the stored constraints")
      ->capture_default_str();
  train_cmd->add_option("--beta", train.beta, "Confiner beta (default: fitted)");

  TagOptions tag;
  CLI::App *tag_cmd = app.add_subcommand("tag", "Tag a corpus");
  AddLabelOptions(*tag_cmd, tag.label);
  tag_cmd->add_option("--algorithm", tag.algorithm, "Algorithm name, e.g. SsApViFsB")
      ->capture_default_str();
  tag_cmd->add_option("--input", tag.input, "Input corpus, one token per line ('-': stdin)")
      ->capture_default_str();
  tag_cmd->add_option("--output", tag.output, "Output file ('-': stdout)")
      ->capture_default_str();
  tag_cmd->add_option("--snapshots", tag.snapshots, "Write per-iteration weights here");
  tag_cmd->add_flag("--tagged-input", tag.tagged_input,
                    "Input has surface<TAB>tag lines; the tags are ignored");
  tag_cmd->add_flag("--most-likely", tag.most_likely, "Use the most-likely-tag baseline");
  tag_cmd->add_flag("--viterbi", tag.viterbi, "Use the Viterbi baseline");
  tag_cmd->add_flag("--verbose", tag.verbose, "Log iteration counts per sequence");

  SweepOptions sweep;
  CLI::App *sweep_cmd =
      app.add_subcommand("sweep", "Report accuracy by iteration window for several algorithms");
  AddLabelOptions(*sweep_cmd, sweep.label);
  sweep_cmd->add_option("--algorithms", sweep.algorithms, "Algorithm names")->delimiter(',');
  sweep_cmd->add_option("--corpus", sweep.corpus, "Tagged test corpus");
  sweep_cmd->add_option("--tsv", sweep.tsv, "Also write the report as TSV here");
  sweep_cmd->add_flag("--all-words", sweep.all_words, "Score every word, not only ambiguous ones");

  EvalOptions eval;
  CLI::App *eval_cmd = app.add_subcommand("eval", "Compare a tagged file with the gold standard");
  eval_cmd->add_option("--gold", eval.gold, "Gold tagged corpus");
  eval_cmd->add_option("--predicted", eval.predicted, "Tagger output");
  eval_cmd->add_option("--model-dir", eval.model_dir, "Model whose lexicon defines ambiguity");
  eval_cmd->add_flag("--ambiguous-only", eval.ambiguous_only, "Print only ambiguous-word accuracy");

  CheckOptions check;
  CLI::App *check_cmd =
      app.add_subcommand("check-constraints", "Parse a constraint file and count matches");
  check_cmd->add_option("--constraints", check.constraints, "Constraint file");
  check_cmd->add_option("--tagset", check.tagset, "Tag set file");
  check_cmd->add_option("--model-dir", check.model_dir, "Take the tag set from this model");
  check_cmd->add_option("--corpus", check.corpus, "Tagged corpus to count matches on");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    CLI::App *cmd = app.get_subcommands().front();
    if (!config.empty()) ApplyConfig(app, *cmd, config);
    if (cmd == train_cmd) {
      Require({{"--corpus", &train.corpus},
               {"--tagset", &train.tagset},
               {"--model-dir", &train.model_dir}});
      return RunTrain(train);
    }
    if (cmd == tag_cmd) {
      Require({{"--model-dir", &tag.label.model_dir}});
      return RunTag(tag);
    }
    if (cmd == sweep_cmd) {
      Require({{"--model-dir", &sweep.label.model_dir}, {"--corpus", &sweep.corpus}});
      return RunSweep(sweep);
    }
    if (cmd == eval_cmd) {
      Require({{"--gold", &eval.gold},
               {"--predicted", &eval.predicted},
               {"--model-dir", &eval.model_dir}});
      return RunEval(eval);
    }
    Require({{"--constraints", &check.constraints}});
    return RunCheckConstraints(check);
  } catch (const ConfigError &e) {
    fmt::print(stderr, "relaxtag: {}\n", e.what());
    return kExitConfig;
  } catch (const CLI::Error &e) {
    fmt::print(stderr, "relaxtag: {}\n", e.what());
    return kExitConfig;
  } catch (const Error &e) {
    fmt::print(stderr, "relaxtag: {}\n", e.what());
    return kExitData;
  }
}

}  // namespace
}  // namespace relaxtag::cli

int main(int argc, char **argv) { return relaxtag::cli::Main(argc, argv); }
