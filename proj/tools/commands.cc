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

#include "commands.h"

#include <cstdio>
#include <iostream>
#include <iterator>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "model_dir.h"
#include "relaxtag/baselines.h"
#include "relaxtag/constraints.h"
#include "relaxtag/corpus.h"
#include "relaxtag/error.h"
#include "relaxtag/eval.h"
#include "relaxtag/relax.h"
#include "worker_pool.h"

namespace relaxtag::cli {

namespace {

constexpr int kReportIterations = 20;

std::string ReadInput(const std::string &path) {
  if (path != "-") return ReadFile(path);
  std::ostringstream out;
  out << std::cin.rdbuf();
  return out.str();
}

void WriteOutput(const std::string &path, const std::string &text) {
  if (path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
  } else {
    WriteFile(path, text);
  }
}

InitMode ParseInit(const std::string &name) {
  if (name == "lexical") return InitMode::kLexical;
  if (name == "winner") return InitMode::kWinner;
  if (name == "uniform") return InitMode::kUniform;
  throw ConfigError(fmt::format("unknown init mode '{}'", name));
}

std::size_t Threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Candidates> CandidatesOf(const Corpus &corpus, const ModelDir &dir) {
  std::vector<Candidates> out;
  out.reserve(corpus.size());
  for (const WordSequence &s : corpus) {
    out.push_back(CandidatesFor(s, dir.model.lexicon(), dir.tagset));
  }
  return out;
}

Corpus WithTags(Corpus corpus, const Tagging &tags) {
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    for (std::size_t i = 0; i < corpus[s].size(); ++i) {
      corpus[s].tokens[i].gold = tags[s][i];
    }
  }
  return corpus;
}

// One configured relaxation labeller with everything it points into.
class Labelling {
 public:
  Labelling(const std::string &algorithm, const LabelOptions &options, const ModelDir &dir)
      : spec_(ParseAlgorithmName(algorithm)) {
    spec_.stop = {options.max_iters, options.epsilon};
    spec_.include_target_weight = options.include_target_weight;
    spec_.temperature = options.temperature;
    spec_.decay = options.decay;
    spec_.sample = options.sample;
    if (options.sample && spec_.update != UpdateKind::kSoftmax) {
      throw ConfigError("--sample needs the softmax update (Ae)");
    }
    ngrams_ = std::make_unique<NgramCompatibility>(dir.model, spec_.measure, spec_.confiner,
                                                   options.beta);
    if (spec_.selection.hand) {
      rules_ = options.constraints.empty()
                   ? dir.rules
                   : InFile(options.constraints,
                            [&] { return LoadConstraints(options.constraints, dir.tagset); });
      if (rules_.empty()) {
        throw ConfigError(fmt::format("{} selects C but no hand-written constraints are "
                                      "available; train with --constraints or pass them",
                                      algorithm));
      }
      InFile(options.constraints.empty() ? "constraints" : options.constraints, [&] {
        AssignCompatibilities(rules_, dir.hand_counts, dir.tagset, spec_, options.beta,
                              dir.model.tiny());
      });
    }
    labeller_ = std::make_unique<RelaxationLabeller>(
        spec_, dir.model, ngrams_.get(), spec_.selection.hand ? &rules_ : nullptr);
  }

  std::vector<RunResult> RunAll(const Corpus &corpus, const std::vector<Candidates> &cands,
                                InitMode init, bool keep_snapshots, std::uint64_t seed,
                                std::size_t threads) const {
    std::vector<RunResult> results(corpus.size());
    ParallelFor(corpus.size(), threads, [&](std::size_t s) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
      std::mt19937_64 sampler(seq);
      results[s] = labeller_->Run(corpus[s], cands[s], init, keep_snapshots,
                                  spec_.sample ? &sampler : nullptr);
    });
    return results;
  }

 private:
  AlgorithmSpec spec_;
  std::unique_ptr<NgramCompatibility> ngrams_;
  std::vector<ConstraintPattern> rules_;
  std::unique_ptr<RelaxationLabeller> labeller_;
};

std::string SnapshotDump(const Corpus &corpus, const std::vector<Candidates> &cands,
                         const std::vector<RunResult> &results, const TagSet &tagset) {
  std::string out = "sequence\titeration\tposition\tsurface\tweights\n";
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto &snaps = results[s].snapshots;
    for (std::size_t m = 0; m < snaps.size(); ++m) {
      for (std::size_t i = 0; i < cands[s].size(); ++i) {
        out += fmt::format("{}\t{}\t{}\t{}\t", s, m, i, corpus[s].tokens[i].surface);
        const auto row = snaps[m].row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
          out += fmt::format("{}{}={:.6g}", j ? " " : "", tagset.name(cands[s][i][j]), row[j]);
        }
        out += '\n';
      }
    }
  }
  return out;
}

Tagging BaselineTagging(const Corpus &corpus, const std::vector<Candidates> &cands,
                        const ModelDir &dir, bool viterbi, std::size_t threads) {
  Tagging out(corpus.size());
  const MostLikelyTagger most_likely(dir.model.lexicon(), dir.tagset);
  ParallelFor(corpus.size(), threads, [&](std::size_t s) {
    out[s] = viterbi ? Viterbi(corpus[s], cands[s], dir.model) : most_likely.Tag(corpus[s]);
  });
  return out;
}

struct LineToken {
  std::string surface;
  std::string tag;
  std::size_t line;
};

std::vector<LineToken> TokenLines(const std::string &text) {
  std::vector<LineToken> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("expected surface<TAB>tag", number);
    out.push_back({line.substr(0, tab), line.substr(tab + 1), number});
  }
  return out;
}

std::string Percent(const AccuracyCounts &counts) {
  const auto p = counts.percent();
  return p ? fmt::format("{:.2f}\t{}/{}", *p, counts.correct, counts.total) : "—\t0/0";
}

}  // namespace

int RunTrain(const TrainOptions &options) {
  TrainInputs inputs;
  inputs.corpus_name = options.corpus;
  inputs.tagset_name = options.tagset;
  inputs.rules_name = options.constraints;
  inputs.corpus_text = ReadFile(options.corpus);
  inputs.tagset_text = ReadFile(options.tagset);
  if (!options.constraints.empty()) inputs.rules_text = ReadFile(options.constraints);
  inputs.tiny = options.tiny;
  inputs.annotate_with = options.algorithm;
  inputs.beta = options.beta;
  ParseAlgorithmName(options.algorithm);
  WriteModelDir(inputs, options.model_dir);
  const ModelDir dir = LoadModelDir(options.model_dir);
  fmt::print(stderr, "trained {}: {} tokens, {} sequences, {} words, {} bigrams, {} trigrams\n",
             options.model_dir, dir.model.num_tokens(), dir.model.num_sequences(),
             dir.model.lexicon().entries().size(), dir.model.num_bigrams(),
             dir.model.num_trigrams());
  return 0;
}

int RunTag(const TagOptions &options) {
  if (options.most_likely && options.viterbi) {
    throw ConfigError("--most-likely and --viterbi are exclusive");
  }
  const InitMode init = ParseInit(options.label.init);
  const ModelDir dir = LoadModelDir(options.label.model_dir);
  const std::string text = ReadInput(options.input);
  const Corpus corpus = InFile(options.input, [&] {
    return options.tagged_input ? ParseTaggedCorpus(text, dir.tagset)
                                : ParseRawCorpus(text, dir.model.lexicon(), dir.tagset);
  });
  const auto cands = CandidatesOf(corpus, dir);
  const std::size_t threads = Threads(options.label.threads);

  Tagging tags;
  if (options.most_likely || options.viterbi) {
    tags = BaselineTagging(corpus, cands, dir, options.viterbi, threads);
  } else {
    const Labelling labelling(options.algorithm, options.label, dir);
    const auto results = labelling.RunAll(corpus, cands, init, !options.snapshots.empty(),
                                          options.label.seed, threads);
    std::size_t iterations = 0, converged = 0;
    for (std::size_t s = 0; s < results.size(); ++s) {
      tags.push_back(Decode(results[s].state, cands[s]));
      iterations += results[s].iterations;
      converged += results[s].converged;
      if (options.verbose) {
        fmt::print(stderr, "sequence {}: {} iterations{}\n", s, results[s].iterations,
                   results[s].converged ? ", converged" : "");
      }
    }
    fmt::print(stderr, "{}: {} sequences, {:.2f} iterations on average, {} converged\n",
               options.algorithm, results.size(),
               results.empty() ? 0.0 : static_cast<double>(iterations) / results.size(),
               converged);
    if (!options.snapshots.empty()) {
      WriteFile(options.snapshots, SnapshotDump(corpus, cands, results, dir.tagset));
    }
  }
  WriteOutput(options.output, SerializeTaggedCorpus(WithTags(corpus, tags), dir.tagset));
  return 0;
}

int RunSweep(const SweepOptions &options) {
  if (options.algorithms.empty()) throw ConfigError("sweep needs at least one algorithm");
  const InitMode init = ParseInit(options.label.init);
  const ModelDir dir = LoadModelDir(options.label.model_dir);
  const Corpus gold = InFile(
      options.corpus, [&] { return ParseTaggedCorpus(ReadFile(options.corpus), dir.tagset); });
  const auto cands = CandidatesOf(gold, dir);
  const std::size_t threads = Threads(options.label.threads);
  const Lexicon &lexicon = dir.model.lexicon();
  const bool ambiguous_only = !options.all_words;

  auto accuracy = [&](const Tagging &pred) {
    const auto p = Accuracy(pred, gold, lexicon, ambiguous_only);
    if (!p) throw DataError(fmt::format("{}: no words to score", options.corpus));
    return *p;
  };

  std::vector<IterationReport> reports;
  for (const std::string &name : options.algorithms) {
    const Labelling labelling(name, options.label, dir);
    const auto results = labelling.RunAll(gold, cands, init, true, options.label.seed, threads);
    auto decode_at = [&](std::size_t m) {
      Tagging pred;
      for (std::size_t s = 0; s < gold.size(); ++s) {
        const auto &snaps = results[s].snapshots;
        pred.push_back(Decode(snaps[std::min(m, snaps.size() - 1)], cands[s]));
      }
      return pred;
    };
    const int last = std::min(kReportIterations, options.label.max_iters);
    std::vector<double> by_iteration;
    for (int m = 0; m <= last; ++m) by_iteration.push_back(accuracy(decode_at(m)));
    Tagging final_tags;
    for (std::size_t s = 0; s < gold.size(); ++s) {
      final_tags.push_back(Decode(results[s].state, cands[s]));
    }
    reports.push_back(MakeReport(name, by_iteration, accuracy(final_tags)));
  }

  std::string out = RenderTable(reports);
  out += fmt::format("\nbaselines: most-likely {:.2f}, viterbi {:.2f}\n",
                     accuracy(BaselineTagging(gold, cands, dir, false, threads)),
                     accuracy(BaselineTagging(gold, cands, dir, true, threads)));
  WriteOutput("-", out);
  if (!options.tsv.empty()) WriteFile(options.tsv, RenderTsv(reports));
  return 0;
}

int RunEval(const EvalOptions &options) {
  const ModelDir dir = LoadModelDir(options.model_dir);
  const std::string gold_text = ReadFile(options.gold);
  const std::string pred_text = ReadFile(options.predicted);
  const Corpus gold =
      InFile(options.gold, [&] { return ParseTaggedCorpus(gold_text, dir.tagset); });
  const auto gold_lines = InFile(options.gold, [&] { return TokenLines(gold_text); });
  const auto pred_lines = InFile(options.predicted, [&] { return TokenLines(pred_text); });

  const std::size_t common = std::min(gold_lines.size(), pred_lines.size());
  for (std::size_t k = 0; k < common; ++k) {
    if (gold_lines[k].surface != pred_lines[k].surface) {
      throw DataError(fmt::format("files diverge at gold line {} ('{}') and predicted line "
                                  "{} ('{}')",
                                  gold_lines[k].line, gold_lines[k].surface,
                                  pred_lines[k].line, pred_lines[k].surface));
    }
  }
  if (gold_lines.size() != pred_lines.size()) {
    const bool gold_longer = gold_lines.size() > pred_lines.size();
    const auto &extra = gold_longer ? gold_lines[common] : pred_lines[common];
    throw DataError(fmt::format("files diverge at {} line {}: the other file has ended",
                                gold_longer ? "gold" : "predicted", extra.line));
  }

  Tagging pred;
  std::size_t k = 0;
  for (const WordSequence &s : gold) {
    std::vector<TagId> row;
    for (std::size_t i = 0; i < s.size(); ++i, ++k) {
      const auto tag = dir.tagset.Find(pred_lines[k].tag);
      if (!tag) {
        throw DataError(fmt::format("{}: unknown tag '{}'", options.predicted,
                                    pred_lines[k].tag),
                        pred_lines[k].line);
      }
      row.push_back(*tag);
    }
    pred.push_back(std::move(row));
  }

  std::string out;
  if (!options.ambiguous_only) {
    out += fmt::format("overall\t{}\n",
                       Percent(CountAccuracy(pred, gold, dir.model.lexicon(), false)));
  }
  out += fmt::format("ambiguous\t{}\n",
                     Percent(CountAccuracy(pred, gold, dir.model.lexicon(), true)));
  WriteOutput("-", out);
  return 0;
}

int RunCheckConstraints(const CheckOptions &options) {
  const TagSet tagset = [&] {
    if (!options.tagset.empty()) {
      return InFile(options.tagset, [&] { return TagSet::Load(options.tagset); });
    }
    if (!options.model_dir.empty()) return LoadModelDir(options.model_dir).tagset;
    throw ConfigError("check-constraints needs --tagset or --model-dir");
  }();
  const auto rules = InFile(options.constraints,
                            [&] { return LoadConstraints(options.constraints, tagset); });
  std::string out = fmt::format("{}: {} rules parsed\n", options.constraints, rules.size());
  if (!options.corpus.empty()) {
    const Corpus corpus = InFile(
        options.corpus, [&] { return ParseTaggedCorpus(ReadFile(options.corpus), tagset); });
    out += "line\tmatches\tbody\theart\trule\n";
    for (const ConstraintPattern &p : rules) {
      const PairCounts c = CountPattern(p, corpus);
      out += fmt::format("{}\t{}\t{}\t{}\t{}\n", p.line, c.n_ab, c.n_a, c.n_b,
                         FormatConstraint(p, tagset));
    }
    out += fmt::format("{} tokens in {} sequences\n", TokenCount(corpus), corpus.size());
  }
  WriteOutput("-", out);
  return 0;
}

}  // namespace relaxtag::cli
