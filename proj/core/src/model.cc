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

#include "relaxtag/model.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relaxtag/error.h"

namespace relaxtag {
namespace {

double Floored(std::uint64_t count, std::uint64_t total, double tiny) {
  return count == 0 ? tiny : static_cast<double>(count) / total;
}

// p log2(p / q) with 0 log 0 = 0.
double EntropyTerm(double p, double q) {
  if (p <= 0.0) return 0.0;
  return p * std::log2(p / q);
}

}  // namespace

double CompatibilityValue(const PairCounts &counts, Measure measure,
                          double tiny) {
  if (counts.n_total == 0) {
    throw DataError("compatibility value needs a non-empty event space");
  }
  const std::uint64_t n = counts.n_total;
  const double p_ab = Floored(counts.n_ab, n, tiny);
  const double p_a = Floored(counts.n_a, n, tiny);
  const double p_b = Floored(counts.n_b, n, tiny);
  switch (measure) {
    case Measure::kProbability:
      return p_ab;
    case Measure::kMutualInformation:
      return std::log2(p_ab / (p_a * p_b));
    case Measure::kAssociationRatio:
      return p_ab * std::log2(p_ab / (p_a * p_b));
    case Measure::kRelativeEntropy: {
      const double total = static_cast<double>(n);
      const double a = counts.n_a / total;
      const double b = counts.n_b / total;
      const double ab = counts.n_ab / total;
      const double a_nb = (static_cast<double>(counts.n_a) - counts.n_ab) / total;
      const double na_b = (static_cast<double>(counts.n_b) - counts.n_ab) / total;
      const double na_nb =
          static_cast<double>(static_cast<std::int64_t>(n) -
                              static_cast<std::int64_t>(counts.n_a) -
                              static_cast<std::int64_t>(counts.n_b) +
                              static_cast<std::int64_t>(counts.n_ab)) /
          total;
      return EntropyTerm(ab, a * b) + EntropyTerm(a_nb, a * (1.0 - b)) +
             EntropyTerm(na_b, (1.0 - a) * b) +
             EntropyTerm(na_nb, (1.0 - a) * (1.0 - b));
    }
  }
  return 0.0;
}

double Confine(double x, const ConfiningSpec &spec) {
  const double beta = spec.beta;
  switch (spec.kind) {
    case Confiner::kLinear01:
      return 0.5 * (1.0 + std::clamp(x, -beta, beta) / beta);
    case Confiner::kLinear11:
      return std::clamp(x, -beta, beta) / beta;
    case Confiner::kLogistic:
      return 1.0 / (1.0 + std::exp(-2.0 * beta * x));
    case Confiner::kArctan:
      return 2.0 / std::numbers::pi * std::atan(beta * x);
    case Confiner::kTanh:
      return std::tanh(beta * x);
    case Confiner::kNone:
      return x;
  }
  return x;
}

double StatModel::Lexical(std::string_view surface, TagId tag) const {
  const std::vector<TagCount> *tags = lexicon_.Find(surface);
  if (tags == nullptr) return tiny_;
  std::uint64_t total = 0, hit = 0;
  for (const TagCount &tc : *tags) {
    total += tc.count;
    if (tc.tag == tag) hit = tc.count;
  }
  return Floored(hit, total, tiny_);
}

double StatModel::Transition(TagId a, TagId b) const {
  return Floored(BigramCount(a, b), bigram_left_[Index(a)], tiny_);
}

std::uint64_t StatModel::TrigramCount(TagId a, TagId b, TagId c) const {
  auto it = trigram_counts_.find(TrigramKey(a, b, c));
  return it == trigram_counts_.end() ? 0 : it->second;
}

double StatModel::Trigram(TagId a, TagId b, TagId c) const {
  return Floored(TrigramCount(a, b, c),
                 trigram_prefix_[Index(a) * num_tags_ + Index(b)], tiny_);
}

double StatModel::Start(TagId tag) const {
  return Floored(start_counts_[Index(tag)], num_sequences_, tiny_);
}

PairCounts StatModel::BigramPair(TagId a, TagId b) const {
  return PairCounts{BigramCount(a, b), bigram_left_[Index(a)],
                    bigram_right_[Index(b)], num_bigrams_};
}

PairCounts StatModel::TrigramPair(TagId a, TagId b, TagId c) const {
  return PairCounts{TrigramCount(a, b, c),
                    trigram_prefix_[Index(a) * num_tags_ + Index(b)],
                    trigram_last_[Index(c)], num_trigrams_};
}

StatModelBuilder::StatModelBuilder(std::size_t num_tags, double tiny) {
  if (!(tiny > 0.0 && tiny <= 1e-3)) {
    throw DataError("smoothing floor must lie in (0, 1e-3]");
  }
  model_.tiny_ = tiny;
  model_.num_tags_ = num_tags;
  model_.tag_counts_.assign(num_tags, 0);
  model_.start_counts_.assign(num_tags, 0);
  model_.bigram_counts_.assign(num_tags * num_tags, 0);
  model_.bigram_left_.assign(num_tags, 0);
  model_.bigram_right_.assign(num_tags, 0);
  model_.trigram_prefix_.assign(num_tags * num_tags, 0);
  model_.trigram_last_.assign(num_tags, 0);
}

void StatModelBuilder::AddLexical(std::string_view surface, TagId tag,
                                  std::uint64_t count) {
  model_.lexicon_.Add(surface, tag, count);
  model_.tag_counts_[Index(tag)] += count;
}

void StatModelBuilder::AddStart(TagId tag, std::uint64_t count) {
  model_.start_counts_[Index(tag)] += count;
  model_.num_sequences_ += count;
}

void StatModelBuilder::AddBigram(TagId a, TagId b, std::uint64_t count) {
  const std::size_t n = model_.num_tags_;
  model_.bigram_counts_[Index(a) * n + Index(b)] += count;
  model_.bigram_left_[Index(a)] += count;
  model_.bigram_right_[Index(b)] += count;
  model_.num_bigrams_ += count;
}

void StatModelBuilder::AddTrigram(TagId a, TagId b, TagId c,
                                  std::uint64_t count) {
  model_.trigram_counts_[model_.TrigramKey(a, b, c)] += count;
  model_.trigram_prefix_[Index(a) * model_.num_tags_ + Index(b)] += count;
  model_.trigram_last_[Index(c)] += count;
  model_.num_trigrams_ += count;
}

StatModel StatModelBuilder::Build() && { return std::move(model_); }

StatModel EstimateModel(const Corpus &corpus, const Lexicon &lexicon,
                        const TagSet &tagset, double tiny) {
  if (corpus.empty()) throw DataError("cannot estimate a model from no data");
  StatModelBuilder builder(tagset.size(), tiny);
  for (const auto &[surface, tags] : lexicon.entries()) {
    for (const TagCount &tc : tags) builder.AddLexical(surface, tc.tag, tc.count);
  }
  for (const WordSequence &sequence : corpus) {
    const std::vector<Token> &tokens = sequence.tokens;
    for (const Token &token : tokens) {
      if (!token.gold) {
        throw DataError("token '" + token.surface + "' has no gold tag");
      }
    }
    builder.AddStart(*tokens.front().gold, 1);
    for (std::size_t k = 0; k + 1 < tokens.size(); ++k) {
      builder.AddBigram(*tokens[k].gold, *tokens[k + 1].gold, 1);
    }
    for (std::size_t k = 0; k + 2 < tokens.size(); ++k) {
      builder.AddTrigram(*tokens[k].gold, *tokens[k + 1].gold,
                         *tokens[k + 2].gold, 1);
    }
  }
  return std::move(builder).Build();
}

double LinearRange(const std::vector<double> &values) {
  double range = 0.0;
  for (double v : values) range = std::max(range, std::abs(v));
  return range > 0.0 ? range : 1.0;
}

ConfiningSpec FitConfiner(Confiner kind, std::optional<double> beta,
                          const std::vector<double> &observed) {
  ConfiningSpec spec{kind, 1.0};
  if (beta) {
    spec.beta = *beta;
  } else if (kind == Confiner::kLinear01 || kind == Confiner::kLinear11) {
    spec.beta = LinearRange(observed);
  }
  if (!(spec.beta > 0.0)) throw ConfigError("confining beta must be positive");
  return spec;
}

NgramCompatibility::NgramCompatibility(const StatModel &model, Measure measure,
                                       Confiner confiner,
                                       std::optional<double> beta)
    : model_(&model), measure_(measure) {
  const std::size_t n = model.num_tags();
  const double tiny = model.tiny();
  std::vector<double> raw(n * n, 0.0);
  std::vector<double> observed;
  if (model.num_bigrams() > 0) {
    for (std::uint32_t a = 0; a < n; ++a) {
      for (std::uint32_t b = 0; b < n; ++b) {
        const PairCounts counts = model.BigramPair(MakeTag(a), MakeTag(b));
        raw[a * n + b] = CompatibilityValue(counts, measure, tiny);
        if (counts.n_ab > 0) observed.push_back(raw[a * n + b]);
      }
    }
  }
  bigram_confiner_ = FitConfiner(confiner, beta, observed);
  bigram_.resize(n * n);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    bigram_[k] = model.num_bigrams() > 0 ? Confine(raw[k], bigram_confiner_)
                                         : Confine(0.0, bigram_confiner_);
  }

  std::vector<std::pair<std::uint64_t, double>> trigram_raw;
  observed.clear();
  for (const auto &[key, count] : model.trigram_counts()) {
    const TagId a = MakeTag(static_cast<std::uint32_t>(key / (n * n)));
    const TagId b = MakeTag(static_cast<std::uint32_t>(key / n % n));
    const TagId c = MakeTag(static_cast<std::uint32_t>(key % n));
    const double value =
        CompatibilityValue(model.TrigramPair(a, b, c), measure, tiny);
    trigram_raw.emplace_back(key, value);
    observed.push_back(value);
  }
  trigram_confiner_ = FitConfiner(confiner, beta, observed);
  for (const auto &[key, value] : trigram_raw) {
    trigram_observed_.emplace(key, Confine(value, trigram_confiner_));
  }
}

double NgramCompatibility::Trigram(TagId a, TagId b, TagId c) const {
  auto it = trigram_observed_.find(model_->TrigramKey(a, b, c));
  if (it != trigram_observed_.end()) return it->second;
  if (model_->num_trigrams() == 0) return Confine(0.0, trigram_confiner_);
  return Confine(CompatibilityValue(model_->TrigramPair(a, b, c), measure_,
                                    model_->tiny()),
                 trigram_confiner_);
}

}  // namespace relaxtag
