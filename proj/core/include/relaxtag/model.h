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

#ifndef RELAXTAG_MODEL_H_
#define RELAXTAG_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relaxtag/corpus.h"
#include "relaxtag/tagset.h"

namespace relaxtag {

inline constexpr double kDefaultTiny = 1e-6;

// Event counts for a joint event A∩B and its marginals.
struct PairCounts {
  std::uint64_t n_ab = 0;
  std::uint64_t n_a = 0;
  std::uint64_t n_b = 0;
  std::uint64_t n_total = 0;

  bool operator==(const PairCounts &) const = default;
};

// How corpus statistics become compatibility values.
enum class Measure {
  kProbability,        // P(A∩B)
  kMutualInformation,  // log P(A∩B) / (P(A) P(B))
  kAssociationRatio,   // P(A∩B) log P(A∩B) / (P(A) P(B))
  kRelativeEntropy,    // sum over the four cells of A/¬A × B/¬B
};

// Logarithms are base 2. For the probability, mutual-information and
// association-ratio measures a zero count is replaced by the floor `tiny`
// before dividing. The relative entropy uses the raw four-cell table with
// 0·log 0 = 0, so it is a proper (non-negative) divergence.
// Throws DataError when n_total is 0.
double CompatibilityValue(const PairCounts &counts, Measure measure,
                          double tiny = kDefaultTiny);

enum class Confiner { kLinear01, kLinear11, kLogistic, kArctan, kTanh, kNone };

struct ConfiningSpec {
  Confiner kind = Confiner::kNone;
  double beta = 1.0;  // range for linear kinds, steepness for sigmoids
};

// Squeezes a free-ranging compatibility into [0,1] (linear01, logistic) or
// [-1,1] (linear11, arctan, tanh). Linear kinds clamp outside [-beta, beta].
double Confine(double x, const ConfiningSpec &spec);

// Maximum-likelihood lexical, transition, trigram and start probabilities
// plus the raw counts behind them. Immutable after estimation.
//
// Lexical(w, t) is P(t | w) over the lexicon tags of w. Transition(a, b) is
// P(b | a) over the bigrams observed inside sequences, Trigram(a, b, c) is
// P(c | a b) and Start(t) the share of sequences starting with t. Any
// combination never observed returns tiny().
class StatModel {
 public:
  StatModel() = default;

  double tiny() const { return tiny_; }
  std::size_t num_tags() const { return num_tags_; }
  const Lexicon &lexicon() const { return lexicon_; }
  std::uint64_t num_tokens() const { return lexicon_.total(); }
  std::uint64_t num_sequences() const { return num_sequences_; }

  double Lexical(std::string_view surface, TagId tag) const;
  double Transition(TagId a, TagId b) const;
  double Trigram(TagId a, TagId b, TagId c) const;
  double Start(TagId tag) const;

  std::uint64_t TagFrequency(TagId tag) const { return tag_counts_[Index(tag)]; }
  std::uint64_t StartCount(TagId tag) const { return start_counts_[Index(tag)]; }
  std::uint64_t BigramCount(TagId a, TagId b) const {
    return bigram_counts_[Index(a) * num_tags_ + Index(b)];
  }
  std::uint64_t TrigramCount(TagId a, TagId b, TagId c) const;
  std::uint64_t num_bigrams() const { return num_bigrams_; }
  std::uint64_t num_trigrams() const { return num_trigrams_; }

  // A = tag `a` on the left of a bigram, B = tag `b` on the right.
  PairCounts BigramPair(TagId a, TagId b) const;
  // A = the (a, b) prefix of a trigram window, B = tag `c` in third place.
  PairCounts TrigramPair(TagId a, TagId b, TagId c) const;

  // Observed trigrams, keyed by TrigramKey.
  const std::unordered_map<std::uint64_t, std::uint64_t> &trigram_counts() const {
    return trigram_counts_;
  }
  std::uint64_t TrigramKey(TagId a, TagId b, TagId c) const {
    return (static_cast<std::uint64_t>(Index(a)) * num_tags_ + Index(b)) *
               num_tags_ +
           Index(c);
  }

  bool operator==(const StatModel &) const = default;

 private:
  friend class StatModelBuilder;

  double tiny_ = kDefaultTiny;
  std::size_t num_tags_ = 0;
  Lexicon lexicon_;
  std::uint64_t num_sequences_ = 0;
  std::uint64_t num_bigrams_ = 0;
  std::uint64_t num_trigrams_ = 0;
  std::vector<std::uint64_t> tag_counts_;
  std::vector<std::uint64_t> start_counts_;
  std::vector<std::uint64_t> bigram_counts_;     // num_tags × num_tags
  std::vector<std::uint64_t> bigram_left_;       // Σ_b c(a, b)
  std::vector<std::uint64_t> bigram_right_;      // Σ_a c(a, b)
  std::unordered_map<std::uint64_t, std::uint64_t> trigram_counts_;
  std::vector<std::uint64_t> trigram_prefix_;    // Σ_c c(a, b, c)
  std::vector<std::uint64_t> trigram_last_;      // Σ_ab c(a, b, c)
};

// Assembles a StatModel from raw counts. Used by estimation and by the
// model reader.
class StatModelBuilder {
 public:
  StatModelBuilder(std::size_t num_tags, double tiny);

  void AddLexical(std::string_view surface, TagId tag, std::uint64_t count);
  void AddStart(TagId tag, std::uint64_t count);
  void AddBigram(TagId a, TagId b, std::uint64_t count);
  void AddTrigram(TagId a, TagId b, TagId c, std::uint64_t count);

  StatModel Build() &&;

 private:
  StatModel model_;
};

// Counts every lexical, start, bigram and trigram event of a gold corpus.
// Throws DataError on an empty corpus or a tiny outside (0, 1e-3].
StatModel EstimateModel(const Corpus &corpus, const Lexicon &lexicon,
                        const TagSet &tagset, double tiny = kDefaultTiny);

// Confined compatibility values of tag bigrams and trigrams under one
// measure. When `beta` is unset, linear confiners use the largest |value|
// among the observed n-grams of the table being confined and sigmoid
// confiners use 1.
class NgramCompatibility {
 public:
  NgramCompatibility(const StatModel &model, Measure measure, Confiner confiner,
                     std::optional<double> beta = std::nullopt);

  double Bigram(TagId a, TagId b) const {
    return bigram_[Index(a) * model_->num_tags() + Index(b)];
  }
  double Trigram(TagId a, TagId b, TagId c) const;

  const StatModel &model() const { return *model_; }
  Measure measure() const { return measure_; }
  const ConfiningSpec &bigram_confiner() const { return bigram_confiner_; }
  const ConfiningSpec &trigram_confiner() const { return trigram_confiner_; }

 private:
  const StatModel *model_;
  Measure measure_;
  ConfiningSpec bigram_confiner_;
  ConfiningSpec trigram_confiner_;
  std::vector<double> bigram_;
  std::unordered_map<std::uint64_t, double> trigram_observed_;
};

// Largest |x| over `values`, or 1 when that would be 0 or `values` is empty.
double LinearRange(const std::vector<double> &values);

// A confiner of `kind` with the given beta, or with the default beta for
// `observed` raw values when unset. Throws ConfigError for beta <= 0.
ConfiningSpec FitConfiner(Confiner kind, std::optional<double> beta,
                          const std::vector<double> &observed);

// Model directory tables: lexical.tsv, bigram.tsv, trigram.tsv and
// start.tsv. Each starts with a "# tiny=<v> tokens=<n> sequences=<n>"
// header followed by "key-parts<TAB>...<TAB>count<TAB>probability" lines
// in sorted key order.
void WriteModelTables(const StatModel &model, const TagSet &tagset,
                      const std::filesystem::path &dir);
StatModel ReadModelTables(const TagSet &tagset,
                          const std::filesystem::path &dir);

inline constexpr const char *kModelTableNames[] = {"lexical.tsv", "bigram.tsv",
                                                   "trigram.tsv", "start.tsv"};

}  // namespace relaxtag

#endif  // RELAXTAG_MODEL_H_
