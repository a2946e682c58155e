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

#include "relaxtag/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relaxtag/error.h"

namespace relaxtag {

MostLikelyTagger::MostLikelyTagger(const Lexicon &lexicon, const TagSet &tagset)
    : lexicon_(lexicon) {
  if (tagset.open_tags().empty()) {
    throw DataError("the tag set has no open-class tags for unknown words");
  }
  std::vector<std::uint64_t> freq(tagset.size(), 0);
  for (const auto &[surface, tags] : lexicon.entries()) {
    for (const TagCount &tc : tags) freq[Index(tc.tag)] += tc.count;
  }
  unknown_tag_ = tagset.open_tags().front();
  for (TagId t : tagset.open_tags()) {
    if (freq[Index(t)] > freq[Index(unknown_tag_)]) unknown_tag_ = t;
  }
}

TagId MostLikelyTagger::Tag(std::string_view surface) const {
  const std::vector<TagCount> *tags = lexicon_.Find(surface);
  if (tags == nullptr) return unknown_tag_;
  const TagCount *best = &tags->front();
  for (const TagCount &tc : *tags) {
    if (tc.count > best->count) best = &tc;
  }
  return best->tag;
}

std::vector<TagId> MostLikelyTagger::Tag(const WordSequence &sequence) const {
  std::vector<TagId> out;
  out.reserve(sequence.size());
  for (const Token &token : sequence.tokens) out.push_back(Tag(token.surface));
  return out;
}

namespace {

double LogLexical(const StatModel &model, const WordSequence &sequence,
                  std::size_t k, TagId t) {
  return std::log(model.Lexical(sequence.tokens[k].surface, t));
}

}  // namespace

// Summed left to right as ((score + transition) + lexical) so that Viterbi
// prefixes carry bit-identical values.
double SequenceLogScore(const WordSequence &sequence,
                        const std::vector<TagId> &tags, const StatModel &model) {
  if (sequence.size() == 0) throw DataError("cannot score an empty sequence");
  double score = std::log(model.Start(tags[0])) + LogLexical(model, sequence, 0, tags[0]);
  for (std::size_t k = 1; k < tags.size(); ++k) {
    score = score + std::log(model.Transition(tags[k - 1], tags[k]));
    score = score + LogLexical(model, sequence, k, tags[k]);
  }
  return score;
}

std::vector<TagId> Viterbi(const WordSequence &sequence,
                           const Candidates &candidates, const StatModel &model) {
  const std::size_t n = sequence.size();
  if (n == 0) throw DataError("cannot decode an empty sequence");

  // delta[k][s]: best prefix score ending in slot s; rank[k][s]: the
  // lexicographic rank of that prefix among the column's prefixes.
  std::vector<std::vector<double>> delta(n);
  std::vector<std::vector<std::size_t>> rank(n), back(n);
  const auto rank_column = [&](std::size_t k) {
    const std::size_t m = candidates[k].size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (k == 0) return a < b;
      return rank[k - 1][back[k][a]] < rank[k - 1][back[k][b]];
    });
    rank[k].assign(m, 0);
    for (std::size_t r = 0; r < m; ++r) rank[k][order[r]] = r;
  };

  delta[0].resize(candidates[0].size());
  for (std::size_t s = 0; s < candidates[0].size(); ++s) {
    const TagId t = candidates[0][s];
    delta[0][s] = std::log(model.Start(t)) + LogLexical(model, sequence, 0, t);
  }
  rank_column(0);

  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t m = candidates[k].size();
    delta[k].assign(m, 0.0);
    back[k].assign(m, 0);
    for (std::size_t s = 0; s < m; ++s) {
      const TagId t = candidates[k][s];
      double best = -std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      bool first = true;
      for (std::size_t p = 0; p < candidates[k - 1].size(); ++p) {
        const double v =
            delta[k - 1][p] + std::log(model.Transition(candidates[k - 1][p], t));
        if (first || v > best ||
            (v == best && rank[k - 1][p] < rank[k - 1][arg])) {
          best = v;
          arg = p;
          first = false;
        }
      }
      delta[k][s] = best + LogLexical(model, sequence, k, t);
      back[k][s] = arg;
    }
    rank_column(k);
  }

  std::size_t s = 0;
  for (std::size_t q = 1; q < candidates[n - 1].size(); ++q) {
    const double a = delta[n - 1][q], b = delta[n - 1][s];
    if (a > b || (a == b && rank[n - 1][q] < rank[n - 1][s])) s = q;
  }
  std::vector<TagId> out(n);
  for (std::size_t k = n; k-- > 0;) {
    out[k] = candidates[k][s];
    if (k > 0) s = back[k][s];
  }
  return out;
}

std::vector<TagId> ExhaustiveDecode(const WordSequence &sequence,
                                    const Candidates &candidates,
                                    const StatModel &model) {
  const std::size_t n = sequence.size();
  if (n == 0) throw DataError("cannot decode an empty sequence");
  std::uint64_t combinations = 1;
  for (const auto &row : candidates) {
    combinations *= row.size();
    if (combinations > kMaxExhaustiveCombinations) {
      throw DataError("too many tag combinations for exhaustive decoding");
    }
  }
  std::vector<std::size_t> pick(n, 0);
  std::vector<TagId> tags(n), best;
  double best_score = -std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t k = 0; k < n; ++k) tags[k] = candidates[k][pick[k]];
    const double score = SequenceLogScore(sequence, tags, model);
    // Enumeration runs in lexicographic order, so only a strictly better
    // score replaces the incumbent.
    if (best.empty() || score > best_score) {
      best_score = score;
      best = tags;
    }
    std::size_t k = n;
    while (k > 0 && ++pick[k - 1] == candidates[k - 1].size()) {
      pick[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
  return best;
}

}  // namespace relaxtag
