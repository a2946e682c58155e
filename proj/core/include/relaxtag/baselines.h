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

#ifndef RELAXTAG_BASELINES_H_
#define RELAXTAG_BASELINES_H_

#include <string_view>
#include <vector>

#include "relaxtag/corpus.h"
#include "relaxtag/model.h"
#include "relaxtag/tagset.h"

namespace relaxtag {

// Tags every word with its most frequent lexicon tag, and unknown words
// with the most frequent open-class tag of the training corpus. Ties go to
// the earlier tag.
class MostLikelyTagger {
 public:
  MostLikelyTagger(const Lexicon &lexicon, const TagSet &tagset);

  TagId Tag(std::string_view surface) const;
  std::vector<TagId> Tag(const WordSequence &sequence) const;

 private:
  const Lexicon &lexicon_;
  TagId unknown_tag_;
};

// log π(t_1) + Σ_k log P(t_k | w_k) + Σ_k log T(t_k, t_k+1).
double SequenceLogScore(const WordSequence &sequence,
                        const std::vector<TagId> &tags, const StatModel &model);

// The tagging maximising SequenceLogScore over the candidates. Among equal
// scores the lexicographically smallest tag sequence wins, so the result
// always equals ExhaustiveDecode. Throws DataError on an empty sequence.
std::vector<TagId> Viterbi(const WordSequence &sequence,
                           const Candidates &candidates, const StatModel &model);

inline constexpr std::uint64_t kMaxExhaustiveCombinations = 1000000;

// Scores every candidate combination. Throws DataError on an empty
// sequence or above kMaxExhaustiveCombinations combinations.
std::vector<TagId> ExhaustiveDecode(const WordSequence &sequence,
                                    const Candidates &candidates,
                                    const StatModel &model);

}  // namespace relaxtag

#endif  // RELAXTAG_BASELINES_H_
