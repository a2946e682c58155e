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

#ifndef RELAXTAG_TESTS_SUPPORT_SYNTHETIC_H_
#define RELAXTAG_TESTS_SUPPORT_SYNTHETIC_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "relaxtag/constraints.h"
#include "relaxtag/corpus.h"
#include "relaxtag/relax.h"
#include "relaxtag/tagset.h"
#include "oracles.h"

namespace relaxtag::testing {

struct SyntheticOptions {
  std::uint64_t seed = 1;
  std::size_t num_tokens = 20000;
  std::size_t vocabulary = 200;
  double ambiguous_fraction = 0.4;
  // When set, a tag Y sampled two places after tag X is replaced by Z.
  bool quirk = false;
};

// A first-order HMM over eight tags, one of which ("." emitting ".") ends
// sequences, with sparse transitions and a partly ambiguous vocabulary.
struct SyntheticCorpus {
  TagSet tagset;
  Corpus corpus;
  std::size_t ambiguous_words = 0;
  // Quirk tags, set whatever `quirk` is.
  TagId quirk_x{}, quirk_y{}, quirk_z{};
};

SyntheticCorpus GenerateSynthetic(const SyntheticOptions &options);

// First `fraction` of the sequences and the rest.
std::pair<Corpus, Corpus> SplitCorpus(const Corpus &corpus, double fraction);

// Random tagged corpus over `tagset` for counting tests: up to
// `max_tokens` tokens drawn from a small vocabulary.
Corpus RandomCorpus(const TagSet &tagset, std::size_t max_tokens,
                    std::mt19937_64 &rng);

// A random pattern together with a sequence of at most 8 tokens, its
// candidate lists and a target. Words come from "v0".."v3" and tags from
// `tagset`; gaps span at most 3 tokens.
struct MatchCase {
  ConstraintPattern pattern;
  WordSequence sequence;
  Candidates candidates;
  std::size_t position = 0;
  TagId tag{};
};

MatchCase RandomMatchCase(const TagSet &tagset, std::mt19937_64 &rng);

// Up to `max_constraints` random constraints over random candidate rows,
// as a plain list and as a bundle, with a random normalised state.
struct BundleCase {
  Candidates candidates;
  std::vector<RawConstraint> raw;
  ConstraintBundle bundle;
  LabellingState state;
};

BundleCase RandomBundleCase(std::size_t max_constraints, std::mt19937_64 &rng);

// Tag set "T0".."T{n-1}" with every tag open and no end tag.
TagSet NumberedTagSet(std::size_t n);

}  // namespace relaxtag::testing

#endif  // RELAXTAG_TESTS_SUPPORT_SYNTHETIC_H_
