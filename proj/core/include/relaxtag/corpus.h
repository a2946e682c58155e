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

#ifndef RELAXTAG_CORPUS_H_
#define RELAXTAG_CORPUS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relaxtag/tagset.h"

namespace relaxtag {

struct Token {
  std::string surface;
  std::optional<TagId> gold;

  bool operator==(const Token &) const = default;
};

// A taggable unit: the tokens up to and including a sentence-end token.
struct WordSequence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const WordSequence &) const = default;
};

using Corpus = std::vector<WordSequence>;

// Candidate tags per position of one sequence, each list in TagSet order.
using Candidates = std::vector<std::vector<TagId>>;

struct TagCount {
  TagId tag;
  std::uint64_t count;

  bool operator==(const TagCount &) const = default;
};

// Per-surface tag counts gathered from a gold corpus. Tag lists are kept in
// TagSet order.
class Lexicon {
 public:
  using Entries = std::map<std::string, std::vector<TagCount>, std::less<>>;

  // Adds `count` occurrences of (surface, tag).
  void Add(std::string_view surface, TagId tag, std::uint64_t count = 1);

  // nullptr for unknown surfaces.
  const std::vector<TagCount> *Find(std::string_view surface) const;

  // Occurrences of `surface` over all its tags (0 if unknown).
  std::uint64_t SurfaceCount(std::string_view surface) const;

  const Entries &entries() const { return entries_; }
  std::uint64_t total() const { return total_; }
  bool empty() const { return entries_.empty(); }

  bool operator==(const Lexicon &) const = default;

 private:
  Entries entries_;
  std::uint64_t total_ = 0;
};

// Parses "surface<TAB>tag" lines. A sequence closes after a token whose tag
// is a sentence-end tag, at a blank line, or at end of input.
Corpus ParseTaggedCorpus(std::string_view text, const TagSet &tagset);

// Writes one "surface<TAB>tag" line per token with a blank line between
// sequences, so that ParseTaggedCorpus restores the same segmentation.
std::string SerializeTaggedCorpus(const Corpus &corpus, const TagSet &tagset);

// Parses one surface per line. Blank lines force a break, and so does a
// token whose lexicon tags are all sentence-end tags. Lines containing a
// TAB are accepted and the text after the first TAB is ignored, so a
// tagged corpus can be re-tagged directly.
Corpus ParseRawCorpus(std::string_view text, const Lexicon &lexicon,
                      const TagSet &tagset);

// Throws DataError if some token has no gold tag.
Lexicon BuildLexicon(const Corpus &corpus);

// Lexicon tags of a known word, otherwise the open-class tags. Both in
// TagSet order. Throws DataError for an unknown word when the tag set has
// no open-class tags.
std::vector<TagId> CandidateTags(std::string_view surface,
                                 const Lexicon &lexicon, const TagSet &tagset);

Candidates CandidatesFor(const WordSequence &sequence, const Lexicon &lexicon,
                         const TagSet &tagset);

std::size_t TokenCount(const Corpus &corpus);

}  // namespace relaxtag

#endif  // RELAXTAG_CORPUS_H_
