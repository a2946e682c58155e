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

#include "relaxtag/corpus.h"

#include <algorithm>

#include "relaxtag/error.h"
#include "text_util.h"

namespace relaxtag {

void Lexicon::Add(std::string_view surface, TagId tag, std::uint64_t count) {
  if (count == 0) return;
  auto it = entries_.find(surface);
  if (it == entries_.end()) {
    it = entries_.emplace(std::string(surface), std::vector<TagCount>{}).first;
  }
  std::vector<TagCount> &tags = it->second;
  auto pos = std::lower_bound(
      tags.begin(), tags.end(), tag,
      [](const TagCount &tc, TagId t) { return Index(tc.tag) < Index(t); });
  if (pos != tags.end() && pos->tag == tag) {
    pos->count += count;
  } else {
    tags.insert(pos, TagCount{tag, count});
  }
  total_ += count;
}

const std::vector<TagCount> *Lexicon::Find(std::string_view surface) const {
  auto it = entries_.find(surface);
  return it == entries_.end() ? nullptr : &it->second;
}

std::uint64_t Lexicon::SurfaceCount(std::string_view surface) const {
  const std::vector<TagCount> *tags = Find(surface);
  if (tags == nullptr) return 0;
  std::uint64_t sum = 0;
  for (const TagCount &tc : *tags) sum += tc.count;
  return sum;
}

Corpus ParseTaggedCorpus(std::string_view text, const TagSet &tagset) {
  Corpus corpus;
  WordSequence current;
  auto flush = [&] {
    if (!current.tokens.empty()) corpus.push_back(std::move(current));
    current = WordSequence{};
  };
  std::size_t line_no = 0;
  for (std::string_view line : internal::SplitLines(text)) {
    ++line_no;
    if (internal::Trim(line).empty()) {
      flush();
      continue;
    }
    const auto fields = internal::SplitTabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw DataError("expected \"surface<TAB>tag\"", line_no);
    }
    std::optional<TagId> tag = tagset.Find(fields[1]);
    if (!tag) {
      throw DataError("unknown tag '" + std::string(fields[1]) + "'", line_no);
    }
    current.tokens.push_back(Token{std::string(fields[0]), *tag});
    if (tagset.IsSentenceEnd(*tag)) flush();
  }
  flush();
  return corpus;
}

std::string SerializeTaggedCorpus(const Corpus &corpus, const TagSet &tagset) {
  std::string out;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    if (s > 0) out += '\n';
    for (const Token &token : corpus[s].tokens) {
      if (!token.gold) throw DataError("cannot serialize an untagged token");
      out += token.surface;
      out += '\t';
      out += tagset.name(*token.gold);
      out += '\n';
    }
  }
  return out;
}

Corpus ParseRawCorpus(std::string_view text, const Lexicon &lexicon,
                      const TagSet &tagset) {
  Corpus corpus;
  WordSequence current;
  auto flush = [&] {
    if (!current.tokens.empty()) corpus.push_back(std::move(current));
    current = WordSequence{};
  };
  for (std::string_view line : internal::SplitLines(text)) {
    std::string_view surface = line.substr(0, line.find('\t'));
    if (internal::Trim(surface).empty()) {
      flush();
      continue;
    }
    current.tokens.push_back(Token{std::string(surface), std::nullopt});
    const std::vector<TagCount> *tags = lexicon.Find(surface);
    if (tags != nullptr &&
        std::all_of(tags->begin(), tags->end(), [&](const TagCount &tc) {
          return tagset.IsSentenceEnd(tc.tag);
        })) {
      flush();
    }
  }
  flush();
  return corpus;
}

Lexicon BuildLexicon(const Corpus &corpus) {
  Lexicon lexicon;
  for (const WordSequence &sequence : corpus) {
    for (const Token &token : sequence.tokens) {
      if (!token.gold) {
        throw DataError("token '" + token.surface + "' has no gold tag");
      }
      lexicon.Add(token.surface, *token.gold);
    }
  }
  return lexicon;
}

std::vector<TagId> CandidateTags(std::string_view surface,
                                 const Lexicon &lexicon,
                                 const TagSet &tagset) {
  if (const std::vector<TagCount> *tags = lexicon.Find(surface)) {
    std::vector<TagId> out;
    out.reserve(tags->size());
    for (const TagCount &tc : *tags) out.push_back(tc.tag);
    return out;
  }
  if (tagset.open_tags().empty()) {
    throw DataError("unknown word '" + std::string(surface) +
                    "' and the tag set has no open-class tags");
  }
  return tagset.open_tags();
}

Candidates CandidatesFor(const WordSequence &sequence, const Lexicon &lexicon,
                         const TagSet &tagset) {
  Candidates out;
  out.reserve(sequence.size());
  for (const Token &token : sequence.tokens) {
    out.push_back(CandidateTags(token.surface, lexicon, tagset));
  }
  return out;
}

std::size_t TokenCount(const Corpus &corpus) {
  std::size_t n = 0;
  for (const WordSequence &sequence : corpus) n += sequence.size();
  return n;
}

}  // namespace relaxtag
