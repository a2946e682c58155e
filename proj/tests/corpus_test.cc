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

#include <random>

#include <gtest/gtest.h>

#include "relaxtag/corpus.h"
#include "relaxtag/error.h"
#include "relaxtag/tagset.h"
#include "synthetic.h"

namespace relaxtag {
namespace {

TagSet SpanishToy() {
  return TagSet({"A", "Da", "N", "Nc", "R", "V0", "Z."}, {"A", "Nc", "V0", "R"},
                {"Z."});
}

TEST(TagSetTest, ParsesSections) {
  const TagSet ts = TagSet::Parse("tags:\nNc\nV0\nZ.\nopen:\nNc\nend:\nZ.\n");
  ASSERT_EQ(ts.size(), 3u);
  EXPECT_EQ(ts.name(MakeTag(1)), "V0");
  EXPECT_TRUE(ts.IsOpen(ts.At("Nc")));
  EXPECT_FALSE(ts.IsOpen(ts.At("V0")));
  EXPECT_TRUE(ts.IsSentenceEnd(ts.At("Z.")));
  EXPECT_EQ(TagSet::Parse(ts.Serialize()), ts);
}

TEST(TagSetTest, RejectsDuplicatesAndStrangers) {
  EXPECT_THROW(TagSet::Parse("tags:\nA\nA\n"), DataError);
  EXPECT_THROW(TagSet::Parse("tags:\nA\nopen:\nB\n"), DataError);
  EXPECT_THROW(TagSet::Parse("tags:\nA\nend:\nB\n"), DataError);
}

TEST(TagSetTest, HashIsAnOrdinaryTag) {
  const TagSet ts = TagSet::Parse("tags:\n#\n$\n``\n");
  EXPECT_EQ(ts.size(), 3u);
  EXPECT_TRUE(ts.Find("#").has_value());
}

TEST(TagSetTest, BundledTagSetsLoad) {
  const std::string dir = RELAXTAG_DATA_DIR "/tagsets/";
  EXPECT_EQ(TagSet::Load(dir + "wsj.tags").size(), 45u);
  EXPECT_EQ(TagSet::Load(dir + "spanish_novel.tags").size(), 69u);
  EXPECT_EQ(TagSet::Load(dir + "susanne.tags").size(), 149u);
  EXPECT_EQ(TagSet::Load(dir + "spanish_press.tags").size(), 65u);
}

TEST(ParseTaggedCorpusTest, SingleToken) {
  const Corpus c = ParseTaggedCorpus("el\tDa\n", SpanishToy());
  ASSERT_EQ(c.size(), 1u);
  ASSERT_EQ(c[0].size(), 1u);
  EXPECT_EQ(c[0].tokens[0].surface, "el");
  EXPECT_EQ(*c[0].tokens[0].gold, SpanishToy().At("Da"));
}

TEST(ParseTaggedCorpusTest, SplitsAtSentenceEndTags) {
  const Corpus c =
      ParseTaggedCorpus("casa\tN\n.\tZ.\nsol\tN\n.\tZ.\n", SpanishToy());
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].size(), 2u);
  EXPECT_EQ(c[1].size(), 2u);
  EXPECT_EQ(c[1].tokens[0].surface, "sol");
}

TEST(ParseTaggedCorpusTest, EmptyInputAndBlankLines) {
  EXPECT_TRUE(ParseTaggedCorpus("", SpanishToy()).empty());
  const Corpus c = ParseTaggedCorpus("a\tN\n\nb\tN\n", SpanishToy());
  EXPECT_EQ(c.size(), 2u);
}

TEST(ParseTaggedCorpusTest, ErrorsNameTheLine) {
  try {
    ParseTaggedCorpus("a\tN\nb\tQQ\n", SpanishToy());
    FAIL() << "unknown tag accepted";
  } catch (const DataError &e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(ParseTaggedCorpus("no-tab-here\n", SpanishToy()), DataError);
  EXPECT_THROW(ParseTaggedCorpus("a\tN\tV0\n", SpanishToy()), DataError);
}

TEST(ParseTaggedCorpusTest, RoundTripsThroughSerialize) {
  std::mt19937_64 rng(7);
  const TagSet ts = testing::NumberedTagSet(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Corpus c = testing::RandomCorpus(ts, 200, rng);
    EXPECT_EQ(ParseTaggedCorpus(SerializeTaggedCorpus(c, ts), ts), c);
  }
}

TEST(ParseRawCorpusTest, SegmentsAtBlankLinesAndEndWords) {
  const TagSet ts = SpanishToy();
  const Lexicon lex =
      BuildLexicon(ParseTaggedCorpus("casa\tN\n.\tZ.\n", ts));
  const Corpus c = ParseRawCorpus("casa\n.\nsol\n\nluna\n", lex, ts);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].size(), 2u);
  EXPECT_FALSE(c[0].tokens[0].gold.has_value());
  EXPECT_EQ(c[2].tokens[0].surface, "luna");
}

TEST(ParseRawCorpusTest, ConcatenationKeepsTheStream) {
  const TagSet ts = SpanishToy();
  const Lexicon lex = BuildLexicon(ParseTaggedCorpus("x\tN\n", ts));
  const Corpus c = ParseRawCorpus("x\ny\nz\n", lex, ts);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].size(), 3u);
}

TEST(LexiconTest, CountsOccurrences) {
  const TagSet ts = testing::NumberedTagSet(2);
  const Corpus c = ParseTaggedCorpus("a\tT0\na\tT1\na\tT0\n", ts);
  const Lexicon lex = BuildLexicon(c);
  const auto *entry = lex.Find("a");
  ASSERT_NE(entry, nullptr);
  ASSERT_EQ(entry->size(), 2u);
  EXPECT_EQ((*entry)[0], (TagCount{MakeTag(0), 2}));
  EXPECT_EQ((*entry)[1], (TagCount{MakeTag(1), 1}));
  EXPECT_EQ(lex.total(), 3u);
}

TEST(LexiconTest, SingletonAndEmpty) {
  const TagSet ts = testing::NumberedTagSet(1);
  const Lexicon one = BuildLexicon(ParseTaggedCorpus("b\tT0\n", ts));
  EXPECT_EQ(one.SurfaceCount("b"), 1u);
  const Lexicon none = BuildLexicon(Corpus{});
  EXPECT_TRUE(none.empty());
  EXPECT_EQ(none.total(), 0u);
}

TEST(LexiconTest, UntaggedTokenIsAnError) {
  Corpus c{WordSequence{{Token{"a", std::nullopt}}}};
  EXPECT_THROW(BuildLexicon(c), DataError);
}

TEST(LexiconTest, TotalEqualsTokenCount) {
  std::mt19937_64 rng(3);
  const TagSet ts = testing::NumberedTagSet(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Corpus c = testing::RandomCorpus(ts, 500, rng);
    const Lexicon lex = BuildLexicon(c);
    std::uint64_t sum = 0;
    for (const auto &[surface, tags] : lex.entries()) {
      for (const TagCount &tc : tags) sum += tc.count;
    }
    EXPECT_EQ(sum, TokenCount(c));
    EXPECT_EQ(lex.total(), TokenCount(c));
  }
}

TEST(CandidateTagsTest, KnownUnknownAndSingleton) {
  const TagSet ts = SpanishToy();
  const Lexicon lex = BuildLexicon(
      ParseTaggedCorpus("vino\tV0\nvino\tNc\n\nel\tDa\n", ts));
  EXPECT_EQ(CandidateTags("vino", lex, ts),
            (std::vector<TagId>{ts.At("Nc"), ts.At("V0")}));
  EXPECT_EQ(CandidateTags("zzz", lex, ts),
            (std::vector<TagId>{ts.At("A"), ts.At("Nc"), ts.At("R"), ts.At("V0")}));
  EXPECT_EQ(CandidateTags("el", lex, ts), (std::vector<TagId>{ts.At("Da")}));
}

TEST(CandidateTagsTest, NoOpenClassIsAnError) {
  const TagSet ts({"X"}, {}, {});
  EXPECT_THROW(CandidateTags("new", Lexicon{}, ts), DataError);
}

}  // namespace
}  // namespace relaxtag
