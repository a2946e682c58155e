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

#include "relaxtag/constraints.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "relaxtag/error.h"
#include "text_util.h"

namespace relaxtag {
namespace {

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
bool IsDigit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  Parser(std::string_view text, const TagSet &tagset)
      : text_(text), tagset_(tagset) {}

  std::vector<ConstraintPattern> Parse() {
    std::vector<ConstraintPattern> patterns;
    while (true) {
      SkipBlanks();
      if (AtEnd()) break;
      patterns.push_back(Statement());
    }
    return patterns;
  }

 private:
  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return text_[pos_]; }
  char Get() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void Fail(const std::string &message) const {
    throw DataError(message, line_);
  }

  void SkipBlanks() {
    while (!AtEnd()) {
      if (IsSpace(Peek())) {
        Get();
      } else if (Peek() == '#') {
        while (!AtEnd() && Peek() != '\n') Get();
      } else {
        break;
      }
    }
  }

  std::string Delimited(char close, const char *what) {
    std::string out;
    while (true) {
      if (AtEnd() || Peek() == '\n') Fail(std::string("unterminated ") + what);
      const char c = Get();
      if (c == close) break;
      out += c;
    }
    if (out.empty()) Fail(std::string("empty ") + what);
    return out;
  }

  std::string Word() {
    Get();
    return Delimited('"', "word literal");
  }

  TagId Tag() {
    Get();
    const std::string name = Delimited('\\', "tag");
    std::optional<TagId> tag = tagset_.Find(name);
    if (!tag) Fail("unknown tag '" + name + "'");
    return *tag;
  }

  int Integer() {
    int value = 0;
    if (AtEnd() || !IsDigit(Peek())) Fail("expected a number in gap");
    while (!AtEnd() && IsDigit(Peek())) {
      value = value * 10 + (Get() - '0');
      if (value > kMaxGap) Fail("gap length above " + std::to_string(kMaxGap));
    }
    return value;
  }

  BodyItem Item() {
    const char c = Peek();
    if (c == '"') return WordLit{Word()};
    if (c == '\\') return TagLit{Tag()};
    if (c == '[') {
      Get();
      TagSetLit set;
      while (true) {
        SkipBlanks();
        if (AtEnd()) Fail("unterminated tag set");
        if (Peek() == ']') {
          Get();
          break;
        }
        if (Peek() == '"') Fail("word literals are not allowed inside [ ]");
        if (Peek() != '\\') Fail(std::string("unexpected '") + Peek() + "' in tag set");
        set.tags.push_back(Tag());
      }
      if (set.tags.empty()) Fail("empty tag set");
      std::sort(set.tags.begin(), set.tags.end());
      set.tags.erase(std::unique(set.tags.begin(), set.tags.end()), set.tags.end());
      return set;
    }
    if (c == '*') {
      Get();
      if (AtEnd() || !IsDigit(Peek())) return Gap{1, 1};
      Gap gap;
      gap.min = Integer();
      if (text_.substr(pos_, 2) != "..") Fail("expected '..' in gap");
      Get();
      Get();
      gap.max = Integer();
      if (gap.min > gap.max) Fail("gap minimum above its maximum");
      return gap;
    }
    Fail(std::string("unexpected '") + c + "'");
  }

  Heart ParseHeart() {
    Get();
    Heart heart;
    SkipBlanks();
    if (AtEnd()) Fail("unterminated heart");
    if (Peek() == '"') {
      heart.surface = Word();
      SkipBlanks();
      if (!AtEnd() && Peek() == ',') {
        Get();
        SkipBlanks();
        if (AtEnd() || Peek() != '\\') Fail("expected a tag after ',' in heart");
        heart.tag = Tag();
      }
    } else if (Peek() == '\\') {
      heart.tag = Tag();
    } else {
      Fail("heart must be a word, a tag or a word,tag pair");
    }
    SkipBlanks();
    if (AtEnd() || Peek() != '>') Fail("expected '>' closing the heart");
    Get();
    return heart;
  }

  double Compatibility() {
    Get();
    SkipBlanks();
    const std::size_t start = pos_;
    while (!AtEnd() && !IsSpace(Peek()) && Peek() != ';') Get();
    std::string_view number = text_.substr(start, pos_ - start);
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(number.data(), number.data() + number.size(), value);
    if (number.empty() || ec != std::errc() ||
        ptr != number.data() + number.size() || !std::isfinite(value)) {
      Fail("bad compatibility value '" + std::string(number) + "'");
    }
    return value;
  }

  ConstraintPattern Statement() {
    ConstraintPattern pattern;
    pattern.line = line_;
    bool has_heart = false;
    while (true) {
      SkipBlanks();
      if (AtEnd()) throw DataError("unterminated statement", pattern.line);
      const char c = Peek();
      if (c == ';') {
        Get();
        break;
      }
      if (pattern.compatibility) Fail("'@ value' must be last in a statement");
      if (c == '<') {
        if (has_heart) Fail("statement has two hearts");
        pattern.heart = ParseHeart();
        has_heart = true;
      } else if (c == '@') {
        pattern.compatibility = Compatibility();
      } else {
        (has_heart ? pattern.right : pattern.left).push_back(Item());
      }
    }
    if (!has_heart) throw DataError("statement has no heart", pattern.line);
    return pattern;
  }

  std::string_view text_;
  const TagSet &tagset_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string FormatItem(const BodyItem &item, const TagSet &tagset) {
  return std::visit(
      [&](const auto &v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, WordLit>) {
          return "\"" + v.surface + "\"";
        } else if constexpr (std::is_same_v<T, TagLit>) {
          return "\\" + tagset.name(v.tag) + "\\";
        } else if constexpr (std::is_same_v<T, TagSetLit>) {
          std::string out = "[";
          for (std::size_t k = 0; k < v.tags.size(); ++k) {
            if (k > 0) out += ' ';
            out += "\\" + tagset.name(v.tags[k]) + "\\";
          }
          return out + "]";
        } else {
          if (v.min == 1 && v.max == 1) return "*";
          return fmt::format("*{}..{}", v.min, v.max);
        }
      },
      item);
}

bool Contains(const std::vector<TagId> &tags, TagId tag) {
  return std::binary_search(tags.begin(), tags.end(), tag);
}

// Aligns the body items of one side of the heart. Items are visited from
// the heart outward; `positions` receives the position of every item (gaps
// get their first skipped position or the next item's one).
class SideAligner {
 public:
  SideAligner(const std::vector<BodyItem> &items, bool leftward,
              const WordSequence &sequence, const Candidates &candidates)
      : sequence_(sequence), candidates_(candidates), step_(leftward ? -1 : 1) {
    for (std::size_t k = 0; k < items.size(); ++k) {
      items_.push_back(&items[leftward ? items.size() - 1 - k : k]);
    }
    later_min_.assign(items_.size() + 1, 0);
    later_max_.assign(items_.size() + 1, 0);
    for (std::size_t k = items_.size(); k-- > 0;) {
      later_min_[k] = later_min_[k + 1];
      later_max_[k] = later_max_[k + 1];
      if (const Gap *gap = std::get_if<Gap>(items_[k])) {
        later_min_[k] += gap->min;
        later_max_[k] += gap->max;
      }
    }
    positions_.assign(items_.size(), 0);
  }

  bool Align(std::size_t heart) {
    const long start = static_cast<long>(heart) + step_;
    for (int span = later_min_[0]; span <= later_max_[0]; ++span) {
      if (Search(0, start, span)) return true;
    }
    return false;
  }

  const std::vector<const BodyItem *> &items() const { return items_; }
  const std::vector<long> &positions() const { return positions_; }

 private:
  bool Valid(long pos) const {
    return pos >= 0 && pos < static_cast<long>(sequence_.size());
  }

  bool Matches(const BodyItem &item, long pos) const {
    const std::vector<TagId> &cands = candidates_[pos];
    if (const WordLit *word = std::get_if<WordLit>(&item)) {
      return sequence_.tokens[pos].surface == word->surface;
    }
    if (const TagLit *tag = std::get_if<TagLit>(&item)) {
      return Contains(cands, tag->tag);
    }
    const TagSetLit &set = std::get<TagSetLit>(item);
    return std::any_of(set.tags.begin(), set.tags.end(),
                       [&](TagId t) { return Contains(cands, t); });
  }

  bool Search(std::size_t k, long pos, int budget) {
    if (k == items_.size()) return budget == 0;
    positions_[k] = pos;
    if (const Gap *gap = std::get_if<Gap>(items_[k])) {
      const int lo = std::max(gap->min, budget - later_max_[k + 1]);
      const int hi = std::min(gap->max, budget - later_min_[k + 1]);
      for (int len = lo; len <= hi; ++len) {
        if (len > 0 && !Valid(pos + step_ * (len - 1))) break;
        if (Search(k + 1, pos + step_ * len, budget - len)) return true;
      }
      return false;
    }
    if (!Valid(pos) || !Matches(*items_[k], pos)) return false;
    return Search(k + 1, pos + step_, budget);
  }

  const WordSequence &sequence_;
  const Candidates &candidates_;
  const long step_;
  std::vector<const BodyItem *> items_;
  std::vector<int> later_min_;
  std::vector<int> later_max_;
  std::vector<long> positions_;
};

// Appends the tag choices of every tag-bearing item of an aligned side.
void CollectChoices(const SideAligner &side, const Candidates &candidates,
                    std::vector<std::pair<std::size_t, std::vector<TagId>>> *out) {
  for (std::size_t k = 0; k < side.items().size(); ++k) {
    const BodyItem &item = *side.items()[k];
    const std::size_t pos = static_cast<std::size_t>(side.positions()[k]);
    if (const TagLit *tag = std::get_if<TagLit>(&item)) {
      out->emplace_back(pos, std::vector<TagId>{tag->tag});
    } else if (const TagSetLit *set = std::get_if<TagSetLit>(&item)) {
      std::vector<TagId> present;
      for (TagId t : set->tags) {
        if (Contains(candidates[pos], t)) present.push_back(t);
      }
      out->emplace_back(pos, std::move(present));
    }
  }
}

}  // namespace

std::vector<ConstraintPattern> ParseConstraints(std::string_view text,
                                                const TagSet &tagset) {
  return Parser(text, tagset).Parse();
}

std::vector<ConstraintPattern> LoadConstraints(const std::filesystem::path &path,
                                               const TagSet &tagset) {
  const std::string text = ReadFile(path);
  try {
    return ParseConstraints(text, tagset);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string FormatConstraint(const ConstraintPattern &pattern,
                             const TagSet &tagset, bool with_compatibility) {
  std::string out;
  for (const BodyItem &item : pattern.left) out += FormatItem(item, tagset) + " ";
  out += "<";
  if (pattern.heart.surface) out += "\"" + *pattern.heart.surface + "\"";
  if (pattern.heart.surface && pattern.heart.tag) out += ",";
  if (pattern.heart.tag) out += "\\" + tagset.name(*pattern.heart.tag) + "\\";
  out += ">";
  for (const BodyItem &item : pattern.right) out += " " + FormatItem(item, tagset);
  if (with_compatibility && pattern.compatibility) {
    out += fmt::format(" @ {}", *pattern.compatibility);
  }
  return out + ";";
}

std::string FormatConstraints(const std::vector<ConstraintPattern> &patterns,
                              const TagSet &tagset) {
  std::string out;
  for (const ConstraintPattern &p : patterns) {
    out += FormatConstraint(p, tagset) + "\n";
  }
  return out;
}

bool HeartApplies(const Heart &heart, std::string_view surface, TagId tag) {
  if (heart.surface && *heart.surface != surface) return false;
  if (heart.tag && *heart.tag != tag) return false;
  return true;
}

std::vector<std::vector<TagFactor>> MatchConstraint(
    const ConstraintPattern &pattern, const WordSequence &sequence,
    const Candidates &candidates, std::size_t position, TagId tag) {
  std::vector<std::vector<TagFactor>> out;
  if (!HeartApplies(pattern.heart, sequence.tokens[position].surface, tag)) {
    return out;
  }
  SideAligner left(pattern.left, true, sequence, candidates);
  if (!left.Align(position)) return out;
  SideAligner right(pattern.right, false, sequence, candidates);
  if (!right.Align(position)) return out;

  std::vector<std::pair<std::size_t, std::vector<TagId>>> choices;
  CollectChoices(left, candidates, &choices);
  CollectChoices(right, candidates, &choices);
  std::sort(choices.begin(), choices.end());

  std::vector<std::size_t> pick(choices.size(), 0);
  while (true) {
    std::vector<TagFactor> factors;
    factors.reserve(choices.size());
    for (std::size_t k = 0; k < choices.size(); ++k) {
      factors.push_back(TagFactor{choices[k].first, choices[k].second[pick[k]]});
    }
    out.push_back(std::move(factors));
    std::size_t k = choices.size();
    while (k > 0 && ++pick[k - 1] == choices[k - 1].second.size()) {
      pick[k - 1] = 0;
      --k;
    }
    if (k == 0) return out;
  }
}

bool BodyMatches(const ConstraintPattern &pattern, const WordSequence &sequence,
                 const Candidates &candidates, std::size_t position) {
  SideAligner left(pattern.left, true, sequence, candidates);
  if (!left.Align(position)) return false;
  SideAligner right(pattern.right, false, sequence, candidates);
  return right.Align(position);
}

PairCounts CountPattern(const ConstraintPattern &pattern, const Corpus &corpus) {
  PairCounts counts;
  for (const WordSequence &sequence : corpus) {
    Candidates gold;
    gold.reserve(sequence.size());
    for (const Token &token : sequence.tokens) {
      if (!token.gold) {
        throw DataError("token '" + token.surface + "' has no gold tag");
      }
      gold.push_back({*token.gold});
    }
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      const bool heart =
          HeartApplies(pattern.heart, sequence.tokens[i].surface, gold[i][0]);
      const bool body = BodyMatches(pattern, sequence, gold, i);
      counts.n_b += heart;
      counts.n_a += body;
      counts.n_ab += heart && body;
      ++counts.n_total;
    }
  }
  return counts;
}

std::vector<double> HandCompatibilities(const std::vector<PairCounts> &counts,
                                        Measure measure, Confiner confiner,
                                        std::optional<double> beta,
                                        double tiny) {
  std::vector<double> raw;
  std::vector<double> observed;
  raw.reserve(counts.size());
  for (const PairCounts &c : counts) {
    raw.push_back(CompatibilityValue(c, measure, tiny));
    if (c.n_ab > 0) observed.push_back(raw.back());
  }
  const ConfiningSpec spec = FitConfiner(confiner, beta, observed);
  for (double &v : raw) v = Confine(v, spec);
  return raw;
}

void WriteHandCounts(const HandCounts &counts, const std::filesystem::path &path) {
  std::string text;
  for (const auto &[rule, c] : counts) {
    text += fmt::format("{}\t{}\t{}\t{}\t{}\n", rule, c.n_ab, c.n_a, c.n_b,
                        c.n_total);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

HandCounts ReadHandCounts(const std::filesystem::path &path) {
  const std::string text = ReadFile(path);
  HandCounts counts;
  std::size_t line_no = 0;
  for (std::string_view line : internal::SplitLines(text)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = internal::SplitTabs(line);
    if (fields.size() != 5) {
      throw DataError(path.filename().string() + ": expected 5 fields", line_no);
    }
    std::uint64_t v[4];
    for (int k = 0; k < 4; ++k) {
      std::string_view f = fields[k + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v[k]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw DataError(path.filename().string() + ": bad count", line_no);
      }
    }
    counts[std::string(fields[0])] = PairCounts{v[0], v[1], v[2], v[3]};
  }
  return counts;
}

DegreeClass ClassOf(Cell cell) {
  switch (cell) {
    case kCellBigramLeft:
    case kCellBigramRight:
      return DegreeClass::kBinary;
    case kCellTrigramLeft:
    case kCellTrigramMiddle:
    case kCellTrigramRight:
      return DegreeClass::kTernary;
    default:
      return DegreeClass::kHand;
  }
}

BundleBuilder::BundleBuilder(const Candidates &candidates) {
  for (const std::vector<TagId> &row : candidates) {
    bundle_.row_offset_.push_back(bundle_.row_offset_.back() +
                                  static_cast<std::uint32_t>(row.size()));
  }
}

void BundleBuilder::Add(Cell cell, double compatibility,
                        std::span<const WeightRef> factors) {
  InstantiatedConstraint c;
  c.compatibility = compatibility;
  c.first_factor = static_cast<std::uint32_t>(bundle_.factors_.size());
  c.num_factors = static_cast<std::uint32_t>(factors.size());
  c.cell = cell;
  bundle_.factors_.insert(bundle_.factors_.end(), factors.begin(), factors.end());
  bundle_.constraints_.push_back(c);
}

void BundleBuilder::NextTarget() {
  bundle_.target_begin_.push_back(
      static_cast<std::uint32_t>(bundle_.constraints_.size()));
  ++targets_closed_;
}

ConstraintBundle BundleBuilder::Build() && {
  if (targets_closed_ != bundle_.num_targets()) {
    throw Error("bundle closed with missing targets");
  }
  return std::move(bundle_);
}

namespace {

void AddBinary(const NgramCompatibility &ngrams, const Candidates &cands,
               std::size_t i, TagId j, BundleBuilder *builder) {
  const std::size_t n = cands.size();
  const std::uint32_t pos = static_cast<std::uint32_t>(i);
  if (i >= 1) {
    for (std::uint32_t a = 0; a < cands[i - 1].size(); ++a) {
      const WeightRef f[] = {{pos - 1, a}};
      builder->Add(kCellBigramLeft, ngrams.Bigram(cands[i - 1][a], j), f);
    }
  }
  if (i + 1 < n) {
    for (std::uint32_t b = 0; b < cands[i + 1].size(); ++b) {
      const WeightRef f[] = {{pos + 1, b}};
      builder->Add(kCellBigramRight, ngrams.Bigram(j, cands[i + 1][b]), f);
    }
  }
}

void AddTernary(const NgramCompatibility &ngrams, const Candidates &cands,
                std::size_t i, TagId j, BundleBuilder *builder) {
  const std::size_t n = cands.size();
  const std::uint32_t pos = static_cast<std::uint32_t>(i);
  if (i >= 2) {
    for (std::uint32_t a = 0; a < cands[i - 2].size(); ++a) {
      for (std::uint32_t b = 0; b < cands[i - 1].size(); ++b) {
        const WeightRef f[] = {{pos - 2, a}, {pos - 1, b}};
        builder->Add(kCellTrigramLeft,
                     ngrams.Trigram(cands[i - 2][a], cands[i - 1][b], j), f);
      }
    }
  }
  if (i >= 1 && i + 1 < n) {
    for (std::uint32_t a = 0; a < cands[i - 1].size(); ++a) {
      for (std::uint32_t c = 0; c < cands[i + 1].size(); ++c) {
        const WeightRef f[] = {{pos - 1, a}, {pos + 1, c}};
        builder->Add(kCellTrigramMiddle,
                     ngrams.Trigram(cands[i - 1][a], j, cands[i + 1][c]), f);
      }
    }
  }
  if (i + 2 < n) {
    for (std::uint32_t b = 0; b < cands[i + 1].size(); ++b) {
      for (std::uint32_t c = 0; c < cands[i + 2].size(); ++c) {
        const WeightRef f[] = {{pos + 1, b}, {pos + 2, c}};
        builder->Add(kCellTrigramRight,
                     ngrams.Trigram(j, cands[i + 1][b], cands[i + 2][c]), f);
      }
    }
  }
}

bool TrigramObserved(const StatModel &model, const Candidates &cands,
                     std::size_t i, TagId j) {
  const std::size_t n = cands.size();
  if (i >= 2) {
    for (TagId a : cands[i - 2]) {
      for (TagId b : cands[i - 1]) {
        if (model.TrigramCount(a, b, j) > 0) return true;
      }
    }
  }
  if (i >= 1 && i + 1 < n) {
    for (TagId a : cands[i - 1]) {
      for (TagId c : cands[i + 1]) {
        if (model.TrigramCount(a, j, c) > 0) return true;
      }
    }
  }
  if (i + 2 < n) {
    for (TagId b : cands[i + 1]) {
      for (TagId c : cands[i + 2]) {
        if (model.TrigramCount(j, b, c) > 0) return true;
      }
    }
  }
  return false;
}

std::uint32_t SlotOf(const std::vector<TagId> &row, TagId tag) {
  auto it = std::lower_bound(row.begin(), row.end(), tag);
  return static_cast<std::uint32_t>(it - row.begin());
}

}  // namespace

ConstraintBundle InstantiateBundle(const WordSequence &sequence,
                                   const Candidates &candidates,
                                   const NgramCompatibility *ngrams,
                                   const std::vector<ConstraintPattern> &hand,
                                   const Selection &selection) {
  if (selection.backoff && (selection.bigrams || selection.trigrams)) {
    throw ConfigError("back-off already chooses between bigrams and trigrams");
  }
  if ((selection.bigrams || selection.trigrams || selection.backoff) &&
      ngrams == nullptr) {
    throw ConfigError("n-gram constraints selected without a model");
  }
  if (selection.hand) {
    for (const ConstraintPattern &p : hand) {
      if (!p.compatibility) {
        throw ConfigError(fmt::format(
            "hand-written constraint on line {} has no compatibility", p.line));
      }
    }
  }
  if (candidates.size() != sequence.size()) {
    throw Error("candidate rows do not match the sequence length");
  }

  BundleBuilder builder(candidates);
  std::vector<WeightRef> refs;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    for (TagId j : candidates[i]) {
      if (selection.backoff) {
        if (TrigramObserved(ngrams->model(), candidates, i, j)) {
          AddTernary(*ngrams, candidates, i, j, &builder);
        } else {
          AddBinary(*ngrams, candidates, i, j, &builder);
        }
      } else {
        if (selection.bigrams) AddBinary(*ngrams, candidates, i, j, &builder);
        if (selection.trigrams) AddTernary(*ngrams, candidates, i, j, &builder);
      }
      if (selection.hand) {
        for (const ConstraintPattern &p : hand) {
          for (const auto &match : MatchConstraint(p, sequence, candidates, i, j)) {
            refs.clear();
            for (const TagFactor &f : match) {
              refs.push_back(WeightRef{static_cast<std::uint32_t>(f.position),
                                       SlotOf(candidates[f.position], f.tag)});
            }
            builder.Add(kCellHand, *p.compatibility, refs);
          }
        }
      }
      builder.NextTarget();
    }
  }
  return std::move(builder).Build();
}

}  // namespace relaxtag
