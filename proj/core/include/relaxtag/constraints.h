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

// Hand-written context constraints and their instantiation into per-target
// constraint sets.
//
// Constraint files hold ';'-terminated statements:
//
//   "tal" * <\Cq\> ;
//   \MD\ *0..1 <\VB\> ;
//   <"out",\II\> "of" @ 2.5 ;
//
// "word" is a word literal, \tag\ a tag, [\t1\ \t2\] a set of tags, * a
// gap of exactly one token and *m..n a gap of m to n tokens. The heart in
// angle brackets is a word, a tag or a "word",\tag\ pair. An optional
// "@ <real>" before ';' fixes the compatibility of the rule. '#' starts a
// comment that runs to the end of the line.

#ifndef RELAXTAG_CONSTRAINTS_H_
#define RELAXTAG_CONSTRAINTS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "relaxtag/corpus.h"
#include "relaxtag/model.h"
#include "relaxtag/tagset.h"

namespace relaxtag {

inline constexpr int kMaxGap = 99;

struct WordLit {
  std::string surface;
  bool operator==(const WordLit &) const = default;
};

struct TagLit {
  TagId tag;
  bool operator==(const TagLit &) const = default;
};

// Members in TagSet order, without duplicates.
struct TagSetLit {
  std::vector<TagId> tags;
  bool operator==(const TagSetLit &) const = default;
};

struct Gap {
  int min = 1;
  int max = 1;
  bool operator==(const Gap &) const = default;
};

using BodyItem = std::variant<WordLit, TagLit, TagSetLit, Gap>;

// At least one of surface and tag is set.
struct Heart {
  std::optional<std::string> surface;
  std::optional<TagId> tag;
  bool operator==(const Heart &) const = default;
};

struct ConstraintPattern {
  std::vector<BodyItem> left;   // in text order
  Heart heart;
  std::vector<BodyItem> right;  // in text order
  std::optional<double> compatibility;
  std::size_t line = 0;

  // Structural equality; the source line is ignored.
  bool operator==(const ConstraintPattern &other) const {
    return left == other.left && heart == other.heart &&
           right == other.right && compatibility == other.compatibility;
  }
};

// Throws DataError naming the line for a missing or repeated heart, an
// unknown tag, a malformed gap, a word inside [ ] or an unterminated
// statement.
std::vector<ConstraintPattern> ParseConstraints(std::string_view text,
                                                const TagSet &tagset);
std::vector<ConstraintPattern> LoadConstraints(const std::filesystem::path &path,
                                               const TagSet &tagset);

// Canonical single-line form, ending in ';'. Parsing the result gives back
// an equal pattern. The "@ value" annotation is written only when
// `with_compatibility` is set and the pattern carries a value.
std::string FormatConstraint(const ConstraintPattern &pattern,
                             const TagSet &tagset,
                             bool with_compatibility = true);
std::string FormatConstraints(const std::vector<ConstraintPattern> &patterns,
                              const TagSet &tagset);

struct TagFactor {
  std::size_t position;
  TagId tag;
  auto operator<=>(const TagFactor &) const = default;
};

bool HeartApplies(const Heart &heart, std::string_view surface, TagId tag);

// Instantiations of `pattern` for target tag `tag` at `position`. Each side
// of the heart is aligned independently: the body items nearest to the
// heart match the adjacent tokens, and among all alignments of a side the
// one with the smallest total gap length wins, ties going to the one whose
// gaps nearest the heart are shortest. Tag sets expand into one
// instantiation per member tag present among the candidates. Factors are in
// position order; word literals and gaps contribute none.
std::vector<std::vector<TagFactor>> MatchConstraint(
    const ConstraintPattern &pattern, const WordSequence &sequence,
    const Candidates &candidates, std::size_t position, TagId tag);

// Whether the body of `pattern` aligns around `position`, ignoring the heart.
bool BodyMatches(const ConstraintPattern &pattern, const WordSequence &sequence,
                 const Candidates &candidates, std::size_t position);

// Over all positions of a gold corpus: n_ab = full matches, n_a = body
// matches, n_b = heart matches, n_total = positions.
PairCounts CountPattern(const ConstraintPattern &pattern, const Corpus &corpus);

// Confined compatibility values for pattern counts. When unset, the linear
// confiner range is the largest |value| among patterns with n_ab > 0.
std::vector<double> HandCompatibilities(const std::vector<PairCounts> &counts,
                                        Measure measure, Confiner confiner,
                                        std::optional<double> beta,
                                        double tiny = kDefaultTiny);

// "rule<TAB>n_ab<TAB>n_a<TAB>n_b<TAB>n_total" lines keyed by the canonical
// rule text without compatibility.
using HandCounts = std::map<std::string, PairCounts>;
void WriteHandCounts(const HandCounts &counts, const std::filesystem::path &path);
HandCounts ReadHandCounts(const std::filesystem::path &path);

// Which constraint sources feed the bundle. `backoff` uses the ternary set
// of a target when one of its trigrams was observed and the binary set
// otherwise.
struct Selection {
  bool bigrams = false;
  bool trigrams = false;
  bool hand = false;
  bool backoff = false;

  bool empty() const { return !bigrams && !trigrams && !hand && !backoff; }
  bool operator==(const Selection &) const = default;
};

// Reference to the weight of candidate `slot` at `position`.
struct WeightRef {
  std::uint32_t position;
  std::uint32_t slot;
  bool operator==(const WeightRef &) const = default;
};

enum class DegreeClass : std::uint8_t { kBinary, kTernary, kHand };

// Cells group constraints of one degree class over one window. The
// product-form supports multiply one factor per non-empty cell.
enum Cell : std::uint8_t {
  kCellBigramLeft,     // (i-1, i)
  kCellBigramRight,    // (i, i+1)
  kCellTrigramLeft,    // (i-2, i-1, i)
  kCellTrigramMiddle,  // (i-1, i, i+1)
  kCellTrigramRight,   // (i, i+1, i+2)
  kCellHand,
  kNumCells,
};

DegreeClass ClassOf(Cell cell);

struct InstantiatedConstraint {
  double compatibility = 0.0;
  std::uint32_t first_factor = 0;  // into ConstraintBundle::factors()
  std::uint32_t num_factors = 0;   // the target itself is not listed
  Cell cell = kCellHand;
  bool operator==(const InstantiatedConstraint &) const = default;
};

// Instantiated constraints for every (position, candidate slot) target of
// one sequence. Targets are numbered row-major; the constraints of a target
// are ordered by cell, then by instantiation order.
class ConstraintBundle {
 public:
  std::size_t num_positions() const { return row_offset_.size() - 1; }
  std::size_t num_slots(std::size_t position) const {
    return row_offset_[position + 1] - row_offset_[position];
  }
  std::size_t num_targets() const { return row_offset_.back(); }
  std::size_t target(std::size_t position, std::size_t slot) const {
    return row_offset_[position] + slot;
  }

  std::span<const InstantiatedConstraint> constraints(std::size_t target) const {
    return {constraints_.data() + target_begin_[target],
            constraints_.data() + target_begin_[target + 1]};
  }
  std::span<const WeightRef> factors(const InstantiatedConstraint &c) const {
    return {factors_.data() + c.first_factor, c.num_factors};
  }
  std::size_t size() const { return constraints_.size(); }

  bool operator==(const ConstraintBundle &) const = default;

 private:
  friend class BundleBuilder;

  std::vector<std::uint32_t> row_offset_{0};
  std::vector<std::uint32_t> target_begin_{0};
  std::vector<InstantiatedConstraint> constraints_;
  std::vector<WeightRef> factors_;
};

// Appends constraints target by target, in row-major order.
class BundleBuilder {
 public:
  explicit BundleBuilder(const Candidates &candidates);

  void Add(Cell cell, double compatibility, std::span<const WeightRef> factors);
  // Closes the current target and moves to the next one.
  void NextTarget();
  ConstraintBundle Build() &&;

 private:
  ConstraintBundle bundle_;
  std::size_t targets_closed_ = 0;
};

// `ngrams` may be null when neither bigrams, trigrams nor back-off are
// selected. Every hand pattern must carry a compatibility. Throws
// ConfigError otherwise.
ConstraintBundle InstantiateBundle(const WordSequence &sequence,
                                   const Candidates &candidates,
                                   const NgramCompatibility *ngrams,
                                   const std::vector<ConstraintPattern> &hand,
                                   const Selection &selection);

}  // namespace relaxtag

#endif  // RELAXTAG_CONSTRAINTS_H_
