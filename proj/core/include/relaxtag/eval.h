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

#ifndef RELAXTAG_EVAL_H_
#define RELAXTAG_EVAL_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "relaxtag/corpus.h"

namespace relaxtag {

using Tagging = std::vector<std::vector<TagId>>;

struct AccuracyCounts {
  std::size_t correct = 0;
  std::size_t total = 0;

  // Unset when no word was selected.
  std::optional<double> percent() const {
    if (total == 0) return std::nullopt;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  }
};

// A word is ambiguous when its lexicon entry lists two or more tags or it
// is not in the lexicon at all.
bool IsAmbiguous(std::string_view surface, const Lexicon &lexicon);

// Compares `predicted` with the gold tags of `gold`. Throws DataError when
// the shapes differ or a gold tag is missing.
AccuracyCounts CountAccuracy(const Tagging &predicted, const Corpus &gold,
                             const Lexicon &lexicon, bool ambiguous_only);

inline std::optional<double> Accuracy(const Tagging &predicted,
                                      const Corpus &gold, const Lexicon &lexicon,
                                      bool ambiguous_only) {
  return CountAccuracy(predicted, gold, lexicon, ambiguous_only).percent();
}

// Columns it.1-3, it.9-11, it.18-20 and conv.
inline constexpr int kNumWindows = 4;
inline constexpr std::array<std::pair<int, int>, 3> kIterationWindows = {
    {{1, 3}, {9, 11}, {18, 20}}};
inline constexpr std::array<const char *, kNumWindows> kWindowNames = {
    "it.1-3", "it.9-11", "it.18-20", "conv."};

struct IterationReport {
  std::string algorithm;
  std::array<std::optional<double>, kNumWindows> cells;
  std::optional<int> pattern;  // 1..4
};

// The window (1..4) holding the best value; the earliest wins ties. Unset
// when every cell is missing.
std::optional<int> ClassifyBehaviour(
    const std::array<std::optional<double>, kNumWindows> &cells);

// `by_iteration[m]` is the accuracy after iteration m (entry 0 is the
// initial state and belongs to no window). Each window cell is the best
// value inside its range.
IterationReport MakeReport(std::string algorithm,
                           const std::vector<double> &by_iteration,
                           std::optional<double> convergence);

// Fixed-width table, one row per report in input order, two decimals and
// "—" for missing cells.
std::string RenderTable(const std::vector<IterationReport> &reports);

// Same content as tab-separated values plus the behaviour pattern.
std::string RenderTsv(const std::vector<IterationReport> &reports);

}  // namespace relaxtag

#endif  // RELAXTAG_EVAL_H_
