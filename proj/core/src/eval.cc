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

#include "relaxtag/eval.h"

#include <algorithm>

#include <fmt/format.h>

#include "relaxtag/error.h"

namespace relaxtag {

bool IsAmbiguous(std::string_view surface, const Lexicon &lexicon) {
  const std::vector<TagCount> *tags = lexicon.Find(surface);
  return tags == nullptr || tags->size() >= 2;
}

AccuracyCounts CountAccuracy(const Tagging &predicted, const Corpus &gold,
                             const Lexicon &lexicon, bool ambiguous_only) {
  if (predicted.size() != gold.size()) {
    throw DataError(fmt::format("{} predicted sequences for {} gold sequences",
                                predicted.size(), gold.size()));
  }
  AccuracyCounts counts;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const std::vector<Token> &tokens = gold[s].tokens;
    if (predicted[s].size() != tokens.size()) {
      throw DataError(fmt::format("sequence {} has {} predicted and {} gold tags",
                                  s + 1, predicted[s].size(), tokens.size()));
    }
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      if (!tokens[k].gold) {
        throw DataError("gold token '" + tokens[k].surface + "' has no tag");
      }
      if (ambiguous_only && !IsAmbiguous(tokens[k].surface, lexicon)) continue;
      ++counts.total;
      counts.correct += predicted[s][k] == *tokens[k].gold;
    }
  }
  return counts;
}

std::optional<int> ClassifyBehaviour(
    const std::array<std::optional<double>, kNumWindows> &cells) {
  std::optional<int> best;
  for (int w = 0; w < kNumWindows; ++w) {
    if (cells[w] && (!best || *cells[w] > *cells[*best - 1])) best = w + 1;
  }
  return best;
}

IterationReport MakeReport(std::string algorithm,
                           const std::vector<double> &by_iteration,
                           std::optional<double> convergence) {
  IterationReport report;
  report.algorithm = std::move(algorithm);
  for (std::size_t w = 0; w < kIterationWindows.size(); ++w) {
    const auto [lo, hi] = kIterationWindows[w];
    for (int m = lo; m <= hi && m < static_cast<int>(by_iteration.size()); ++m) {
      auto &cell = report.cells[w];
      cell = cell ? std::max(*cell, by_iteration[m]) : by_iteration[m];
    }
  }
  report.cells[kNumWindows - 1] = convergence;
  report.pattern = ClassifyBehaviour(report.cells);
  return report;
}

namespace {

// Display width of a UTF-8 string: continuation bytes take no column.
std::size_t Columns(const std::string &s) {
  return std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  });
}

std::string Pad(const std::string &s, std::size_t width, bool right) {
  const std::string fill(width > Columns(s) ? width - Columns(s) : 0, ' ');
  return right ? fill + s : s + fill;
}

std::string Cell(const std::optional<double> &v) {
  return v ? fmt::format("{:.2f}", *v) : "—";
}

}  // namespace

std::string RenderTable(const std::vector<IterationReport> &reports) {
  std::size_t name_width = Columns("algorithm");
  for (const IterationReport &r : reports) {
    name_width = std::max(name_width, Columns(r.algorithm));
  }
  constexpr std::size_t kCellWidth = 9;
  std::string out = Pad("algorithm", name_width, false);
  for (const char *head : kWindowNames) out += " " + Pad(head, kCellWidth, true);
  out += "\n";
  for (const IterationReport &r : reports) {
    out += Pad(r.algorithm, name_width, false);
    for (const auto &cell : r.cells) out += " " + Pad(Cell(cell), kCellWidth, true);
    out += "\n";
  }
  return out;
}

std::string RenderTsv(const std::vector<IterationReport> &reports) {
  std::string out = "algorithm";
  for (const char *head : kWindowNames) out += std::string("\t") + head;
  out += "\tpattern\n";
  for (const IterationReport &r : reports) {
    out += r.algorithm;
    for (const auto &cell : r.cells) out += "\t" + (cell ? fmt::format("{:.2f}", *cell) : "");
    out += "\t" + (r.pattern ? std::to_string(*r.pattern) : "") + "\n";
  }
  return out;
}

}  // namespace relaxtag
