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

#include <algorithm>
#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "relaxtag/error.h"
#include "relaxtag/model.h"
#include "text_util.h"

namespace relaxtag {
namespace {

std::string Header(const StatModel &model) {
  return fmt::format("# tiny={} tokens={} sequences={}\n", model.tiny(),
                     model.num_tokens(), model.num_sequences());
}

void WriteText(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("error while writing " + path.string());
}

struct Table {
  double tiny = 0.0;
  std::uint64_t tokens = 0;
  std::uint64_t sequences = 0;
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::size_t> lines;
  std::string text;  // owns the row views
};

std::uint64_t ParseCount(std::string_view field, const std::string &where,
                         std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError(where + ": bad count '" + std::string(field) + "'", line);
  }
  return value;
}

Table ReadTable(const std::filesystem::path &path, std::size_t key_parts) {
  Table table;
  table.text = ReadFile(path);
  const std::string where = path.filename().string();
  std::size_t line_no = 0;
  bool header_seen = false;
  for (std::string_view line : internal::SplitLines(table.text)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (header_seen) continue;
      header_seen = true;
      std::string tiny, tokens, sequences;
      std::size_t pos = 1;
      while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        std::size_t end = line.find(' ', pos);
        if (end == std::string_view::npos) end = line.size();
        std::string_view kv = line.substr(pos, end - pos);
        std::size_t eq = kv.find('=');
        if (eq != std::string_view::npos) {
          std::string_view key = kv.substr(0, eq), value = kv.substr(eq + 1);
          if (key == "tiny") tiny = value;
          if (key == "tokens") tokens = value;
          if (key == "sequences") sequences = value;
        }
        pos = end;
      }
      if (tiny.empty() || tokens.empty() || sequences.empty()) {
        throw DataError(where + ": incomplete header", line_no);
      }
      table.tiny = std::stod(tiny);
      table.tokens = ParseCount(tokens, where, line_no);
      table.sequences = ParseCount(sequences, where, line_no);
      continue;
    }
    auto fields = internal::SplitTabs(line);
    if (fields.size() != key_parts + 2) {
      throw DataError(where + ": expected " + std::to_string(key_parts + 2) +
                          " TAB-separated fields",
                      line_no);
    }
    table.rows.push_back(std::move(fields));
    table.lines.push_back(line_no);
  }
  if (!header_seen) throw DataError(where + ": missing header line");
  return table;
}

}  // namespace

void WriteModelTables(const StatModel &model, const TagSet &tagset,
                      const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  const std::string header = Header(model);
  const std::size_t n = model.num_tags();

  std::string lexical = header;
  for (const auto &[surface, tags] : model.lexicon().entries()) {
    for (const TagCount &tc : tags) {
      lexical += fmt::format("{}\t{}\t{}\t{}\n", surface, tagset.name(tc.tag),
                             tc.count, model.Lexical(surface, tc.tag));
    }
  }
  WriteText(dir / "lexical.tsv", lexical);

  std::string bigram = header;
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) {
      const std::uint64_t count = model.BigramCount(MakeTag(a), MakeTag(b));
      if (count == 0) continue;
      bigram += fmt::format("{}\t{}\t{}\t{}\n", tagset.name(MakeTag(a)),
                            tagset.name(MakeTag(b)), count,
                            model.Transition(MakeTag(a), MakeTag(b)));
    }
  }
  WriteText(dir / "bigram.tsv", bigram);

  std::vector<std::pair<std::uint64_t, std::uint64_t>> trigrams(
      model.trigram_counts().begin(), model.trigram_counts().end());
  std::sort(trigrams.begin(), trigrams.end());
  std::string trigram = header;
  for (const auto &[key, count] : trigrams) {
    const TagId a = MakeTag(static_cast<std::uint32_t>(key / (n * n)));
    const TagId b = MakeTag(static_cast<std::uint32_t>(key / n % n));
    const TagId c = MakeTag(static_cast<std::uint32_t>(key % n));
    trigram += fmt::format("{}\t{}\t{}\t{}\t{}\n", tagset.name(a),
                           tagset.name(b), tagset.name(c), count,
                           model.Trigram(a, b, c));
  }
  WriteText(dir / "trigram.tsv", trigram);

  std::string start = header;
  for (std::uint32_t t = 0; t < n; ++t) {
    const std::uint64_t count = model.StartCount(MakeTag(t));
    if (count == 0) continue;
    start += fmt::format("{}\t{}\t{}\n", tagset.name(MakeTag(t)), count,
                         model.Start(MakeTag(t)));
  }
  WriteText(dir / "start.tsv", start);
}

StatModel ReadModelTables(const TagSet &tagset,
                          const std::filesystem::path &dir) {
  Table lexical = ReadTable(dir / "lexical.tsv", 2);
  Table bigram = ReadTable(dir / "bigram.tsv", 2);
  Table trigram = ReadTable(dir / "trigram.tsv", 3);
  Table start = ReadTable(dir / "start.tsv", 1);
  for (const Table *t : {&bigram, &trigram, &start}) {
    if (t->tiny != lexical.tiny || t->tokens != lexical.tokens ||
        t->sequences != lexical.sequences) {
      throw DataError("model tables in " + dir.string() +
                      " come from different training runs");
    }
  }

  auto tag = [&](std::string_view name, const char *file, std::size_t line) {
    std::optional<TagId> id = tagset.Find(name);
    if (!id) {
      throw DataError(std::string(file) + ": unknown tag '" +
                          std::string(name) + "'",
                      line);
    }
    return *id;
  };

  StatModelBuilder builder(tagset.size(), lexical.tiny);
  for (std::size_t r = 0; r < lexical.rows.size(); ++r) {
    const auto &f = lexical.rows[r];
    const std::size_t line = lexical.lines[r];
    builder.AddLexical(f[0], tag(f[1], "lexical.tsv", line),
                       ParseCount(f[2], "lexical.tsv", line));
  }
  for (std::size_t r = 0; r < bigram.rows.size(); ++r) {
    const auto &f = bigram.rows[r];
    const std::size_t line = bigram.lines[r];
    builder.AddBigram(tag(f[0], "bigram.tsv", line),
                      tag(f[1], "bigram.tsv", line),
                      ParseCount(f[2], "bigram.tsv", line));
  }
  for (std::size_t r = 0; r < trigram.rows.size(); ++r) {
    const auto &f = trigram.rows[r];
    const std::size_t line = trigram.lines[r];
    builder.AddTrigram(tag(f[0], "trigram.tsv", line),
                       tag(f[1], "trigram.tsv", line),
                       tag(f[2], "trigram.tsv", line),
                       ParseCount(f[3], "trigram.tsv", line));
  }
  for (std::size_t r = 0; r < start.rows.size(); ++r) {
    const auto &f = start.rows[r];
    const std::size_t line = start.lines[r];
    builder.AddStart(tag(f[0], "start.tsv", line),
                     ParseCount(f[1], "start.tsv", line));
  }
  StatModel model = std::move(builder).Build();
  if (model.num_tokens() != lexical.tokens ||
      model.num_sequences() != lexical.sequences) {
    throw DataError("model tables in " + dir.string() +
                    " disagree with their header counts");
  }
  return model;
}

}  // namespace relaxtag
