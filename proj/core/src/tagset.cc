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

#include "relaxtag/tagset.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "relaxtag/error.h"
#include "text_util.h"

namespace relaxtag {

TagSet::TagSet(std::vector<std::string> tags,
               const std::vector<std::string> &open,
               const std::vector<std::string> &end)
    : names_(std::move(tags)) {
  for (std::uint32_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw DataError("empty tag identifier");
    if (!index_.emplace(names_[i], MakeTag(i)).second) {
      throw DataError("duplicated tag '" + names_[i] + "'");
    }
  }
  open_mask_.assign(names_.size(), false);
  end_mask_.assign(names_.size(), false);
  for (const std::string &name : open) open_mask_[Index(At(name))] = true;
  for (const std::string &name : end) end_mask_[Index(At(name))] = true;
  for (std::uint32_t i = 0; i < names_.size(); ++i) {
    if (open_mask_[i]) open_.push_back(MakeTag(i));
    if (end_mask_[i]) end_.push_back(MakeTag(i));
  }
}

TagSet TagSet::Parse(std::string_view text) {
  enum class Section { kNone, kTags, kOpen, kEnd };
  Section section = Section::kNone;
  std::vector<std::string> tags, open, end;
  std::size_t line_no = 0;
  for (std::string_view raw : internal::SplitLines(text)) {
    ++line_no;
    std::string_view line = internal::Trim(raw);
    if (line.empty()) continue;
    if (line == "tags:") {
      section = Section::kTags;
    } else if (line == "open:") {
      section = Section::kOpen;
    } else if (line == "end:") {
      section = Section::kEnd;
    } else {
      switch (section) {
        case Section::kNone:
          throw DataError("tag listed before any section header", line_no);
        case Section::kTags:
          tags.emplace_back(line);
          break;
        case Section::kOpen:
          open.emplace_back(line);
          break;
        case Section::kEnd:
          end.emplace_back(line);
          break;
      }
    }
  }
  return TagSet(std::move(tags), open, end);
}

TagSet TagSet::Load(const std::filesystem::path &path) {
  try {
    return Parse(ReadFile(path));
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string TagSet::Serialize() const {
  std::string out = "tags:\n";
  for (const std::string &name : names_) out += name + "\n";
  out += "open:\n";
  for (TagId tag : open_) out += name(tag) + "\n";
  out += "end:\n";
  for (TagId tag : end_) out += name(tag) + "\n";
  return out;
}

std::optional<TagId> TagSet::Find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TagId TagSet::At(std::string_view name) const {
  if (auto tag = Find(name)) return *tag;
  throw DataError("unknown tag '" + std::string(name) + "'");
}

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace relaxtag
