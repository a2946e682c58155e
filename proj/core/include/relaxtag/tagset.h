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

#ifndef RELAXTAG_TAGSET_H_
#define RELAXTAG_TAGSET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace relaxtag {

// Index of a tag inside its TagSet. The numeric order is the TagSet order,
// which is used for every deterministic tie-break in the library.
enum class TagId : std::uint32_t {};

constexpr std::uint32_t Index(TagId tag) { return static_cast<std::uint32_t>(tag); }
constexpr TagId MakeTag(std::uint32_t index) { return static_cast<TagId>(index); }

// The label alphabet. Tags are opaque, case-sensitive strings; a subset is
// marked open-class (candidates for unknown words) and a subset closes word
// sequences.
//
// Text format:
//
//   tags:
//   Nc
//   V0
//   Z.
//   open:
//   Nc
//   end:
//   Z.
//
// Section headers are the exact lines "tags:", "open:" and "end:". Every
// other non-blank line is one identifier. There are no comments, since
// tag sets such as the Penn tag set contain "#".
class TagSet {
 public:
  TagSet() = default;

  // Throws DataError on duplicated tags or on open/end tags not in `tags`.
  TagSet(std::vector<std::string> tags, const std::vector<std::string> &open,
         const std::vector<std::string> &end);

  static TagSet Parse(std::string_view text);
  static TagSet Load(const std::filesystem::path &path);
  std::string Serialize() const;

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }

  const std::string &name(TagId tag) const { return names_.at(Index(tag)); }
  std::optional<TagId> Find(std::string_view name) const;
  // Like Find but throws DataError for unknown names.
  TagId At(std::string_view name) const;

  bool IsOpen(TagId tag) const { return open_mask_.at(Index(tag)); }
  bool IsSentenceEnd(TagId tag) const { return end_mask_.at(Index(tag)); }

  // Both in TagSet order.
  const std::vector<TagId> &open_tags() const { return open_; }
  const std::vector<TagId> &end_tags() const { return end_; }

  bool operator==(const TagSet &other) const {
    return names_ == other.names_ && open_ == other.open_ && end_ == other.end_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, TagId> index_;
  std::vector<TagId> open_;
  std::vector<TagId> end_;
  std::vector<bool> open_mask_;
  std::vector<bool> end_mask_;
};

// Reads a whole file into a string; throws DataError if it cannot be read.
std::string ReadFile(const std::filesystem::path &path);

}  // namespace relaxtag

#endif  // RELAXTAG_TAGSET_H_
