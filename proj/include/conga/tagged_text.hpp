#pragma once

// Inline gender-tag grammar.
//
//   TAG    := "<" ("M" | "F" | "A") POSINT ">"
//   POSINT := [1-9][0-9]*
//
// A line is split on ASCII whitespace into chunks. A chunk matching TAG binds
// to the closest preceding non-tag chunk; every other chunk is a token.
// Chunks that start with '<' and end with '>' but do not match TAG are
// rejected instead of being read as ordinary words.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conga/error.hpp"

namespace conga {

enum class Gender : std::uint8_t { Masculine, Feminine, Ambiguous };

char gender_letter(Gender g) noexcept;
std::optional<Gender> gender_from_letter(char c) noexcept;

using EntityIndex = std::uint32_t;

struct GenderTag {
  Gender gender = Gender::Ambiguous;
  EntityIndex entity = 1;  // >= 1

  friend bool operator==(const GenderTag&, const GenderTag&) = default;
};

struct TaggedToken {
  std::string surface;
  std::optional<GenderTag> tag;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

struct TaggedSentence {
  std::vector<TaggedToken> tokens;

  std::size_t tag_count() const noexcept;
  bool empty() const noexcept { return tokens.empty(); }

  friend bool operator==(const TaggedSentence&, const TaggedSentence&) = default;
};

class TagParseError : public Error {
 public:
  enum class Kind { TagAtSentenceStart, DoubleTag, MalformedTag };

  TagParseError(Kind kind, std::size_t offset, std::string detail);

  Kind kind() const noexcept { return kind_; }
  // Byte offset of the offending chunk in the parsed text.
  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Kind kind_;
  std::size_t offset_;
  std::string detail_;
};

const char* to_string(TagParseError::Kind kind) noexcept;

bool is_tag_whitespace(char c) noexcept;

// True when `chunk` has the outward shape of a tag: at least two bytes,
// starting with '<' and ending with '>'.
bool looks_like_tag(std::string_view chunk) noexcept;

// Parses `chunk` against the tag grammar. Returns nullopt when it does not
// match (including entity indices that do not fit in EntityIndex).
std::optional<GenderTag> parse_tag(std::string_view chunk) noexcept;

std::string format_tag(const GenderTag& tag);

TaggedSentence parse_tagged(std::string_view text);
std::string serialize_tagged(const TaggedSentence& sentence);

struct Mention {
  std::size_t position = 0;
  Gender gender = Gender::Ambiguous;

  friend bool operator==(const Mention&, const Mention&) = default;
};

using EntityMap = std::map<EntityIndex, std::vector<Mention>>;

// Groups every tagged token by entity index, preserving token order.
EntityMap entity_map(const TaggedSentence& sentence);

}  // namespace conga
