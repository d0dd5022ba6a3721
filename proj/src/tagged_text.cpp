#include "conga/tagged_text.hpp"

#include <limits>

namespace conga {

char gender_letter(Gender g) noexcept {
  switch (g) {
    case Gender::Masculine:
      return 'M';
    case Gender::Feminine:
      return 'F';
    case Gender::Ambiguous:
      return 'A';
  }
  return '?';
}

std::optional<Gender> gender_from_letter(char c) noexcept {
  switch (c) {
    case 'M':
      return Gender::Masculine;
    case 'F':
      return Gender::Feminine;
    case 'A':
      return Gender::Ambiguous;
    default:
      return std::nullopt;
  }
}

std::size_t TaggedSentence::tag_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : tokens) {
    if (t.tag) ++n;
  }
  return n;
}

TagParseError::TagParseError(Kind kind, std::size_t offset, std::string detail)
    : Error(std::string(to_string(kind)) + " at byte " + std::to_string(offset) +
            ": " + detail),
      kind_(kind),
      offset_(offset),
      detail_(std::move(detail)) {}

const char* to_string(TagParseError::Kind kind) noexcept {
  switch (kind) {
    case TagParseError::Kind::TagAtSentenceStart:
      return "TagAtSentenceStart";
    case TagParseError::Kind::DoubleTag:
      return "DoubleTag";
    case TagParseError::Kind::MalformedTag:
      return "MalformedTag";
  }
  return "Unknown";
}

bool is_tag_whitespace(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool looks_like_tag(std::string_view chunk) noexcept {
  return chunk.size() >= 2 && chunk.front() == '<' && chunk.back() == '>';
}

std::optional<GenderTag> parse_tag(std::string_view chunk) noexcept {
  // Shortest tag is "<M1>".
  if (chunk.size() < 4 || !looks_like_tag(chunk)) return std::nullopt;
  auto gender = gender_from_letter(chunk[1]);
  if (!gender) return std::nullopt;
  std::string_view digits = chunk.substr(2, chunk.size() - 3);
  if (digits.front() < '1' || digits.front() > '9') return std::nullopt;
  std::uint64_t value = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
    if (value > std::numeric_limits<EntityIndex>::max()) return std::nullopt;
  }
  return GenderTag{*gender, static_cast<EntityIndex>(value)};
}

std::string format_tag(const GenderTag& tag) {
  std::string out = "<";
  out += gender_letter(tag.gender);
  out += std::to_string(tag.entity);
  out += '>';
  return out;
}

TaggedSentence parse_tagged(std::string_view text) {
  TaggedSentence sentence;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_tag_whitespace(text[i])) ++i;
    if (i == n) break;
    const std::size_t start = i;
    while (i < n && !is_tag_whitespace(text[i])) ++i;
    std::string_view chunk = text.substr(start, i - start);

    if (!looks_like_tag(chunk)) {
      sentence.tokens.push_back(TaggedToken{std::string(chunk), std::nullopt});
      continue;
    }
    auto tag = parse_tag(chunk);
    if (!tag) {
      throw TagParseError(TagParseError::Kind::MalformedTag, start,
                          "'" + std::string(chunk) + "' does not match <(M|F|A)N>");
    }
    if (sentence.tokens.empty()) {
      throw TagParseError(TagParseError::Kind::TagAtSentenceStart, start,
                          "'" + std::string(chunk) + "' has no preceding token");
    }
    auto& target = sentence.tokens.back();
    if (target.tag) {
      throw TagParseError(TagParseError::Kind::DoubleTag, start,
                          "'" + std::string(chunk) + "' follows " +
                              format_tag(*target.tag) + " on token '" +
                              target.surface + "'");
    }
    target.tag = *tag;
  }
  return sentence;
}

std::string serialize_tagged(const TaggedSentence& sentence) {
  std::string out;
  for (const auto& token : sentence.tokens) {
    if (!out.empty()) out += ' ';
    out += token.surface;
    if (token.tag) {
      out += ' ';
      out += format_tag(*token.tag);
    }
  }
  return out;
}

EntityMap entity_map(const TaggedSentence& sentence) {
  EntityMap map;
  for (std::size_t pos = 0; pos < sentence.tokens.size(); ++pos) {
    const auto& tag = sentence.tokens[pos].tag;
    if (tag) map[tag->entity].push_back(Mention{pos, tag->gender});
  }
  return map;
}

}  // namespace conga
