#pragma once

// Bilingual corpora: one tagged source sentence per record plus any number of
// tagged system outputs, keyed by system name.
//
// On-disk formats:
//   jsonl  {"id": str, "source": str, "targets": {name: str, ...}}  (canonical)
//   tsv    id<TAB>source<TAB>target, single system named "default"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conga/error.hpp"
#include "conga/tagged_text.hpp"

namespace conga {

inline constexpr std::string_view kTsvSystemName = "default";

using TargetMap = std::vector<std::pair<std::string, TaggedSentence>>;

struct CorpusRecord {
  std::string id;
  TaggedSentence source;
  TargetMap targets;  // insertion order, unique keys

  // nullptr when the record carries no output for `system`.
  const TaggedSentence* target(std::string_view system) const noexcept;

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

// Which half of a record a statistic or diagnostic refers to.
struct Side {
  std::optional<std::string> system;  // nullopt: source side

  static Side source() { return Side{}; }
  static Side target(std::string name) { return Side{std::move(name)}; }
  bool is_source() const noexcept { return !system.has_value(); }
  std::string label() const;  // "source" or "target:<name>"

  friend bool operator==(const Side&, const Side&) = default;
};

class CorpusError : public Error {
 public:
  using Error::Error;
};

class Corpus {
 public:
  Corpus() = default;
  // Throws CorpusError on empty or duplicate ids and empty or duplicate
  // system names within a record.
  explicit Corpus(std::vector<CorpusRecord> records);

  const std::vector<CorpusRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  // Union of all target keys, in order of first appearance.
  const std::vector<std::string>& systems() const noexcept { return systems_; }
  bool has_system(std::string_view name) const noexcept;

  const CorpusRecord* find(std::string_view id) const noexcept;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.records_ == b.records_;
  }

 private:
  std::vector<CorpusRecord> records_;
  std::vector<std::string> systems_;
};

enum class CorpusFormat { Jsonl, Tsv };

const char* to_string(CorpusFormat f) noexcept;
std::optional<CorpusFormat> corpus_format_from_string(std::string_view s) noexcept;
// ".tsv" selects TSV; everything else is read as JSONL.
CorpusFormat corpus_format_for_path(const std::filesystem::path& path);

struct LoadIssue {
  enum class Kind { DuplicateId, TagParseError, SchemaError };

  Kind kind = Kind::SchemaError;
  std::size_t line = 0;               // 1-based
  std::string field;                  // "id", "source", "targets.<name>", ...
  std::optional<std::size_t> offset;  // byte offset inside `field`
  std::string detail;

  std::string describe() const;
};

const char* to_string(LoadIssue::Kind kind) noexcept;

// Loading is all-or-nothing. The whole input is scanned and every issue is
// collected, stopping early once kMaxLoadIssues have been seen.
class CorpusLoadError : public Error {
 public:
  CorpusLoadError(std::vector<LoadIssue> issues, bool truncated);

  const std::vector<LoadIssue>& issues() const noexcept { return issues_; }
  // The scan stopped at the cap; later lines were not inspected.
  bool truncated() const noexcept { return truncated_; }

 private:
  std::vector<LoadIssue> issues_;
  bool truncated_;
};

inline constexpr std::size_t kMaxLoadIssues = 100;

Corpus load_corpus(std::istream& in, CorpusFormat format);
Corpus load_corpus_string(std::string_view bytes, CorpusFormat format);
// Format defaults to corpus_format_for_path(path).
Corpus load_corpus_file(const std::filesystem::path& path,
                        std::optional<CorpusFormat> format = std::nullopt);

class CorpusSerializationError : public Error {
 public:
  using Error::Error;
};

// LF line endings. JSONL keys are emitted as id, source, targets.
// TSV throws CorpusSerializationError for anything it cannot encode: more
// than one system, a system not named "default", or tabs/newlines in ids.
std::string save_corpus(const Corpus& corpus, CorpusFormat format);

bool is_valid_utf8(std::string_view bytes) noexcept;

}  // namespace conga
