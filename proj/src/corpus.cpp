#include "conga/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace conga {

namespace {

using ordered_json = nlohmann::ordered_json;

class IssueCollector {
 public:
  void add(LoadIssue issue) {
    if (issues_.size() >= kMaxLoadIssues) {
      truncated_ = true;
      return;
    }
    issues_.push_back(std::move(issue));
  }
  bool full() const { return issues_.size() >= kMaxLoadIssues; }
  bool empty() const { return issues_.empty(); }
  [[noreturn]] void raise() { throw CorpusLoadError(std::move(issues_), truncated_); }
  void mark_truncated() { truncated_ = true; }

 private:
  std::vector<LoadIssue> issues_;
  bool truncated_ = false;
};

LoadIssue schema_issue(std::size_t line, std::string field, std::string detail) {
  return LoadIssue{LoadIssue::Kind::SchemaError, line, std::move(field), std::nullopt,
                   std::move(detail)};
}

// Parses one tagged text field, recording a TagParseError issue on failure.
std::optional<TaggedSentence> parse_field(std::string_view text, std::size_t line,
                                          const std::string& field,
                                          IssueCollector& issues) {
  try {
    return parse_tagged(text);
  } catch (const TagParseError& e) {
    issues.add(LoadIssue{LoadIssue::Kind::TagParseError, line, field, e.offset(),
                         std::string(to_string(e.kind())) + ": " + e.detail()});
    return std::nullopt;
  }
}

std::optional<CorpusRecord> parse_jsonl_line(std::string_view text, std::size_t line,
                                             IssueCollector& issues) {
  // nlohmann keeps one value per key silently; track keys per object depth so
  // duplicates surface as schema errors.
  std::vector<std::set<std::string>> open_objects;
  std::string duplicate_key;
  auto callback = [&](int /*depth*/, nlohmann::json::parse_event_t event,
                      ordered_json& parsed) {
    using E = nlohmann::json::parse_event_t;
    if (event == E::object_start) {
      open_objects.emplace_back();
    } else if (event == E::object_end) {
      if (!open_objects.empty()) open_objects.pop_back();
    } else if (event == E::key && !open_objects.empty()) {
      const auto& key = parsed.get_ref<const std::string&>();
      if (!open_objects.back().insert(key).second && duplicate_key.empty()) {
        duplicate_key = key;
      }
    }
    return true;
  };

  ordered_json j;
  try {
    j = ordered_json::parse(text.begin(), text.end(), callback);
  } catch (const nlohmann::json::exception& e) {
    issues.add(schema_issue(line, "", std::string("invalid JSON: ") + e.what()));
    return std::nullopt;
  }
  if (!duplicate_key.empty()) {
    issues.add(schema_issue(line, duplicate_key, "duplicate key '" + duplicate_key + "'"));
    return std::nullopt;
  }
  if (!j.is_object()) {
    issues.add(schema_issue(line, "", "record must be a JSON object"));
    return std::nullopt;
  }

  bool ok = true;
  for (const auto& [key, _] : j.items()) {
    if (key != "id" && key != "source" && key != "targets") {
      issues.add(schema_issue(line, key, "unknown key '" + key + "'"));
      ok = false;
    }
  }

  CorpusRecord record;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
    issues.add(schema_issue(line, "id", "'id' must be a non-empty string"));
    ok = false;
  } else {
    record.id = id->get<std::string>();
  }

  auto source = j.find("source");
  if (source == j.end() || !source->is_string()) {
    issues.add(schema_issue(line, "source", "'source' must be a string"));
    ok = false;
  } else if (auto s = parse_field(source->get_ref<const std::string&>(), line, "source",
                                  issues)) {
    record.source = std::move(*s);
  } else {
    ok = false;
  }

  auto targets = j.find("targets");
  if (targets != j.end()) {
    if (!targets->is_object()) {
      issues.add(schema_issue(line, "targets", "'targets' must be an object"));
      ok = false;
    } else {
      for (const auto& [name, value] : targets->items()) {
        const std::string field = "targets." + name;
        if (name.empty()) {
          issues.add(schema_issue(line, field, "system name must be non-empty"));
          ok = false;
          continue;
        }
        if (!value.is_string()) {
          issues.add(schema_issue(line, field, "target text must be a string"));
          ok = false;
          continue;
        }
        if (auto t = parse_field(value.get_ref<const std::string&>(), line, field, issues)) {
          record.targets.emplace_back(name, std::move(*t));
        } else {
          ok = false;
        }
      }
    }
  }
  if (!ok) return std::nullopt;
  return record;
}

std::optional<CorpusRecord> parse_tsv_line(std::string_view text, std::size_t line,
                                           IssueCollector& issues) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = text.find('\t', start);
    fields.push_back(text.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (fields.size() != 2 && fields.size() != 3) {
    issues.add(schema_issue(line, "",
                            "expected 2 or 3 tab-separated fields, got " +
                                std::to_string(fields.size())));
    return std::nullopt;
  }
  bool ok = true;
  CorpusRecord record;
  if (fields[0].empty()) {
    issues.add(schema_issue(line, "id", "'id' must be non-empty"));
    ok = false;
  }
  record.id = std::string(fields[0]);
  if (auto s = parse_field(fields[1], line, "source", issues)) {
    record.source = std::move(*s);
  } else {
    ok = false;
  }
  if (fields.size() == 3) {
    const std::string field = "targets." + std::string(kTsvSystemName);
    if (auto t = parse_field(fields[2], line, field, issues)) {
      record.targets.emplace_back(std::string(kTsvSystemName), std::move(*t));
    } else {
      ok = false;
    }
  }
  if (!ok) return std::nullopt;
  return record;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return is_tag_whitespace(c); });
}

}  // namespace

const TaggedSentence* CorpusRecord::target(std::string_view system) const noexcept {
  for (const auto& [name, sentence] : targets) {
    if (name == system) return &sentence;
  }
  return nullptr;
}

std::string Side::label() const {
  return system ? "target:" + *system : std::string("source");
}

Corpus::Corpus(std::vector<CorpusRecord> records) : records_(std::move(records)) {
  std::set<std::string_view> ids;
  std::set<std::string_view> seen_systems;
  for (const auto& r : records_) {
    if (r.id.empty()) throw CorpusError("record with empty id");
    if (!ids.insert(r.id).second) throw CorpusError("duplicate record id '" + r.id + "'");
    std::set<std::string_view> names;
    for (const auto& [name, _] : r.targets) {
      if (name.empty()) throw CorpusError("record '" + r.id + "' has an empty system name");
      if (!names.insert(name).second) {
        throw CorpusError("record '" + r.id + "' repeats system '" + name + "'");
      }
      if (seen_systems.insert(name).second) systems_.push_back(name);
    }
  }
}

bool Corpus::has_system(std::string_view name) const noexcept {
  return std::find(systems_.begin(), systems_.end(), name) != systems_.end();
}

const CorpusRecord* Corpus::find(std::string_view id) const noexcept {
  for (const auto& r : records_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const char* to_string(CorpusFormat f) noexcept {
  return f == CorpusFormat::Tsv ? "tsv" : "jsonl";
}

std::optional<CorpusFormat> corpus_format_from_string(std::string_view s) noexcept {
  if (s == "jsonl") return CorpusFormat::Jsonl;
  if (s == "tsv") return CorpusFormat::Tsv;
  return std::nullopt;
}

CorpusFormat corpus_format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".tsv" ? CorpusFormat::Tsv : CorpusFormat::Jsonl;
}

const char* to_string(LoadIssue::Kind kind) noexcept {
  switch (kind) {
    case LoadIssue::Kind::DuplicateId:
      return "DuplicateId";
    case LoadIssue::Kind::TagParseError:
      return "TagParseError";
    case LoadIssue::Kind::SchemaError:
      return "SchemaError";
  }
  return "Unknown";
}

std::string LoadIssue::describe() const {
  std::string out = "line " + std::to_string(line) + ": " + to_string(kind);
  if (!field.empty()) out += " [" + field + "]";
  if (offset) out += " at byte " + std::to_string(*offset);
  out += ": " + detail;
  return out;
}

namespace {
std::string summarize(const std::vector<LoadIssue>& issues, bool truncated) {
  std::string out = "corpus failed to load with " + std::to_string(issues.size()) +
                    (truncated ? "+" : "") + " issue(s)";
  if (!issues.empty()) out += "; first: " + issues.front().describe();
  return out;
}
}  // namespace

CorpusLoadError::CorpusLoadError(std::vector<LoadIssue> issues, bool truncated)
    : Error(summarize(issues, truncated)), issues_(std::move(issues)), truncated_(truncated) {}

Corpus load_corpus(std::istream& in, CorpusFormat format) {
  IssueCollector issues;
  std::vector<CorpusRecord> records;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (issues.full()) {
      issues.mark_truncated();
      break;
    }
    std::string_view text = raw;
    if (line == 1 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (is_blank(text)) continue;
    if (!is_valid_utf8(text)) {
      issues.add(schema_issue(line, "", "line is not valid UTF-8"));
      continue;
    }
    auto record = format == CorpusFormat::Jsonl ? parse_jsonl_line(text, line, issues)
                                                : parse_tsv_line(text, line, issues);
    if (!record) continue;
    auto [it, inserted] = first_line.emplace(record->id, line);
    if (!inserted) {
      issues.add(LoadIssue{LoadIssue::Kind::DuplicateId, line, "id", std::nullopt,
                           "id '" + record->id + "' already used on line " +
                               std::to_string(it->second)});
      continue;
    }
    records.push_back(std::move(*record));
  }
  if (!issues.empty()) issues.raise();
  return Corpus(std::move(records));
}

Corpus load_corpus_string(std::string_view bytes, CorpusFormat format) {
  std::istringstream in{std::string(bytes)};
  return load_corpus(in, format);
}

Corpus load_corpus_file(const std::filesystem::path& path,
                        std::optional<CorpusFormat> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open corpus");
  return load_corpus(in, format.value_or(corpus_format_for_path(path)));
}

std::string save_corpus(const Corpus& corpus, CorpusFormat format) {
  std::string out;
  for (const auto& r : corpus.records()) {
    if (format == CorpusFormat::Jsonl) {
      ordered_json j;
      j["id"] = r.id;
      j["source"] = serialize_tagged(r.source);
      j["targets"] = ordered_json::object();
      for (const auto& [name, sentence] : r.targets) {
        j["targets"][name] = serialize_tagged(sentence);
      }
      out += j.dump();
      out += '\n';
      continue;
    }
    if (r.id.find_first_of("\t\r\n") != std::string::npos) {
      throw CorpusSerializationError("record '" + r.id +
                                     "': TSV cannot encode tabs or newlines in ids");
    }
    if (r.targets.size() > 1) {
      throw CorpusSerializationError("record '" + r.id +
                                     "': TSV holds at most one system");
    }
    if (r.targets.size() == 1 && r.targets.front().first != kTsvSystemName) {
      throw CorpusSerializationError("record '" + r.id + "': TSV system must be named '" +
                                     std::string(kTsvSystemName) + "', got '" +
                                     r.targets.front().first + "'");
    }
    out += r.id;
    out += '\t';
    out += serialize_tagged(r.source);
    if (!r.targets.empty()) {
      out += '\t';
      out += serialize_tagged(r.targets.front().second);
    }
    out += '\n';
  }
  return out;
}

bool is_valid_utf8(std::string_view bytes) noexcept {
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates, out of range.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

}  // namespace conga
