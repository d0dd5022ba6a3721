#pragma once

// Annotation linter.
//
//   V001 Error    <A> tag on a target side
//   V002 Error    source entity tagged with more than one gender
//   V003 Warning  source entity indices are not exactly 1..k
//   V004 Warning  target tag whose index never occurs in the source
//   V005 Warning  source sentence carries no tags
//
// Mixed genders for one entity on a target side are data, not defects, and
// produce no diagnostic. The proper-name guideline (names get <A> unless
// the referent is a verifiable public figure) cannot be checked mechanically.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conga/corpus.hpp"

namespace conga {

enum class RuleCode { V001, V002, V003, V004, V005 };
enum class Severity { Error, Warning };

const char* to_string(RuleCode code) noexcept;
const char* to_string(Severity severity) noexcept;
Severity severity_of(RuleCode code) noexcept;

struct Diagnostic {
  RuleCode code = RuleCode::V001;
  Severity severity = Severity::Error;
  std::string record_id;
  Side side;
  std::optional<std::size_t> position;  // token index; absent for sentence-level rules
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// Diagnostics ordered by record, then side (source first, then targets in
// record order), then position with sentence-level entries first.
std::vector<Diagnostic> validate_record(const CorpusRecord& record);
std::vector<Diagnostic> validate(const Corpus& corpus);

std::size_t count_severity(const std::vector<Diagnostic>& diagnostics, Severity severity);

// Single-line JSON: {"code","severity","record_id","side","position","message"}.
std::string diagnostic_to_json(const Diagnostic& d);

}  // namespace conga
