#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conga/corpus.hpp"
#include "conga/evaluator.hpp"
#include "conga/metrics.hpp"

namespace conga {

// Per-record tallies for one system. Summing a system's rows reproduces its
// GenderCounts exactly.
struct SentenceLogRow {
  std::string record_id;
  std::string system;
  GenderCounts counts;

  friend bool operator==(const SentenceLogRow&, const SentenceLogRow&) = default;
};

struct SystemReport {
  std::string system;
  GenderCounts counts;
  GenderMetrics masculine;
  GenderMetrics feminine;
  AmbiguityStats ambiguity;
  PerGender source_tags;
  PerGender target_tags;

  const GenderMetrics& metrics(Gender g) const;

  friend bool operator==(const SystemReport&, const SystemReport&) = default;
};

struct EvaluationReport {
  std::string toolkit_version;
  std::string input_digest;
  std::vector<SystemReport> systems;
  std::vector<SentenceLogRow> sentences;  // grouped by system, record order within

  const SystemReport* find(std::string_view system) const noexcept;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

struct Evaluation {
  EvaluationReport report;
  std::vector<Outcome> outcomes;  // grouped by system, in the order requested
};

// "sha256:<64 hex digits>"
std::string corpus_digest(std::string_view bytes);

// Classifies `corpus` for each system and assembles the report. An empty
// `input_digest` is replaced by the digest of the corpus' canonical JSONL.
Evaluation evaluate(const Corpus& corpus, std::span<const std::string> systems,
                    std::string input_digest = {}, unsigned workers = 1);

// RFC 4180 with LF line endings. Columns:
// record_id,system,entity_index,token_position,category,source_gender,target_gender
std::string emit_outcome_csv(std::span<const Outcome> outcomes);
std::vector<Outcome> parse_outcome_csv(std::string_view csv);

// One row per (system, record) with every GenderCounts field as a column.
std::string emit_sentence_log_csv(const EvaluationReport& report);

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF.
std::vector<std::vector<std::string>> read_csv(std::string_view csv);
std::string csv_escape(std::string_view field);

enum class SummaryFormat { Json, Table };

std::string emit_summary(const EvaluationReport& report, SummaryFormat format);
EvaluationReport report_from_json(std::string_view json);

struct MetricDelta {
  std::string metric;  // "precision", "recall" or "f1"
  Gender gender = Gender::Masculine;
  double first = 0.0;   // ratios
  double second = 0.0;
  double delta = 0.0;   // first - second, full precision
  // Difference of the two values as printed (percent, 1 decimal place), so
  // the rendered delta agrees with subtracting the printed columns.
  double display_delta_pp = 0.0;

  friend bool operator==(const MetricDelta&, const MetricDelta&) = default;
};

struct SystemComparison {
  std::string first;
  std::string second;
  std::vector<MetricDelta> deltas;  // precision, recall, f1 x (M, F)
};

class ComparisonError : public Error {
 public:
  using Error::Error;
};

// Every pair (i < j) of the report's systems, first minus second. Throws
// ComparisonError (FewerThanTwoSystems) when the report covers fewer than two.
std::vector<SystemComparison> compare_systems(const EvaluationReport& report);
std::string emit_comparison(std::span<const SystemComparison> comparisons,
                            SummaryFormat format);

// Source and per-system target tag counts for a whole corpus.
std::string emit_tag_distribution(const Corpus& corpus, SummaryFormat format);

// Percent with one decimal place: 0.31801 -> "31.8%".
std::string format_percent(double ratio);

void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace conga
