#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "conga/corpus.hpp"
#include "conga/evaluator.hpp"

namespace conga {

// A tally per gender class.
struct PerGender {
  std::int64_t masculine = 0;
  std::int64_t feminine = 0;
  std::int64_t ambiguous = 0;

  std::int64_t& operator[](Gender g) noexcept;
  std::int64_t operator[](Gender g) const noexcept;
  std::int64_t total() const noexcept { return masculine + feminine + ambiguous; }

  PerGender& operator+=(const PerGender& o) noexcept;
  friend PerGender operator+(PerGender a, const PerGender& b) noexcept { return a += b; }
  friend bool operator==(const PerGender&, const PerGender&) = default;
};

// Outcome tallies for one (corpus, system) pair. Target-side fields are
// keyed by the realised gender and never use the ambiguous slot.
//
//   target_tags[g] == matches[g] + errors_into[g] + biases_into[g] + unmatched_target[g]
struct GenderCounts {
  PerGender matches;
  PerGender errors_into;   // explicit source gender s != g realised as g
  PerGender biases_into;   // ambiguous source realised as g
  PerGender unmatched_target;
  PerGender target_tags;
  PerGender source_tags;
  std::int64_t unmatched_source_entities = 0;

  std::int64_t total_matches() const noexcept;
  std::int64_t total_mismatches() const noexcept;  // errors + biases

  GenderCounts& operator+=(const GenderCounts& o) noexcept;
  friend GenderCounts operator+(GenderCounts a, const GenderCounts& b) noexcept {
    return a += b;
  }
  friend bool operator==(const GenderCounts&, const GenderCounts&) = default;
};

bool partition_holds(const GenderCounts& c) noexcept;

// Source tag counts are not recoverable from outcomes, so they are passed in
// (see tag_distribution).
GenderCounts aggregate(std::span<const Outcome> outcomes, const PerGender& source_tags = {});

struct Ratio {
  double value = 0.0;
  std::int64_t numerator = 0;
  std::int64_t denominator = 0;
  bool zero_denominator = false;  // value forced to 0
  bool over_unity = false;        // value > 1, reported unclamped

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

Ratio make_ratio(std::int64_t numerator, std::int64_t denominator) noexcept;

// matches[g] / target_tags[g]
Ratio precision(const GenderCounts& c, Gender g) noexcept;
// matches[g] / source_tags[g]; can exceed 1 when several target tags match
// one source entity.
Ratio recall(const GenderCounts& c, Gender g) noexcept;
// Harmonic mean; 0 when precision + recall == 0.
double f1(double precision, double recall) noexcept;

struct GenderMetrics {
  Ratio precision;
  Ratio recall;
  double f1 = 0.0;

  friend bool operator==(const GenderMetrics&, const GenderMetrics&) = default;
};

GenderMetrics gender_metrics(const GenderCounts& c, Gender g) noexcept;

struct AmbiguityStats {
  std::int64_t a_to_m = 0;
  std::int64_t a_to_f = 0;

  // a_to_m / (a_to_m + a_to_f); nullopt when both are zero.
  std::optional<double> masculine_share() const noexcept;
  std::optional<double> feminine_share() const noexcept;

  friend bool operator==(const AmbiguityStats&, const AmbiguityStats&) = default;
};

AmbiguityStats ambiguity_stats(const GenderCounts& c) noexcept;

// Token-level tag counts for one side of every record. Records without an
// output for the requested system contribute nothing.
PerGender tag_distribution(const Corpus& corpus, const Side& side);

}  // namespace conga
