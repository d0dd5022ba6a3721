#include "conga/metrics.hpp"

namespace conga {

std::int64_t& PerGender::operator[](Gender g) noexcept {
  switch (g) {
    case Gender::Masculine:
      return masculine;
    case Gender::Feminine:
      return feminine;
    case Gender::Ambiguous:
      break;
  }
  return ambiguous;
}

std::int64_t PerGender::operator[](Gender g) const noexcept {
  return const_cast<PerGender&>(*this)[g];
}

PerGender& PerGender::operator+=(const PerGender& o) noexcept {
  masculine += o.masculine;
  feminine += o.feminine;
  ambiguous += o.ambiguous;
  return *this;
}

std::int64_t GenderCounts::total_matches() const noexcept { return matches.total(); }

std::int64_t GenderCounts::total_mismatches() const noexcept {
  return errors_into.total() + biases_into.total();
}

GenderCounts& GenderCounts::operator+=(const GenderCounts& o) noexcept {
  matches += o.matches;
  errors_into += o.errors_into;
  biases_into += o.biases_into;
  unmatched_target += o.unmatched_target;
  target_tags += o.target_tags;
  source_tags += o.source_tags;
  unmatched_source_entities += o.unmatched_source_entities;
  return *this;
}

bool partition_holds(const GenderCounts& c) noexcept {
  for (auto g : {Gender::Masculine, Gender::Feminine, Gender::Ambiguous}) {
    if (c.target_tags[g] !=
        c.matches[g] + c.errors_into[g] + c.biases_into[g] + c.unmatched_target[g]) {
      return false;
    }
  }
  return c.target_tags.ambiguous == 0;
}

GenderCounts aggregate(std::span<const Outcome> outcomes, const PerGender& source_tags) {
  GenderCounts c;
  c.source_tags = source_tags;
  for (const auto& o : outcomes) {
    if (o.category == Category::UnmatchedSource) {
      ++c.unmatched_source_entities;
      continue;
    }
    const Gender g = o.target_gender.value_or(Gender::Ambiguous);
    ++c.target_tags[g];
    switch (o.category) {
      case Category::Match:
        ++c.matches[g];
        break;
      case Category::Error:
        ++c.errors_into[g];
        break;
      case Category::Bias:
        ++c.biases_into[g];
        break;
      case Category::UnmatchedTarget:
        ++c.unmatched_target[g];
        break;
      case Category::UnmatchedSource:
        break;
    }
  }
  return c;
}

Ratio make_ratio(std::int64_t numerator, std::int64_t denominator) noexcept {
  Ratio r;
  r.numerator = numerator;
  r.denominator = denominator;
  if (denominator == 0) {
    r.zero_denominator = true;
    return r;
  }
  r.value = static_cast<double>(numerator) / static_cast<double>(denominator);
  r.over_unity = r.value > 1.0;
  return r;
}

Ratio precision(const GenderCounts& c, Gender g) noexcept {
  return make_ratio(c.matches[g], c.target_tags[g]);
}

Ratio recall(const GenderCounts& c, Gender g) noexcept {
  return make_ratio(c.matches[g], c.source_tags[g]);
}

double f1(double precision, double recall) noexcept {
  const double sum = precision + recall;
  if (sum == 0.0) return 0.0;
  return 2.0 * precision * recall / sum;
}

GenderMetrics gender_metrics(const GenderCounts& c, Gender g) noexcept {
  GenderMetrics m;
  m.precision = precision(c, g);
  m.recall = recall(c, g);
  m.f1 = f1(m.precision.value, m.recall.value);
  return m;
}

std::optional<double> AmbiguityStats::masculine_share() const noexcept {
  if (a_to_m + a_to_f == 0) return std::nullopt;
  return static_cast<double>(a_to_m) / static_cast<double>(a_to_m + a_to_f);
}

std::optional<double> AmbiguityStats::feminine_share() const noexcept {
  if (a_to_m + a_to_f == 0) return std::nullopt;
  return static_cast<double>(a_to_f) / static_cast<double>(a_to_m + a_to_f);
}

AmbiguityStats ambiguity_stats(const GenderCounts& c) noexcept {
  return AmbiguityStats{c.biases_into.masculine, c.biases_into.feminine};
}

PerGender tag_distribution(const Corpus& corpus, const Side& side) {
  PerGender d;
  for (const auto& r : corpus.records()) {
    const TaggedSentence* s = side.is_source() ? &r.source : r.target(*side.system);
    if (!s) continue;
    for (const auto& t : s->tokens) {
      if (t.tag) ++d[t.tag->gender];
    }
  }
  return d;
}

}  // namespace conga
