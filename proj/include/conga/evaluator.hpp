#pragma once

// Entity-index alignment between a tagged source and one tagged system
// output, and classification of every target tag and every unrealised
// source entity.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conga/corpus.hpp"

namespace conga {

enum class Category { Match, Error, Bias, UnmatchedSource, UnmatchedTarget };

// CSV spelling: match, error, bias, unmatched_source, unmatched_target.
const char* to_string(Category c) noexcept;
std::optional<Category> category_from_string(std::string_view s) noexcept;

struct Outcome {
  Category category = Category::Match;
  std::string record_id;
  std::string system;
  EntityIndex entity = 1;
  std::optional<std::size_t> position;   // target token; absent for UnmatchedSource
  std::optional<Gender> source_gender;   // absent for UnmatchedTarget
  std::optional<Gender> target_gender;   // absent for UnmatchedSource

  static Outcome match(std::string record, std::string system, EntityIndex entity,
                       std::size_t position, Gender g);
  static Outcome error(std::string record, std::string system, EntityIndex entity,
                       std::size_t position, Gender source, Gender target);
  static Outcome bias(std::string record, std::string system, EntityIndex entity,
                      std::size_t position, Gender target);
  static Outcome unmatched_source(std::string record, std::string system,
                                  EntityIndex entity, Gender source);
  static Outcome unmatched_target(std::string record, std::string system,
                                  EntityIndex entity, std::size_t position, Gender target);

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

class EvaluationError : public Error {
 public:
  enum class Kind { UnknownSystem, PreconditionViolated };

  EvaluationError(Kind kind, std::string record_id, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  const std::string& record_id() const noexcept { return record_id_; }

 private:
  Kind kind_;
  std::string record_id_;
};

// Target-tag outcomes in token order, then one UnmatchedSource outcome per
// source entity that no target tag carries, by ascending index.
// Throws UnknownSystem when the record has no output for `system` and
// PreconditionViolated when a source entity carries two genders or the
// target carries an <A> tag (validator rules V002 and V001).
std::vector<Outcome> classify_record(const CorpusRecord& record, std::string_view system);

// Concatenation of classify_record over all records, in record order. With
// workers > 1 records are classified concurrently; the result is identical.
std::vector<Outcome> classify_corpus(const Corpus& corpus, std::string_view system,
                                     unsigned workers = 1);

}  // namespace conga
