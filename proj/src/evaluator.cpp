#include "conga/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace conga {

const char* to_string(Category c) noexcept {
  switch (c) {
    case Category::Match:
      return "match";
    case Category::Error:
      return "error";
    case Category::Bias:
      return "bias";
    case Category::UnmatchedSource:
      return "unmatched_source";
    case Category::UnmatchedTarget:
      return "unmatched_target";
  }
  return "unknown";
}

std::optional<Category> category_from_string(std::string_view s) noexcept {
  for (auto c : {Category::Match, Category::Error, Category::Bias, Category::UnmatchedSource,
                 Category::UnmatchedTarget}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

Outcome Outcome::match(std::string record, std::string system, EntityIndex entity,
                       std::size_t position, Gender g) {
  return Outcome{Category::Match, std::move(record), std::move(system), entity, position, g, g};
}

Outcome Outcome::error(std::string record, std::string system, EntityIndex entity,
                       std::size_t position, Gender source, Gender target) {
  return Outcome{Category::Error, std::move(record), std::move(system), entity, position,
                 source, target};
}

Outcome Outcome::bias(std::string record, std::string system, EntityIndex entity,
                      std::size_t position, Gender target) {
  return Outcome{Category::Bias,    std::move(record), std::move(system), entity,
                 position,          Gender::Ambiguous, target};
}

Outcome Outcome::unmatched_source(std::string record, std::string system, EntityIndex entity,
                                  Gender source) {
  return Outcome{Category::UnmatchedSource, std::move(record), std::move(system), entity,
                 std::nullopt,              source,            std::nullopt};
}

Outcome Outcome::unmatched_target(std::string record, std::string system, EntityIndex entity,
                                  std::size_t position, Gender target) {
  return Outcome{Category::UnmatchedTarget, std::move(record), std::move(system), entity,
                 position,                  std::nullopt,      target};
}

namespace {
std::string describe(EvaluationError::Kind kind, const std::string& record_id,
                     const std::string& detail) {
  return std::string(kind == EvaluationError::Kind::UnknownSystem ? "UnknownSystem"
                                                                  : "PreconditionViolated") +
         " in record '" + record_id + "': " + detail;
}
}  // namespace

EvaluationError::EvaluationError(Kind kind, std::string record_id, const std::string& detail)
    : Error(describe(kind, record_id, detail)), kind_(kind), record_id_(std::move(record_id)) {}

std::vector<Outcome> classify_record(const CorpusRecord& record, std::string_view system) {
  const TaggedSentence* target = record.target(system);
  if (!target) {
    throw EvaluationError(EvaluationError::Kind::UnknownSystem, record.id,
                          "no output for system '" + std::string(system) + "'");
  }

  std::map<EntityIndex, Gender> source;
  for (const auto& token : record.source.tokens) {
    if (!token.tag) continue;
    auto [it, inserted] = source.emplace(token.tag->entity, token.tag->gender);
    if (!inserted && it->second != token.tag->gender) {
      throw EvaluationError(EvaluationError::Kind::PreconditionViolated, record.id,
                            "source entity " + std::to_string(token.tag->entity) +
                                " is tagged with conflicting genders");
    }
  }

  const std::string sys(system);
  std::vector<Outcome> out;
  std::map<EntityIndex, bool> realised;
  for (std::size_t pos = 0; pos < target->tokens.size(); ++pos) {
    const auto& tag = target->tokens[pos].tag;
    if (!tag) continue;
    const Gender g = tag->gender;
    if (g == Gender::Ambiguous) {
      throw EvaluationError(EvaluationError::Kind::PreconditionViolated, record.id,
                            format_tag(*tag) + " on target token " + std::to_string(pos) +
                                " of system '" + sys + "'; targets carry only <M> and <F>");
    }
    auto it = source.find(tag->entity);
    if (it == source.end()) {
      out.push_back(Outcome::unmatched_target(record.id, sys, tag->entity, pos, g));
      continue;
    }
    realised[tag->entity] = true;
    const Gender s = it->second;
    if (s == Gender::Ambiguous) {
      out.push_back(Outcome::bias(record.id, sys, tag->entity, pos, g));
    } else if (s == g) {
      out.push_back(Outcome::match(record.id, sys, tag->entity, pos, g));
    } else {
      out.push_back(Outcome::error(record.id, sys, tag->entity, pos, s, g));
    }
  }
  for (const auto& [index, gender] : source) {
    if (!realised.contains(index)) {
      out.push_back(Outcome::unmatched_source(record.id, sys, index, gender));
    }
  }
  return out;
}

std::vector<Outcome> classify_corpus(const Corpus& corpus, std::string_view system,
                                     unsigned workers) {
  const auto& records = corpus.records();
  std::vector<std::vector<Outcome>> per_record(records.size());

  if (workers <= 1 || records.size() < 2) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      per_record[i] = classify_record(records[i], system);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::size_t first_error_index = records.size();
    auto work = [&] {
      for (std::size_t i = next++; i < records.size(); i = next++) {
        try {
          per_record[i] = classify_record(records[i], system);
        } catch (...) {
          // Report the error of the earliest record so failures are
          // schedule-independent too.
          std::lock_guard lock(error_mutex);
          if (i < first_error_index) {
            first_error_index = i;
            first_error = std::current_exception();
          }
        }
      }
    };
    const unsigned n = std::min<std::size_t>(workers, records.size());
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::size_t total = 0;
  for (const auto& v : per_record) total += v.size();
  std::vector<Outcome> out;
  out.reserve(total);
  for (auto& v : per_record) {
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  return out;
}

}  // namespace conga
