#include "conga/validator.hpp"

#include <algorithm>

#include "json.hpp"

namespace conga {

const char* to_string(RuleCode code) noexcept {
  switch (code) {
    case RuleCode::V001:
      return "V001";
    case RuleCode::V002:
      return "V002";
    case RuleCode::V003:
      return "V003";
    case RuleCode::V004:
      return "V004";
    case RuleCode::V005:
      return "V005";
  }
  return "V???";
}

const char* to_string(Severity severity) noexcept {
  return severity == Severity::Error ? "error" : "warning";
}

Severity severity_of(RuleCode code) noexcept {
  return code == RuleCode::V001 || code == RuleCode::V002 ? Severity::Error
                                                         : Severity::Warning;
}

namespace {

Diagnostic make(RuleCode code, const CorpusRecord& r, Side side,
                std::optional<std::size_t> position, std::string message) {
  return Diagnostic{code, severity_of(code), r.id, std::move(side), position,
                    std::move(message)};
}

void sort_side(std::vector<Diagnostic>& diags, std::size_t from) {
  std::stable_sort(diags.begin() + static_cast<std::ptrdiff_t>(from), diags.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     if (a.position.has_value() != b.position.has_value()) {
                       return !a.position.has_value();
                     }
                     if (a.position && *a.position != *b.position) {
                       return *a.position < *b.position;
                     }
                     return a.code < b.code;
                   });
}

void check_source(const CorpusRecord& r, const EntityMap& entities,
                  std::vector<Diagnostic>& out) {
  const std::size_t begin = out.size();
  if (r.source.tag_count() == 0) {
    out.push_back(make(RuleCode::V005, r, Side::source(), std::nullopt,
                       "source sentence has no gender tags"));
  }

  for (const auto& [index, mentions] : entities) {
    const Gender first = mentions.front().gender;
    auto clash = std::find_if(mentions.begin(), mentions.end(),
                              [&](const Mention& m) { return m.gender != first; });
    if (clash != mentions.end()) {
      out.push_back(make(RuleCode::V002, r, Side::source(), clash->position,
                         "source entity " + std::to_string(index) + " tagged " +
                             gender_letter(first) + " and " + gender_letter(clash->gender)));
    }
  }

  if (!entities.empty()) {
    // Keys are sorted, so the range is 1..k iff the largest key equals k.
    const auto k = entities.size();
    if (entities.rbegin()->first != k) {
      std::string present;
      for (const auto& [index, _] : entities) {
        if (!present.empty()) present += ',';
        present += std::to_string(index);
      }
      out.push_back(make(RuleCode::V003, r, Side::source(), std::nullopt,
                         "source entity indices {" + present + "} are not 1.." +
                             std::to_string(k)));
    }
  }
  sort_side(out, begin);
}

void check_target(const CorpusRecord& r, const std::string& system,
                  const TaggedSentence& target, const EntityMap& source_entities,
                  std::vector<Diagnostic>& out) {
  const std::size_t begin = out.size();
  for (std::size_t pos = 0; pos < target.tokens.size(); ++pos) {
    const auto& tag = target.tokens[pos].tag;
    if (!tag) continue;
    if (tag->gender == Gender::Ambiguous) {
      out.push_back(make(RuleCode::V001, r, Side::target(system), pos,
                         format_tag(*tag) + " on target token '" +
                             target.tokens[pos].surface + "'; only <F> and <M> are allowed"));
    }
    if (!source_entities.contains(tag->entity)) {
      out.push_back(make(RuleCode::V004, r, Side::target(system), pos,
                         format_tag(*tag) + " on target token '" +
                             target.tokens[pos].surface + "' has no source entity " +
                             std::to_string(tag->entity)));
    }
  }
  sort_side(out, begin);
}

}  // namespace

std::vector<Diagnostic> validate_record(const CorpusRecord& record) {
  std::vector<Diagnostic> out;
  const auto entities = entity_map(record.source);
  check_source(record, entities, out);
  for (const auto& [system, target] : record.targets) {
    check_target(record, system, target, entities, out);
  }
  return out;
}

std::vector<Diagnostic> validate(const Corpus& corpus) {
  std::vector<Diagnostic> out;
  for (const auto& r : corpus.records()) {
    auto d = validate_record(r);
    out.insert(out.end(), std::make_move_iterator(d.begin()), std::make_move_iterator(d.end()));
  }
  return out;
}

std::size_t count_severity(const std::vector<Diagnostic>& diagnostics, Severity severity) {
  return static_cast<std::size_t>(
      std::count_if(diagnostics.begin(), diagnostics.end(),
                    [&](const Diagnostic& d) { return d.severity == severity; }));
}

std::string diagnostic_to_json(const Diagnostic& d) {
  nlohmann::ordered_json j;
  j["code"] = to_string(d.code);
  j["severity"] = to_string(d.severity);
  j["record_id"] = d.record_id;
  j["side"] = d.side.label();
  j["position"] = d.position ? nlohmann::ordered_json(*d.position) : nlohmann::ordered_json();
  j["message"] = d.message;
  return j.dump();
}

}  // namespace conga
