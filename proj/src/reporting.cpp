#include "conga/reporting.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "conga/version.hpp"
#include "json.hpp"

namespace conga {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<Gender, 2> kRealised = {Gender::Masculine, Gender::Feminine};

std::string gender_str(Gender g) { return std::string(1, gender_letter(g)); }

std::string opt_gender(const std::optional<Gender>& g) {
  return g ? gender_str(*g) : std::string();
}

}  // namespace

// ---------------------------------------------------------------------------
// Report assembly

const GenderMetrics& SystemReport::metrics(Gender g) const {
  return g == Gender::Feminine ? feminine : masculine;
}

const SystemReport* EvaluationReport::find(std::string_view system) const noexcept {
  for (const auto& s : systems) {
    if (s.system == system) return &s;
  }
  return nullptr;
}

std::string corpus_digest(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

Evaluation evaluate(const Corpus& corpus, std::span<const std::string> systems,
                    std::string input_digest, unsigned workers) {
  Evaluation ev;
  ev.report.toolkit_version = std::string(kVersion);
  ev.report.input_digest = input_digest.empty()
                               ? corpus_digest(save_corpus(corpus, CorpusFormat::Jsonl))
                               : std::move(input_digest);
  const PerGender source_tags = tag_distribution(corpus, Side::source());

  for (const auto& system : systems) {
    auto outcomes = classify_corpus(corpus, system, workers);

    // Outcomes arrive grouped by record in record order.
    const std::span<const Outcome> all(outcomes);
    std::size_t begin = 0;
    GenderCounts total;
    for (const auto& r : corpus.records()) {
      std::size_t end = begin;
      while (end < all.size() && all[end].record_id == r.id) ++end;
      PerGender record_source;
      for (const auto& t : r.source.tokens) {
        if (t.tag) ++record_source[t.tag->gender];
      }
      SentenceLogRow row{r.id, system,
                         aggregate(all.subspan(begin, end - begin), record_source)};
      total += row.counts;
      ev.report.sentences.push_back(std::move(row));
      begin = end;
    }

    SystemReport sr;
    sr.system = system;
    sr.counts = total;
    sr.masculine = gender_metrics(total, Gender::Masculine);
    sr.feminine = gender_metrics(total, Gender::Feminine);
    sr.ambiguity = ambiguity_stats(total);
    sr.source_tags = source_tags;
    sr.target_tags = tag_distribution(corpus, Side::target(system));
    ev.report.systems.push_back(std::move(sr));

    ev.outcomes.insert(ev.outcomes.end(), std::make_move_iterator(outcomes.begin()),
                       std::make_move_iterator(outcomes.end()));
  }
  return ev;
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {
void append_row(std::string& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    first = false;
    out += csv_escape(f);
  }
  out += '\n';
}
}  // namespace

std::vector<std::vector<std::string>> read_csv(std::string_view csv) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (i < csv.size()) {
    const char c = csv[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field += c;
      }
      ++i;
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < csv.size() && csv[i + 1] == '\n') {
      end_row();
      ++i;
    } else if (c == '\n') {
      end_row();
    } else {
      field += c;
      field_started = true;
    }
    ++i;
  }
  if (quoted) throw Error("CSV ends inside a quoted field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

std::string emit_outcome_csv(std::span<const Outcome> outcomes) {
  std::string out =
      "record_id,system,entity_index,token_position,category,source_gender,target_gender\n";
  for (const auto& o : outcomes) {
    append_row(out, {o.record_id, o.system, std::to_string(o.entity),
                     o.position ? std::to_string(*o.position) : std::string(),
                     to_string(o.category), opt_gender(o.source_gender),
                     opt_gender(o.target_gender)});
  }
  return out;
}

std::vector<Outcome> parse_outcome_csv(std::string_view csv) {
  auto rows = read_csv(csv);
  if (rows.empty()) throw Error("outcome CSV has no header");
  std::vector<Outcome> out;
  auto gender = [](const std::string& s) -> std::optional<Gender> {
    if (s.empty()) return std::nullopt;
    if (s.size() != 1 || !gender_from_letter(s[0])) throw Error("bad gender cell '" + s + "'");
    return gender_from_letter(s[0]);
  };
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 7) throw Error("outcome CSV row " + std::to_string(i) + " has " +
                                   std::to_string(r.size()) + " fields");
    auto category = category_from_string(r[4]);
    if (!category) throw Error("unknown category '" + r[4] + "'");
    Outcome o;
    o.category = *category;
    o.record_id = r[0];
    o.system = r[1];
    o.entity = static_cast<EntityIndex>(std::stoul(r[2]));
    if (!r[3].empty()) o.position = std::stoul(r[3]);
    o.source_gender = gender(r[5]);
    o.target_gender = gender(r[6]);
    out.push_back(std::move(o));
  }
  return out;
}

std::string emit_sentence_log_csv(const EvaluationReport& report) {
  std::string out =
      "record_id,system,source_m,source_f,source_a,target_m,target_f,match_m,match_f,"
      "error_f_to_m,error_m_to_f,bias_a_to_m,bias_a_to_f,unmatched_target_m,"
      "unmatched_target_f,unmatched_source\n";
  for (const auto& row : report.sentences) {
    const auto& c = row.counts;
    auto n = [](std::int64_t v) { return std::to_string(v); };
    append_row(out, {row.record_id, row.system, n(c.source_tags.masculine),
                     n(c.source_tags.feminine), n(c.source_tags.ambiguous),
                     n(c.target_tags.masculine), n(c.target_tags.feminine),
                     n(c.matches.masculine), n(c.matches.feminine), n(c.errors_into.masculine),
                     n(c.errors_into.feminine), n(c.biases_into.masculine),
                     n(c.biases_into.feminine), n(c.unmatched_target.masculine),
                     n(c.unmatched_target.feminine), n(c.unmatched_source_entities)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Summary rendering

std::string format_percent(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", ratio * 100.0);
  return buf;
}

namespace {

std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

// Left-aligned label column, right-aligned value columns, two-space gutter.
class TextTable {
 public:
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::string render() const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      if (width.size() < r.size()) width.resize(r.size(), 0);
      for (std::size_t i = 0; i < r.size(); ++i) {
        width[i] = std::max(width[i], display_width(r[i]));
      }
    }
    std::string out;
    for (const auto& r : rows_) {
      std::string line;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const std::string pad(width[i] - display_width(r[i]), ' ');
        if (i > 0) line += "  ";
        line += i == 0 ? r[i] + pad : pad + r[i];
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + '\n';
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::vector<std::string> flags_of(const GenderMetrics& m) {
  std::vector<std::string> f;
  if (m.precision.zero_denominator) f.emplace_back("precision_zero_denominator");
  if (m.precision.over_unity) f.emplace_back("precision_over_unity");
  if (m.recall.zero_denominator) f.emplace_back("recall_zero_denominator");
  if (m.recall.over_unity) f.emplace_back("recall_over_unity");
  return f;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

ordered_json per_gender_json(const PerGender& p) {
  ordered_json j;
  j["M"] = p.masculine;
  j["F"] = p.feminine;
  j["A"] = p.ambiguous;
  return j;
}

PerGender per_gender_from(const ordered_json& j) {
  return PerGender{j.at("M").get<std::int64_t>(), j.at("F").get<std::int64_t>(),
                   j.at("A").get<std::int64_t>()};
}

ordered_json counts_json(const GenderCounts& c) {
  ordered_json j;
  j["matches"] = per_gender_json(c.matches);
  j["errors_into"] = per_gender_json(c.errors_into);
  j["biases_into"] = per_gender_json(c.biases_into);
  j["unmatched_target"] = per_gender_json(c.unmatched_target);
  j["target_tags"] = per_gender_json(c.target_tags);
  j["source_tags"] = per_gender_json(c.source_tags);
  j["unmatched_source_entities"] = c.unmatched_source_entities;
  return j;
}

GenderCounts counts_from(const ordered_json& j) {
  GenderCounts c;
  c.matches = per_gender_from(j.at("matches"));
  c.errors_into = per_gender_from(j.at("errors_into"));
  c.biases_into = per_gender_from(j.at("biases_into"));
  c.unmatched_target = per_gender_from(j.at("unmatched_target"));
  c.target_tags = per_gender_from(j.at("target_tags"));
  c.source_tags = per_gender_from(j.at("source_tags"));
  c.unmatched_source_entities = j.at("unmatched_source_entities").get<std::int64_t>();
  return c;
}

ordered_json metrics_json(const std::string& system, Gender g, const GenderMetrics& m) {
  ordered_json j;
  j["system"] = system;
  j["gender"] = gender_str(g);
  j["precision"] = m.precision.value;
  j["recall"] = m.recall.value;
  j["f1"] = m.f1;
  j["flags"] = flags_of(m);
  return j;
}

Ratio ratio_from(double value, std::int64_t num, std::int64_t den, bool zero, bool over) {
  Ratio r;
  r.value = value;
  r.numerator = num;
  r.denominator = den;
  r.zero_denominator = zero;
  r.over_unity = over;
  return r;
}

GenderMetrics metrics_from(const ordered_json& j, const GenderCounts& c, Gender g) {
  const auto flags = j.at("flags").get<std::vector<std::string>>();
  auto has = [&](const char* f) { return std::find(flags.begin(), flags.end(), f) != flags.end(); };
  GenderMetrics m;
  m.precision = ratio_from(j.at("precision").get<double>(), c.matches[g], c.target_tags[g],
                           has("precision_zero_denominator"), has("precision_over_unity"));
  m.recall = ratio_from(j.at("recall").get<double>(), c.matches[g], c.source_tags[g],
                        has("recall_zero_denominator"), has("recall_over_unity"));
  m.f1 = j.at("f1").get<double>();
  return m;
}

std::string summary_json(const EvaluationReport& report) {
  ordered_json j;
  j["toolkit_version"] = report.toolkit_version;
  j["input_digest"] = report.input_digest;
  j["systems"] = ordered_json::array();
  for (const auto& s : report.systems) {
    ordered_json sj;
    sj["system"] = s.system;
    sj["counts"] = counts_json(s.counts);
    sj["metrics"] = ordered_json::array();
    for (auto g : kRealised) sj["metrics"].push_back(metrics_json(s.system, g, s.metrics(g)));
    ordered_json amb;
    amb["a_to_m"] = s.ambiguity.a_to_m;
    amb["a_to_f"] = s.ambiguity.a_to_f;
    auto share = s.ambiguity.masculine_share();
    amb["masculine_share"] = share ? ordered_json(*share) : ordered_json();
    sj["ambiguity"] = amb;
    sj["tag_distribution"]["source"] = per_gender_json(s.source_tags);
    sj["tag_distribution"]["target"] = per_gender_json(s.target_tags);
    j["systems"].push_back(std::move(sj));
  }
  j["sentences"] = ordered_json::array();
  for (const auto& row : report.sentences) {
    ordered_json rj;
    rj["record_id"] = row.record_id;
    rj["system"] = row.system;
    rj["counts"] = counts_json(row.counts);
    j["sentences"].push_back(std::move(rj));
  }
  return j.dump(2) + '\n';
}

std::string summary_table(const EvaluationReport& report) {
  std::string out = "# conga " + report.toolkit_version + "  input " + report.input_digest + "\n";

  auto header = [&](std::string first) {
    std::vector<std::string> h{std::move(first)};
    for (const auto& s : report.systems) h.push_back(s.system);
    return h;
  };
  auto counts_row = [&](std::string label, auto pick) {
    std::vector<std::string> r{std::move(label)};
    for (const auto& s : report.systems) r.push_back(std::to_string(pick(s)));
    return r;
  };

  {
    out += "\nTag distribution\n";
    TextTable t;
    auto h = header("Gender tags");
    h.insert(h.begin() + 1, "EN");
    t.row(h);
    const PerGender src = report.systems.empty() ? PerGender{} : report.systems.front().source_tags;
    for (auto g : {Gender::Masculine, Gender::Feminine, Gender::Ambiguous}) {
      auto r = counts_row(gender_str(g), [&](const SystemReport& s) { return s.target_tags[g]; });
      r.insert(r.begin() + 1, std::to_string(src[g]));
      t.row(r);
    }
    auto r = counts_row("Total tags", [](const SystemReport& s) { return s.target_tags.total(); });
    r.insert(r.begin() + 1, std::to_string(src.total()));
    t.row(r);
    out += t.render();
  }

  {
    out += "\nMatch and mismatch categories\n";
    TextTable t;
    t.row(header("Category"));
    using S = const SystemReport&;
    t.row(counts_row("Match M", [](S s) { return s.counts.matches.masculine; }));
    t.row(counts_row("Match F", [](S s) { return s.counts.matches.feminine; }));
    t.row(counts_row("Total matches", [](S s) { return s.counts.total_matches(); }));
    t.row(counts_row("Bias A→M", [](S s) { return s.counts.biases_into.masculine; }));
    t.row(counts_row("Bias A→F", [](S s) { return s.counts.biases_into.feminine; }));
    t.row(counts_row("Error M→F", [](S s) { return s.counts.errors_into.feminine; }));
    t.row(counts_row("Error F→M", [](S s) { return s.counts.errors_into.masculine; }));
    t.row(counts_row("Total mismatches", [](S s) { return s.counts.total_mismatches(); }));
    t.row(counts_row("Unmatched target M", [](S s) { return s.counts.unmatched_target.masculine; }));
    t.row(counts_row("Unmatched target F", [](S s) { return s.counts.unmatched_target.feminine; }));
    t.row(counts_row("Unmatched source entities",
                     [](S s) { return s.counts.unmatched_source_entities; }));
    out += t.render();
  }

  {
    out += "\nPrecision, recall and F1\n";
    TextTable t;
    t.row({"Gender", "System", "Match", "Target tags", "Source tags", "Precision", "Recall",
           "F1", "Flags"});
    for (auto g : kRealised) {
      for (const auto& s : report.systems) {
        const auto& m = s.metrics(g);
        auto flags = flags_of(m);
        t.row({gender_str(g), s.system, std::to_string(s.counts.matches[g]),
               std::to_string(s.counts.target_tags[g]), std::to_string(s.counts.source_tags[g]),
               format_percent(m.precision.value), format_percent(m.recall.value),
               format_percent(m.f1), flags.empty() ? "-" : join(flags, ",")});
      }
    }
    out += t.render();
  }

  {
    out += "\nAmbiguity resolution\n";
    TextTable t;
    t.row({"System", "A→M", "A→F", "Masculine share"});
    for (const auto& s : report.systems) {
      auto share = s.ambiguity.masculine_share();
      t.row({s.system, std::to_string(s.ambiguity.a_to_m), std::to_string(s.ambiguity.a_to_f),
             share ? format_percent(*share) : "n/a"});
    }
    out += t.render();
  }
  return out;
}

}  // namespace

std::string emit_summary(const EvaluationReport& report, SummaryFormat format) {
  return format == SummaryFormat::Json ? summary_json(report) : summary_table(report);
}

EvaluationReport report_from_json(std::string_view json) {
  EvaluationReport report;
  try {
    const auto j = ordered_json::parse(json);
    report.toolkit_version = j.at("toolkit_version").get<std::string>();
    report.input_digest = j.at("input_digest").get<std::string>();
    for (const auto& sj : j.at("systems")) {
      SystemReport s;
      s.system = sj.at("system").get<std::string>();
      s.counts = counts_from(sj.at("counts"));
      for (const auto& mj : sj.at("metrics")) {
        const auto g = mj.at("gender").get<std::string>();
        if (g == "M") {
          s.masculine = metrics_from(mj, s.counts, Gender::Masculine);
        } else if (g == "F") {
          s.feminine = metrics_from(mj, s.counts, Gender::Feminine);
        } else {
          throw Error("metrics entry with gender '" + g + "'");
        }
      }
      s.ambiguity.a_to_m = sj.at("ambiguity").at("a_to_m").get<std::int64_t>();
      s.ambiguity.a_to_f = sj.at("ambiguity").at("a_to_f").get<std::int64_t>();
      s.source_tags = per_gender_from(sj.at("tag_distribution").at("source"));
      s.target_tags = per_gender_from(sj.at("tag_distribution").at("target"));
      report.systems.push_back(std::move(s));
    }
    for (const auto& rj : j.at("sentences")) {
      report.sentences.push_back(SentenceLogRow{rj.at("record_id").get<std::string>(),
                                                rj.at("system").get<std::string>(),
                                                counts_from(rj.at("counts"))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed summary JSON: ") + e.what());
  }
  return report;
}

std::string emit_tag_distribution(const Corpus& corpus, SummaryFormat format) {
  const PerGender src = tag_distribution(corpus, Side::source());
  std::vector<PerGender> targets;
  for (const auto& s : corpus.systems()) targets.push_back(tag_distribution(corpus, Side::target(s)));

  if (format == SummaryFormat::Json) {
    ordered_json j;
    j["records"] = corpus.size();
    j["source"] = per_gender_json(src);
    j["source"]["total"] = src.total();
    j["targets"] = ordered_json::object();
    for (std::size_t i = 0; i < targets.size(); ++i) {
      auto& tj = j["targets"][corpus.systems()[i]];
      tj = per_gender_json(targets[i]);
      tj["total"] = targets[i].total();
    }
    return j.dump(2) + '\n';
  }

  TextTable t;
  std::vector<std::string> h{"Gender tags", "EN"};
  h.insert(h.end(), corpus.systems().begin(), corpus.systems().end());
  t.row(h);
  auto add = [&](std::string label, auto pick) {
    std::vector<std::string> r{std::move(label), std::to_string(pick(src))};
    for (const auto& d : targets) r.push_back(std::to_string(pick(d)));
    t.row(r);
  };
  for (auto g : {Gender::Masculine, Gender::Feminine, Gender::Ambiguous}) {
    add(gender_str(g), [g](const PerGender& d) { return d[g]; });
  }
  add("Total tags", [](const PerGender& d) { return d.total(); });
  return t.render();
}

// ---------------------------------------------------------------------------
// System comparison

namespace {
double printed_percent(double ratio) { return std::round(ratio * 1000.0) / 10.0; }

std::string signed_pp(double pp) {
  char buf[32];
  // Avoid "-0.0pp" for differences that print as zero.
  if (std::abs(pp) < 0.05) pp = 0.0;
  std::snprintf(buf, sizeof buf, "%+.1fpp", pp);
  return buf;
}
}  // namespace

std::vector<SystemComparison> compare_systems(const EvaluationReport& report) {
  if (report.systems.size() < 2) {
    throw ComparisonError("FewerThanTwoSystems: report covers " +
                          std::to_string(report.systems.size()) + " system(s)");
  }
  std::vector<SystemComparison> out;
  for (std::size_t i = 0; i < report.systems.size(); ++i) {
    for (std::size_t k = i + 1; k < report.systems.size(); ++k) {
      const auto& a = report.systems[i];
      const auto& b = report.systems[k];
      SystemComparison cmp{a.system, b.system, {}};
      auto add = [&](const char* metric, Gender g, double x, double y) {
        cmp.deltas.push_back(
            MetricDelta{metric, g, x, y, x - y, printed_percent(x) - printed_percent(y)});
      };
      for (auto g : kRealised) {
        add("precision", g, a.metrics(g).precision.value, b.metrics(g).precision.value);
        add("recall", g, a.metrics(g).recall.value, b.metrics(g).recall.value);
        add("f1", g, a.metrics(g).f1, b.metrics(g).f1);
      }
      out.push_back(std::move(cmp));
    }
  }
  return out;
}

std::string emit_comparison(std::span<const SystemComparison> comparisons,
                            SummaryFormat format) {
  if (format == SummaryFormat::Json) {
    ordered_json j = ordered_json::array();
    for (const auto& c : comparisons) {
      ordered_json cj;
      cj["first"] = c.first;
      cj["second"] = c.second;
      cj["deltas"] = ordered_json::array();
      for (const auto& d : c.deltas) {
        ordered_json dj;
        dj["metric"] = d.metric;
        dj["gender"] = gender_str(d.gender);
        dj["first"] = d.first;
        dj["second"] = d.second;
        dj["delta"] = d.delta;
        dj["display_delta_pp"] = d.display_delta_pp;
        cj["deltas"].push_back(std::move(dj));
      }
      j.push_back(std::move(cj));
    }
    return j.dump(2) + '\n';
  }
  std::string out;
  for (const auto& c : comparisons) {
    out += c.first + " vs " + c.second + "\n";
    TextTable t;
    t.row({"Metric", "Gender", c.first, c.second, "Delta"});
    for (const auto& d : c.deltas) {
      t.row({d.metric, gender_str(d.gender), format_percent(d.first), format_percent(d.second),
             signed_pp(d.display_delta_pp)});
    }
    out += t.render();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return ss.str();
}

}  // namespace conga
