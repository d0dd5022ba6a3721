#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "conga/corpus.hpp"
#include "conga/evaluator.hpp"
#include "conga/metrics.hpp"
#include "conga/reporting.hpp"
#include "conga/tagged_text.hpp"
#include "conga/validator.hpp"
#include "conga/version.hpp"

namespace py = pybind11;
using namespace conga;

namespace {

CorpusFormat format_arg(const std::string& s) {
  auto f = corpus_format_from_string(s);
  if (!f) throw py::value_error("format must be 'jsonl' or 'tsv', got '" + s + "'");
  return *f;
}

SummaryFormat summary_arg(const std::string& s) {
  if (s == "json") return SummaryFormat::Json;
  if (s == "table") return SummaryFormat::Table;
  throw py::value_error("format must be 'json' or 'table', got '" + s + "'");
}

Side side_arg(const std::optional<std::string>& system) {
  return system ? Side::target(*system) : Side::source();
}

py::dict per_gender_dict(const PerGender& p) {
  py::dict d;
  d["M"] = p.masculine;
  d["F"] = p.feminine;
  d["A"] = p.ambiguous;
  d["total"] = p.total();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parse, lint, align and score gender-tagged bilingual corpora.";
  m.attr("__version__") = std::string(kVersion);

  static py::exception<Error> base_exc(m, "CongaError", PyExc_ValueError);
  py::register_exception<TagParseError>(m, "TagParseError", base_exc.ptr());
  py::register_exception<CorpusLoadError>(m, "CorpusLoadError", base_exc.ptr());
  py::register_exception<CorpusError>(m, "CorpusError", base_exc.ptr());
  py::register_exception<CorpusSerializationError>(m, "CorpusSerializationError",
                                                   base_exc.ptr());
  py::register_exception<EvaluationError>(m, "EvaluationError", base_exc.ptr());
  py::register_exception<ComparisonError>(m, "ComparisonError", base_exc.ptr());
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::enum_<Gender>(m, "Gender")
      .value("M", Gender::Masculine)
      .value("F", Gender::Feminine)
      .value("A", Gender::Ambiguous);

  // tagged text
  py::class_<GenderTag>(m, "GenderTag")
      .def(py::init<Gender, EntityIndex>(), py::arg("gender"), py::arg("entity"))
      .def_readwrite("gender", &GenderTag::gender)
      .def_readwrite("entity", &GenderTag::entity)
      .def("__eq__", [](const GenderTag& a, const GenderTag& b) { return a == b; })
      .def("__repr__", [](const GenderTag& t) { return format_tag(t); });

  py::class_<TaggedToken>(m, "TaggedToken")
      .def(py::init<std::string, std::optional<GenderTag>>(), py::arg("surface"),
           py::arg("tag") = std::nullopt)
      .def_readwrite("surface", &TaggedToken::surface)
      .def_readwrite("tag", &TaggedToken::tag)
      .def("__eq__", [](const TaggedToken& a, const TaggedToken& b) { return a == b; });

  py::class_<TaggedSentence>(m, "TaggedSentence")
      .def(py::init<>())
      .def_readwrite("tokens", &TaggedSentence::tokens)
      .def("tag_count", &TaggedSentence::tag_count)
      .def("__len__", [](const TaggedSentence& s) { return s.tokens.size(); })
      .def("__eq__", [](const TaggedSentence& a, const TaggedSentence& b) { return a == b; })
      .def("__str__", &serialize_tagged);

  m.def("parse_tagged", &parse_tagged, py::arg("text"));
  m.def("serialize_tagged", &serialize_tagged, py::arg("sentence"));
  m.def(
      "entity_map",
      [](const TaggedSentence& s) {
        py::dict out;
        for (const auto& [index, mentions] : entity_map(s)) {
          py::list l;
          for (const auto& mm : mentions) l.append(py::make_tuple(mm.position, mm.gender));
          out[py::int_(index)] = l;
        }
        return out;
      },
      py::arg("sentence"));

  // corpus
  py::class_<CorpusRecord>(m, "CorpusRecord")
      .def_readonly("id", &CorpusRecord::id)
      .def_readonly("source", &CorpusRecord::source)
      .def_property_readonly("targets",
                             [](const CorpusRecord& r) {
                               py::dict d;
                               for (const auto& [name, s] : r.targets) d[py::str(name)] = s;
                               return d;
                             });

  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("records", &Corpus::records)
      .def_property_readonly("systems", &Corpus::systems)
      .def("__len__", &Corpus::size)
      .def("__eq__", [](const Corpus& a, const Corpus& b) { return a == b; });

  m.def(
      "loads_corpus",
      [](const std::string& text, const std::string& format) {
        return load_corpus_string(text, format_arg(format));
      },
      py::arg("text"), py::arg("format") = "jsonl");
  m.def(
      "load_corpus",
      [](const std::filesystem::path& path, std::optional<std::string> format) {
        return load_corpus_file(path, format ? std::optional(format_arg(*format)) : std::nullopt);
      },
      py::arg("path"), py::arg("format") = std::nullopt);
  m.def(
      "save_corpus",
      [](const Corpus& c, const std::string& format) { return save_corpus(c, format_arg(format)); },
      py::arg("corpus"), py::arg("format") = "jsonl");

  // validator
  py::class_<Diagnostic>(m, "Diagnostic")
      .def_property_readonly("code", [](const Diagnostic& d) { return to_string(d.code); })
      .def_property_readonly("severity",
                             [](const Diagnostic& d) { return to_string(d.severity); })
      .def_readonly("record_id", &Diagnostic::record_id)
      .def_property_readonly("side", [](const Diagnostic& d) { return d.side.label(); })
      .def_readonly("position", &Diagnostic::position)
      .def_readonly("message", &Diagnostic::message)
      .def("to_json", &diagnostic_to_json);
  m.def("validate", &validate, py::arg("corpus"));

  // evaluator
  py::class_<Outcome>(m, "Outcome")
      .def_property_readonly("category", [](const Outcome& o) { return to_string(o.category); })
      .def_readonly("record_id", &Outcome::record_id)
      .def_readonly("system", &Outcome::system)
      .def_readonly("entity", &Outcome::entity)
      .def_readonly("position", &Outcome::position)
      .def_readonly("source_gender", &Outcome::source_gender)
      .def_readonly("target_gender", &Outcome::target_gender)
      .def("__eq__", [](const Outcome& a, const Outcome& b) { return a == b; });
  m.def("classify_record", &classify_record, py::arg("record"), py::arg("system"));
  m.def("classify_corpus", &classify_corpus, py::arg("corpus"), py::arg("system"),
        py::arg("workers") = 1u, py::call_guard<py::gil_scoped_release>());

  // metrics
  py::class_<PerGender>(m, "PerGender")
      .def(py::init<>())
      .def_readwrite("M", &PerGender::masculine)
      .def_readwrite("F", &PerGender::feminine)
      .def_readwrite("A", &PerGender::ambiguous)
      .def("total", &PerGender::total)
      .def("as_dict", &per_gender_dict)
      .def("__eq__", [](const PerGender& a, const PerGender& b) { return a == b; });

  py::class_<GenderCounts>(m, "GenderCounts")
      .def(py::init<>())
      .def_readonly("matches", &GenderCounts::matches)
      .def_readonly("errors_into", &GenderCounts::errors_into)
      .def_readonly("biases_into", &GenderCounts::biases_into)
      .def_readonly("unmatched_target", &GenderCounts::unmatched_target)
      .def_readonly("target_tags", &GenderCounts::target_tags)
      .def_readonly("source_tags", &GenderCounts::source_tags)
      .def_readonly("unmatched_source_entities", &GenderCounts::unmatched_source_entities)
      .def("total_matches", &GenderCounts::total_matches)
      .def("total_mismatches", &GenderCounts::total_mismatches)
      .def("__add__", [](const GenderCounts& a, const GenderCounts& b) { return a + b; })
      .def("__eq__", [](const GenderCounts& a, const GenderCounts& b) { return a == b; });

  py::class_<Ratio>(m, "Ratio")
      .def_readonly("value", &Ratio::value)
      .def_readonly("numerator", &Ratio::numerator)
      .def_readonly("denominator", &Ratio::denominator)
      .def_readonly("zero_denominator", &Ratio::zero_denominator)
      .def_readonly("over_unity", &Ratio::over_unity)
      .def("__float__", [](const Ratio& r) { return r.value; });

  py::class_<GenderMetrics>(m, "GenderMetrics")
      .def_readonly("precision", &GenderMetrics::precision)
      .def_readonly("recall", &GenderMetrics::recall)
      .def_readonly("f1", &GenderMetrics::f1);

  py::class_<AmbiguityStats>(m, "AmbiguityStats")
      .def_readonly("a_to_m", &AmbiguityStats::a_to_m)
      .def_readonly("a_to_f", &AmbiguityStats::a_to_f)
      .def_property_readonly("masculine_share", &AmbiguityStats::masculine_share)
      .def_property_readonly("feminine_share", &AmbiguityStats::feminine_share);

  m.def(
      "aggregate",
      [](const std::vector<Outcome>& outcomes, const PerGender& source_tags) {
        return aggregate(outcomes, source_tags);
      },
      py::arg("outcomes"), py::arg("source_tags") = PerGender{});
  m.def("precision", &precision, py::arg("counts"), py::arg("gender"));
  m.def("recall", &recall, py::arg("counts"), py::arg("gender"));
  m.def("f1", &f1, py::arg("precision"), py::arg("recall"));
  m.def("gender_metrics", &gender_metrics, py::arg("counts"), py::arg("gender"));
  m.def("ambiguity_stats", &ambiguity_stats, py::arg("counts"));
  m.def(
      "tag_distribution",
      [](const Corpus& c, std::optional<std::string> system) {
        return tag_distribution(c, side_arg(system));
      },
      py::arg("corpus"), py::arg("system") = std::nullopt,
      "Tag counts for the source side, or for `system`'s outputs when given.");

  // reporting
  py::class_<SystemReport>(m, "SystemReport")
      .def_readonly("system", &SystemReport::system)
      .def_readonly("counts", &SystemReport::counts)
      .def_readonly("masculine", &SystemReport::masculine)
      .def_readonly("feminine", &SystemReport::feminine)
      .def_readonly("ambiguity", &SystemReport::ambiguity)
      .def_readonly("source_tags", &SystemReport::source_tags)
      .def_readonly("target_tags", &SystemReport::target_tags);

  py::class_<SentenceLogRow>(m, "SentenceLogRow")
      .def_readonly("record_id", &SentenceLogRow::record_id)
      .def_readonly("system", &SentenceLogRow::system)
      .def_readonly("counts", &SentenceLogRow::counts);

  py::class_<EvaluationReport>(m, "EvaluationReport")
      .def_readonly("toolkit_version", &EvaluationReport::toolkit_version)
      .def_readonly("input_digest", &EvaluationReport::input_digest)
      .def_readonly("systems", &EvaluationReport::systems)
      .def_readonly("sentences", &EvaluationReport::sentences)
      .def("find", &EvaluationReport::find, py::arg("system"),
           py::return_value_policy::reference_internal)
      .def("__eq__", [](const EvaluationReport& a, const EvaluationReport& b) { return a == b; });

  py::class_<MetricDelta>(m, "MetricDelta")
      .def_readonly("metric", &MetricDelta::metric)
      .def_readonly("gender", &MetricDelta::gender)
      .def_readonly("first", &MetricDelta::first)
      .def_readonly("second", &MetricDelta::second)
      .def_readonly("delta", &MetricDelta::delta)
      .def_readonly("display_delta_pp", &MetricDelta::display_delta_pp);

  py::class_<SystemComparison>(m, "SystemComparison")
      .def_readonly("first", &SystemComparison::first)
      .def_readonly("second", &SystemComparison::second)
      .def_readonly("deltas", &SystemComparison::deltas);

  m.def(
      "evaluate",
      [](const Corpus& c, const std::vector<std::string>& systems, std::string digest) {
        auto ev = evaluate(c, systems, std::move(digest));
        return py::make_tuple(std::move(ev.report), std::move(ev.outcomes));
      },
      py::arg("corpus"), py::arg("systems"), py::arg("input_digest") = "",
      "Returns (EvaluationReport, list[Outcome]).");
  m.def("corpus_digest", [](const py::bytes& b) { return corpus_digest(std::string(b)); });
  m.def(
      "emit_outcome_csv", [](const std::vector<Outcome>& o) { return emit_outcome_csv(o); },
      py::arg("outcomes"));
  m.def("emit_sentence_log_csv", &emit_sentence_log_csv, py::arg("report"));
  m.def(
      "emit_summary",
      [](const EvaluationReport& r, const std::string& format) {
        return emit_summary(r, summary_arg(format));
      },
      py::arg("report"), py::arg("format") = "table");
  m.def("report_from_json", &report_from_json, py::arg("json"));
  m.def("compare_systems", &compare_systems, py::arg("report"));
  m.def(
      "emit_comparison",
      [](const std::vector<SystemComparison>& c, const std::string& format) {
        return emit_comparison(c, summary_arg(format));
      },
      py::arg("comparisons"), py::arg("format") = "table");
}
