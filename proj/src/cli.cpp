#include "conga/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "conga/evaluator.hpp"
#include "conga/mt_harness.hpp"
#include "conga/reporting.hpp"
#include "conga/validator.hpp"
#include "conga/version.hpp"

namespace conga::cli {

namespace {

struct Loaded {
  Corpus corpus;
  std::string digest;
};

Loaded load(const RunConfig& cfg) {
  const std::string bytes = read_file(cfg.input);
  const auto format = cfg.format.value_or(corpus_format_for_path(cfg.input));
  return Loaded{load_corpus_string(bytes, format), corpus_digest(bytes)};
}

bool blocking(const std::vector<Diagnostic>& diags, bool strict) {
  return count_severity(diags, Severity::Error) > 0 ||
         (strict && count_severity(diags, Severity::Warning) > 0);
}

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& os) {
  for (const auto& d : diags) os << diagnostic_to_json(d) << '\n';
}

void prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create output directory: " + ec.message());
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto [corpus, digest] = load(cfg);
  const auto diags = validate(corpus);
  print_diagnostics(diags, out);
  if (blocking(diags, cfg.strict)) {
    err << "validation failed: " << count_severity(diags, Severity::Error) << " error(s), "
        << count_severity(diags, Severity::Warning) << " warning(s)\n";
    return kValidationFailed;
  }
  return kOk;
}

int cmd_stats(const RunConfig& cfg, const std::string& out_dir, std::ostream& out) {
  auto [corpus, digest] = load(cfg);
  const auto table = emit_tag_distribution(corpus, SummaryFormat::Table);
  out << table;
  if (!out_dir.empty()) {
    prepare_out_dir(out_dir);
    const std::filesystem::path dir(out_dir);
    write_file(dir / "stats.txt", table);
    write_file(dir / "stats.json", emit_tag_distribution(corpus, SummaryFormat::Json));
  }
  return kOk;
}

// Shared by evaluate and compare. Returns nullopt after printing the reason
// when validation blocks the run.
std::optional<Evaluation> run_evaluation(const RunConfig& cfg, std::ostream& err) {
  auto [corpus, digest] = load(cfg);
  for (const auto& s : cfg.systems) {
    if (!corpus.has_system(s)) {
      std::string known;
      for (const auto& k : corpus.systems()) known += (known.empty() ? "" : ", ") + k;
      throw EvaluationError(EvaluationError::Kind::UnknownSystem, "*",
                            "system '" + s + "' not in corpus (known: " +
                                (known.empty() ? "none" : known) + ")");
    }
  }
  const auto diags = validate(corpus);
  if (blocking(diags, cfg.strict)) {
    if (!cfg.force) {
      print_diagnostics(diags, err);
      err << "refusing to evaluate an invalid corpus (use --force to override)\n";
      return std::nullopt;
    }
    err << "warning: evaluating despite " << count_severity(diags, Severity::Error)
        << " validation error(s)\n";
  }
  auto ev = evaluate(corpus, cfg.systems, digest, cfg.workers);

  prepare_out_dir(cfg.out_dir);
  write_file(cfg.out_dir / "outcomes.csv", emit_outcome_csv(ev.outcomes));
  write_file(cfg.out_dir / "sentences.csv", emit_sentence_log_csv(ev.report));
  if (cfg.write_json) {
    write_file(cfg.out_dir / "summary.json", emit_summary(ev.report, SummaryFormat::Json));
  }
  if (cfg.write_table) {
    write_file(cfg.out_dir / "summary.txt", emit_summary(ev.report, SummaryFormat::Table));
  }
  return ev;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto ev = run_evaluation(cfg, err);
  if (!ev) return kValidationFailed;
  out << emit_summary(ev->report, SummaryFormat::Table);
  return kOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto ev = run_evaluation(cfg, err);
  if (!ev) return kValidationFailed;
  const auto comparisons = compare_systems(ev->report);
  const auto table = emit_comparison(comparisons, SummaryFormat::Table);
  if (cfg.write_json) {
    write_file(cfg.out_dir / "comparison.json", emit_comparison(comparisons, SummaryFormat::Json));
  }
  if (cfg.write_table) write_file(cfg.out_dir / "comparison.txt", table);
  out << emit_summary(ev->report, SummaryFormat::Table) << '\n' << table;
  return kOk;
}

struct TranslateOptions {
  std::string endpoint;
  std::string template_path;
  double timeout_s = 120;
  mt::HarnessConfig harness;
};

int cmd_translate(const RunConfig& cfg, const TranslateOptions& opt, std::ostream& out,
                  std::ostream& err) {
  const auto lines = mt::read_plain_lines(read_file(cfg.input));
  if (lines.empty()) {
    err << "error: " << cfg.input.string() << " has no non-blank lines\n";
    return kUsageOrIo;
  }
  mt::HarnessConfig harness = opt.harness;
  if (!opt.template_path.empty()) {
    auto parsed = nlohmann::json::parse(read_file(opt.template_path), nullptr, false);
    if (parsed.is_discarded()) {
      err << "error: " << opt.template_path << " is not valid JSON\n";
      return kUsageOrIo;
    }
    harness.request_template = std::move(parsed);
  }
  mt::check_request(mt::ProviderRequest{"", harness.source_lang, harness.target_lang,
                                        harness.temperature, harness.model});
  mt::HttpTransport transport(opt.endpoint,
                              std::chrono::seconds(static_cast<long>(opt.timeout_s)));
  const auto timestamp = mt::utc_timestamp();
  const auto responses = mt::translate_batch(lines, transport, harness);

  prepare_out_dir(cfg.out_dir);
  write_file(cfg.out_dir / "translations.tsv", mt::emit_translation_tsv(responses));
  write_file(cfg.out_dir / "manifest.json",
             mt::emit_manifest(responses, harness, opt.endpoint, timestamp));
  const auto failed = std::count_if(responses.begin(), responses.end(),
                                    [](const mt::ProviderResponse& r) { return !r.ok; });
  out << "translated " << (responses.size() - static_cast<std::size_t>(failed)) << "/"
      << responses.size() << " lines\n";
  for (const auto& r : responses) {
    if (!r.ok) err << "line " << r.id << " failed after " << r.attempts << " attempt(s): "
                   << r.error << '\n';
  }
  return failed > 0 ? kValidationFailed : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contextual gender annotation evaluation toolkit", "conga"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format;
  std::string systems_csv;
  std::vector<std::string> reports{"json", "table"};
  TranslateOptions topt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("corpus", cfg.input, "Corpus file (.jsonl or .tsv)")->required();
    sub->add_option("--format", format, "Override corpus format")
        ->check(CLI::IsMember({"jsonl", "tsv"}));
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check annotations against the guidelines");
  add_common(validate_cmd);
  validate_cmd->add_flag("--strict", cfg.strict, "Treat warnings as errors");

  auto* stats_cmd = app.add_subcommand("stats", "Tag distribution by gender and side");
  add_common(stats_cmd);
  std::string stats_out;
  stats_cmd->add_option("--out", stats_out, "Also write stats.txt and stats.json here");

  auto add_eval = [&](CLI::App* sub) {
    add_common(sub);
    sub->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    sub->add_flag("--force", cfg.force, "Evaluate even when validation reports errors");
    sub->add_flag("--strict", cfg.strict, "Treat validation warnings as errors");
    sub->add_option("--report", reports, "Summary formats to write")
        ->delimiter(',')
        ->check(CLI::IsMember({"json", "table"}))
        ->capture_default_str();
    sub->add_option("--workers", cfg.workers, "Threads for classification")
        ->check(CLI::Range(1u, 256u));
  };

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Classify and score one system");
  add_eval(evaluate_cmd);
  std::string system;
  evaluate_cmd->add_option("--system", system, "System name")->required();

  auto* compare_cmd = app.add_subcommand("compare", "Score and compare two systems");
  add_eval(compare_cmd);
  compare_cmd->add_option("--systems", systems_csv, "Comma-separated pair, e.g. tower,mbart")
      ->required();

  auto* translate_cmd =
      app.add_subcommand("translate", "Fetch candidate translations from an HTTP provider");
  translate_cmd->add_option("input", cfg.input, "Plain text, one sentence per line")->required();
  translate_cmd->add_option("--endpoint", topt.endpoint, "Provider URL")->required();
  translate_cmd->add_option("--model", topt.harness.model, "Model identifier")->required();
  translate_cmd->add_option("--temperature", topt.harness.temperature, "Sampling temperature")
      ->check(CLI::Range(0.0, 2.0))
      ->capture_default_str();
  translate_cmd->add_option("--parallel", topt.harness.parallel, "Concurrent requests")
      ->check(CLI::Range(1u, 64u))
      ->capture_default_str();
  translate_cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
  translate_cmd->add_option("--template", topt.template_path, "JSON request template file");
  translate_cmd->add_option("--response-field", topt.harness.response_field,
                            "Dotted path of the translation in the reply")
      ->capture_default_str();
  translate_cmd->add_option("--source-lang", topt.harness.source_lang)->capture_default_str();
  translate_cmd->add_option("--target-lang", topt.harness.target_lang)->capture_default_str();
  translate_cmd->add_option("--timeout", topt.timeout_s, "Per-request timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kUsageOrIo;
  }

  if (!format.empty()) cfg.format = corpus_format_from_string(format);
  cfg.write_json = std::find(reports.begin(), reports.end(), "json") != reports.end();
  cfg.write_table = std::find(reports.begin(), reports.end(), "table") != reports.end();

  try {
    if (*validate_cmd) {
      cfg.subcommand = "validate";
      return cmd_validate(cfg, out, err);
    }
    if (*stats_cmd) {
      cfg.subcommand = "stats";
      return cmd_stats(cfg, stats_out, out);
    }
    if (*evaluate_cmd) {
      cfg.subcommand = "evaluate";
      cfg.systems = {system};
      return cmd_evaluate(cfg, out, err);
    }
    if (*compare_cmd) {
      cfg.subcommand = "compare";
      std::stringstream ss(systems_csv);
      for (std::string s; std::getline(ss, s, ',');) {
        if (!s.empty()) cfg.systems.push_back(s);
      }
      if (cfg.systems.size() != 2 || cfg.systems[0] == cfg.systems[1]) {
        err << "error: --systems needs two distinct names, e.g. tower,mbart\n"
            << compare_cmd->help();
        return kUsageOrIo;
      }
      return cmd_compare(cfg, out, err);
    }
    cfg.subcommand = "translate";
    return cmd_translate(cfg, topt, out, err);
  } catch (const CorpusLoadError& e) {
    err << "error: " << cfg.input.string() << ": corpus failed to load\n";
    for (const auto& issue : e.issues()) err << "  " << issue.describe() << '\n';
    if (e.truncated()) err << "  (stopped after " << kMaxLoadIssues << " issues)\n";
    return kUsageOrIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageOrIo;
  }
}

}  // namespace conga::cli
