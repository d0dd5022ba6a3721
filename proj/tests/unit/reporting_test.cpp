#include <gtest/gtest.h>

#include <regex>

#include "conga/reporting.hpp"

using namespace conga;

namespace {

const std::string kFixtures = CONGA_FIXTURES_DIR;

std::string squash(const std::string& s) {
  return std::regex_replace(s, std::regex("[ ]+"), " ");
}

const Evaluation& fixture_eval() {
  static const Evaluation e = [] {
    auto c = load_corpus_file(kFixtures + "/paper.jsonl");
    std::vector<std::string> systems{"tower", "mbart"};
    return evaluate(c, systems);
  }();
  return e;
}

}  // namespace

TEST(Reporting, DigestFormat) {
  EXPECT_EQ(corpus_digest(""),
            "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(corpus_digest("abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Reporting, OutcomeCsvRows) {
  auto c = load_corpus_file(kFixtures + "/examples.jsonl");
  auto outs = classify_record(*c.find("125"), "tower");
  auto csv = emit_outcome_csv(outs);
  EXPECT_EQ(csv,
            "record_id,system,entity_index,token_position,category,source_gender,target_gender\n"
            "125,tower,1,2,bias,A,F\n"
            "125,tower,1,7,bias,A,M\n");
  EXPECT_EQ(parse_outcome_csv(csv), outs);
}

TEST(Reporting, OutcomeCsvEmptyAndQuoting) {
  EXPECT_EQ(emit_outcome_csv({}),
            "record_id,system,entity_index,token_position,category,source_gender,target_gender\n");
  std::vector<Outcome> outs{Outcome::unmatched_source("a,\"b\"", "sys\nx", 4, Gender::Ambiguous)};
  auto csv = emit_outcome_csv(outs);
  EXPECT_NE(csv.find("\"a,\"\"b\"\"\",\"sys\nx\",4,,unmatched_source,A,\n"), std::string::npos);
  EXPECT_EQ(parse_outcome_csv(csv), outs);
}

TEST(Reporting, CsvHelpers) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  auto rows = read_csv("a,\"b,c\"\r\n\"d\"\"\",\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"d\"", ""}));
}

TEST(Reporting, SentenceRowsSumToTotals) {
  const auto& r = fixture_eval().report;
  for (const auto& s : r.systems) {
    GenderCounts sum;
    for (const auto& row : r.sentences)
      if (row.system == s.system) sum += row.counts;
    EXPECT_EQ(sum, s.counts) << s.system;
  }
  auto csv = emit_sentence_log_csv(r);
  EXPECT_EQ(read_csv(csv).size(), r.sentences.size() + 1);
}

TEST(Reporting, TableSummary) {
  const auto& r = fixture_eval().report;
  auto table = squash(emit_summary(r, SummaryFormat::Table));
  EXPECT_NE(table.find("\nBias A→M 215 221\n"), std::string::npos) << table;
  EXPECT_NE(table.find("\nBias A→F 35 29\n"), std::string::npos);
  EXPECT_NE(table.find("\nMatch M 173 165\n"), std::string::npos);
  EXPECT_NE(table.find("\nTotal mismatches 258 277\n"), std::string::npos);
  EXPECT_EQ(emit_summary(r, SummaryFormat::Table), emit_summary(r, SummaryFormat::Table));
}

TEST(Reporting, JsonRoundTrip) {
  const auto& r = fixture_eval().report;
  auto json = emit_summary(r, SummaryFormat::Json);
  EXPECT_EQ(report_from_json(json), r);
  EXPECT_EQ(json, emit_summary(r, SummaryFormat::Json));
  EXPECT_THROW(report_from_json("{}"), Error);
}

TEST(Reporting, DigestDefaultsToCanonicalJsonl) {
  auto c = load_corpus_file(kFixtures + "/examples.jsonl");
  std::vector<std::string> systems{"tower"};
  auto e = evaluate(c, systems);
  EXPECT_EQ(e.report.input_digest, corpus_digest(save_corpus(c, CorpusFormat::Jsonl)));
  EXPECT_EQ(evaluate(c, systems, "sha256:given").report.input_digest, "sha256:given");
}

TEST(Reporting, CompareSystems) {
  const auto& r = fixture_eval().report;
  auto cmp = compare_systems(r);
  ASSERT_EQ(cmp.size(), 1u);
  EXPECT_EQ(cmp[0].first, "tower");
  EXPECT_EQ(cmp[0].second, "mbart");
  ASSERT_EQ(cmp[0].deltas.size(), 6u);
  auto find = [&](std::string_view metric, Gender g) {
    for (const auto& d : cmp[0].deltas)
      if (d.metric == metric && d.gender == g) return d;
    ADD_FAILURE();
    return MetricDelta{};
  };
  EXPECT_NEAR(find("precision", Gender::Masculine).display_delta_pp, 2.9, 1e-9);
  EXPECT_NEAR(find("recall", Gender::Feminine).display_delta_pp, 5.5, 1e-9);
  EXPECT_NEAR(find("recall", Gender::Feminine).delta * 100, 5.442, 0.001);

  auto text = squash(emit_comparison(cmp, SummaryFormat::Table));
  EXPECT_NE(text.find("precision M 31.8% 28.9% +2.9pp"), std::string::npos) << text;
  EXPECT_NE(text.find("recall F 35.4% 29.9% +5.5pp"), std::string::npos) << text;
}

TEST(Reporting, CompareIdenticalAndTooFew) {
  auto r = fixture_eval().report;
  auto twin = r.systems[0];
  twin.system = "twin";
  r.systems = {r.systems[0], twin};
  for (const auto& d : compare_systems(r)[0].deltas) {
    EXPECT_EQ(d.delta, 0.0);
    EXPECT_EQ(d.display_delta_pp, 0.0);
  }
  r.systems.pop_back();
  EXPECT_THROW(compare_systems(r), ComparisonError);
}

TEST(Reporting, ThreeSystemsGiveThreePairs) {
  auto r = fixture_eval().report;
  auto third = r.systems[0];
  third.system = "third";
  r.systems.push_back(third);
  auto cmp = compare_systems(r);
  ASSERT_EQ(cmp.size(), 3u);
  EXPECT_EQ(cmp[1].first, "tower");
  EXPECT_EQ(cmp[1].second, "third");
  EXPECT_EQ(cmp[2].first, "mbart");
}

TEST(Reporting, TagDistributionTable) {
  auto c = load_corpus_file(kFixtures + "/paper.jsonl");
  auto t = squash(emit_tag_distribution(c, SummaryFormat::Table));
  EXPECT_NE(t.find("M 356 544 570"), std::string::npos) << t;
  EXPECT_NE(t.find("Total tags 1559 754 751"), std::string::npos) << t;
}

TEST(Reporting, FormatPercent) {
  EXPECT_EQ(format_percent(0.31801), "31.8%");
  EXPECT_EQ(format_percent(0.0), "0.0%");
  EXPECT_EQ(format_percent(2.0), "200.0%");
}
