#include <gtest/gtest.h>

#include "conga/evaluator.hpp"

using namespace conga;

namespace {

constexpr auto M = Gender::Masculine;
constexpr auto F = Gender::Feminine;
constexpr auto A = Gender::Ambiguous;

CorpusRecord rec(std::string id, std::string_view source, std::string_view target) {
  CorpusRecord r{std::move(id), parse_tagged(source), {}};
  r.targets.emplace_back("tower", parse_tagged(target));
  return r;
}

}  // namespace

TEST(Evaluator, Match) {
  auto out = classify_record(rec("110", "that we <F1> are", "siamo reattive <F1>"), "tower");
  EXPECT_EQ(out, std::vector<Outcome>{Outcome::match("110", "tower", 1, 1, F)});
}

TEST(Evaluator, MatchAndError) {
  auto out = classify_record(
      rec("164", "once they <F2> got married , let them <F2> work",
          "sposate <F2> perché i mariti non li <M2> volevano"),
      "tower");
  EXPECT_EQ(out, (std::vector<Outcome>{Outcome::match("164", "tower", 2, 0, F),
                                       Outcome::error("164", "tower", 2, 5, F, M)}));
}

TEST(Evaluator, ExtraAmbiguousEntityGoesUnrealised) {
  // Same sentence with the speaker also tagged: entity 1 has no target tag.
  auto out = classify_record(
      rec("164", "working with me <A1> had to leave once they <F2> got married",
          "sposate <F2> perché i mariti non li <M2> volevano"),
      "tower");
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[2], Outcome::unmatched_source("164", "tower", 1, A));
}

TEST(Evaluator, Bias) {
  auto out = classify_record(
      rec("125", "you <A1> ’re still dry , you <A1> ’re just being nice",
          "sei ancora asciutta <F1> stai solo facendo il bravo <M1>"),
      "tower");
  EXPECT_EQ(out, (std::vector<Outcome>{Outcome::bias("125", "tower", 1, 2, F),
                                       Outcome::bias("125", "tower", 1, 7, M)}));
}

TEST(Evaluator, UnmatchedSourceAndTarget) {
  auto out = classify_record(
      rec("526", "Malloy <A1> : They <A2> told Brendan <M3> him <M3> they <A2>",
          "liberato <M3> , convinti <M2> e <F7>"),
      "tower");
  EXPECT_EQ(out, (std::vector<Outcome>{Outcome::match("526", "tower", 3, 0, M),
                                       Outcome::bias("526", "tower", 2, 2, M),
                                       Outcome::unmatched_target("526", "tower", 7, 3, F),
                                       Outcome::unmatched_source("526", "tower", 1, A)}));
}

TEST(Evaluator, UntaggedTarget) {
  auto out = classify_record(rec("x", "a <M2> b <F1> c <A3>", "niente"), "tower");
  EXPECT_EQ(out, (std::vector<Outcome>{Outcome::unmatched_source("x", "tower", 1, F),
                                       Outcome::unmatched_source("x", "tower", 2, M),
                                       Outcome::unmatched_source("x", "tower", 3, A)}));
}

TEST(Evaluator, AllAmbiguousToMasculine) {
  Corpus c({rec("1", "a <A1> b <A2>", "x <M1> y <M2> z <M1>"), rec("2", "c <A1>", "w <M1>")});
  auto out = classify_corpus(c, "tower");
  ASSERT_EQ(out.size(), 4u);
  for (const auto& o : out) {
    EXPECT_EQ(o.category, Category::Bias);
    EXPECT_EQ(o.target_gender, M);
  }
  EXPECT_EQ(out[3].record_id, "2");
}

TEST(Evaluator, Preconditions) {
  try {
    classify_record(rec("1", "a <M1> b <F1>", "x"), "tower");
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.kind(), EvaluationError::Kind::PreconditionViolated);
    EXPECT_EQ(e.record_id(), "1");
  }
  EXPECT_THROW(classify_record(rec("1", "a <A1>", "x <A1>"), "tower"), EvaluationError);
  try {
    classify_record(rec("1", "a <A1>", "x"), "mbart");
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.kind(), EvaluationError::Kind::UnknownSystem);
  }
}

TEST(Evaluator, ParallelMatchesSerialAndReportsFirstError) {
  std::vector<CorpusRecord> records;
  for (int i = 0; i < 300; ++i)
    records.push_back(rec(std::to_string(i), "a <A1> b <M2>", i % 3 ? "x <M1> y <F2>" : "z"));
  Corpus c(records);
  EXPECT_EQ(classify_corpus(c, "tower", 1), classify_corpus(c, "tower", 8));

  records[250] = rec("250", "a <M1> b <F1>", "x");
  records[40] = rec("40", "a <M1>", "x <A1>");
  Corpus bad(records);
  try {
    classify_corpus(bad, "tower", 8);
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.record_id(), "40");
  }
}

TEST(Evaluator, CategoryNames) {
  for (auto c : {Category::Match, Category::Error, Category::Bias, Category::UnmatchedSource,
                 Category::UnmatchedTarget})
    EXPECT_EQ(category_from_string(to_string(c)), c);
  EXPECT_STREQ(to_string(Category::UnmatchedSource), "unmatched_source");
  EXPECT_FALSE(category_from_string("Match").has_value());
}
