#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "conga/corpus.hpp"

using namespace conga;

namespace {

const std::string kLine110 =
    R"({"id":"110","source":"that we <F1> are overreacting","targets":{"tower":"siamo troppo reattive <F1>"}})";

CorpusLoadError load_error(std::string_view text, CorpusFormat fmt = CorpusFormat::Jsonl) {
  try {
    load_corpus_string(text, fmt);
  } catch (const CorpusLoadError& e) {
    return e;
  }
  ADD_FAILURE() << "loaded: " << text;
  return CorpusLoadError({}, false);
}

}  // namespace

TEST(Corpus, LoadsJsonlRecord) {
  auto c = load_corpus_string(kLine110 + "\n", CorpusFormat::Jsonl);
  ASSERT_EQ(c.size(), 1u);
  const auto& r = c.records()[0];
  EXPECT_EQ(r.id, "110");
  ASSERT_EQ(r.targets.size(), 1u);
  EXPECT_EQ(r.targets[0].first, "tower");
  ASSERT_NE(r.target("tower"), nullptr);
  EXPECT_EQ(r.target("tower")->tag_count(), 1u);
  EXPECT_EQ(r.target("mbart"), nullptr);
  EXPECT_EQ(c.systems(), std::vector<std::string>{"tower"});
}

TEST(Corpus, EmptyInput) {
  EXPECT_TRUE(load_corpus_string("", CorpusFormat::Jsonl).empty());
  EXPECT_TRUE(load_corpus_string("\n\r\n  \n", CorpusFormat::Jsonl).empty());
  EXPECT_TRUE(load_corpus_string("", CorpusFormat::Tsv).empty());
}

TEST(Corpus, CrlfAndBom) {
  auto c = load_corpus_string("\xEF\xBB\xBF" + kLine110 + "\r\n", CorpusFormat::Jsonl);
  EXPECT_EQ(c.records()[0].id, "110");
}

TEST(Corpus, DuplicateIdIsReported) {
  auto e = load_error(R"({"id":"7","source":"a"})" "\n" R"({"id":"7","source":"b"})" "\n");
  ASSERT_EQ(e.issues().size(), 1u);
  EXPECT_EQ(e.issues()[0].kind, LoadIssue::Kind::DuplicateId);
  EXPECT_EQ(e.issues()[0].line, 2u);
}

TEST(Corpus, TagErrorCarriesFieldAndOffset) {
  auto e = load_error(R"({"id":"1","source":"ok","targets":{"t":"x <F1> <M2>"}})");
  ASSERT_EQ(e.issues().size(), 1u);
  EXPECT_EQ(e.issues()[0].kind, LoadIssue::Kind::TagParseError);
  EXPECT_EQ(e.issues()[0].field, "targets.t");
  EXPECT_EQ(e.issues()[0].offset, 7u);
}

TEST(Corpus, CollectsEveryIssue) {
  std::string text = "not json\n";
  text += R"({"id":"","source":"x"})" "\n";
  text += R"({"id":"a","source":"<M1> x"})" "\n";
  text += R"({"id":"b","source":"x","extra":1})" "\n";
  text += R"({"id":"c","id":"d","source":"x"})" "\n";
  text += R"({"id":"e","source":3})" "\n";
  auto e = load_error(text);
  EXPECT_EQ(e.issues().size(), 6u);
  EXPECT_FALSE(e.truncated());
  for (const auto& i : e.issues()) EXPECT_FALSE(i.describe().empty());
}

TEST(Corpus, IssueCapTruncates) {
  std::string text;
  for (int i = 0; i < 150; ++i) text += "{\n";
  auto e = load_error(text);
  EXPECT_EQ(e.issues().size(), kMaxLoadIssues);
  EXPECT_TRUE(e.truncated());
}

TEST(Corpus, RejectsInvalidUtf8) {
  auto e = load_error("{\"id\":\"1\",\"source\":\"caf\xC3\"}\n");
  EXPECT_EQ(e.issues()[0].kind, LoadIssue::Kind::SchemaError);
  EXPECT_FALSE(is_valid_utf8("\xC0\xAF"));
  EXPECT_FALSE(is_valid_utf8("\xED\xA0\x80"));
  EXPECT_TRUE(is_valid_utf8("città 😀"));
}

TEST(Corpus, Tsv) {
  auto c = load_corpus_string("1\tshe <F1> left\tè partita <F1>\n2\tno target\n",
                              CorpusFormat::Tsv);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.systems(), std::vector<std::string>{"default"});
  EXPECT_NE(c.records()[0].target("default"), nullptr);
  EXPECT_TRUE(c.records()[1].targets.empty());
  EXPECT_EQ(save_corpus(c, CorpusFormat::Tsv),
            "1\tshe <F1> left\tè partita <F1>\n2\tno target\n");

  auto bad = load_error("1\ta\tb\tc\n", CorpusFormat::Tsv);
  EXPECT_EQ(bad.issues()[0].kind, LoadIssue::Kind::SchemaError);
}

TEST(Corpus, TsvCannotEncode) {
  Corpus tab({CorpusRecord{"a\tb", parse_tagged("x"), {}}});
  EXPECT_THROW(save_corpus(tab, CorpusFormat::Tsv), CorpusSerializationError);
  Corpus named({CorpusRecord{"a", parse_tagged("x"), {{"tower", parse_tagged("y")}}}});
  EXPECT_THROW(save_corpus(named, CorpusFormat::Tsv), CorpusSerializationError);
  Corpus two({CorpusRecord{"a", parse_tagged("x"),
                           {{"default", parse_tagged("y")}, {"other", parse_tagged("z")}}}});
  EXPECT_THROW(save_corpus(two, CorpusFormat::Tsv), CorpusSerializationError);
}

TEST(Corpus, JsonlSaveRoundTrip) {
  auto c = load_corpus_string(kLine110, CorpusFormat::Jsonl);
  auto bytes = save_corpus(c, CorpusFormat::Jsonl);
  EXPECT_EQ(bytes, kLine110 + "\n");
  EXPECT_EQ(load_corpus_string(bytes, CorpusFormat::Jsonl), c);
}

TEST(Corpus, ConstructorChecksIds) {
  EXPECT_THROW(Corpus({CorpusRecord{"", {}, {}}}), CorpusError);
  EXPECT_THROW(Corpus({CorpusRecord{"a", {}, {}}, CorpusRecord{"a", {}, {}}}), CorpusError);
  EXPECT_THROW(Corpus({CorpusRecord{"a", {}, {{"", {}}}}}), CorpusError);
  EXPECT_THROW(Corpus({CorpusRecord{"a", {}, {{"t", {}}, {"t", {}}}}}), CorpusError);
}

TEST(Corpus, SystemsInFirstAppearanceOrder) {
  Corpus c({CorpusRecord{"1", {}, {{"b", {}}}}, CorpusRecord{"2", {}, {{"a", {}}, {"b", {}}}}});
  EXPECT_EQ(c.systems(), (std::vector<std::string>{"b", "a"}));
  EXPECT_TRUE(c.has_system("a"));
  EXPECT_FALSE(c.has_system("c"));
  EXPECT_EQ(c.find("2")->id, "2");
  EXPECT_EQ(c.find("3"), nullptr);
}

TEST(Corpus, FileFormatFromExtension) {
  EXPECT_EQ(corpus_format_for_path("x.tsv"), CorpusFormat::Tsv);
  EXPECT_EQ(corpus_format_for_path("x.jsonl"), CorpusFormat::Jsonl);
  auto path = std::filesystem::temp_directory_path() / "conga_corpus_test.tsv";
  { std::ofstream(path, std::ios::binary) << "1\ta <M1>\tb <M1>\n"; }
  auto c = load_corpus_file(path);
  EXPECT_EQ(c.systems(), std::vector<std::string>{"default"});
  std::filesystem::remove(path);
  EXPECT_THROW(load_corpus_file("/nonexistent/conga.jsonl"), IoError);
}

TEST(Corpus, SideLabel) {
  EXPECT_EQ(Side::source().label(), "source");
  EXPECT_EQ(Side::target("tower").label(), "target:tower");
}
