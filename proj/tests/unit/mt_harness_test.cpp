#include <gtest/gtest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include "conga/mt_harness.hpp"
#include "httplib.h"

using namespace conga::mt;
using nlohmann::json;

namespace {

// Replies with the request's text upper-cased; lines containing "FAIL" get
// a 500 every time, lines containing "FLAKY" fail once and then succeed.
class FakeTransport : public Transport {
 public:
  HttpReply post_json(const std::string& body) override {
    ++calls;
    auto req = json::parse(body);
    std::string text = req.at("text");
    {
      std::lock_guard lock(mu);
      bodies.push_back(body);
    }
    if (text.find("FAIL") != std::string::npos) return {500, "{\"error\":\"boom\"}", ""};
    if (text.find("FLAKY") != std::string::npos && flaky_seen++ == 0) return {0, "", "reset"};
    std::string out;
    for (char c : text) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return {200, json{{"out", {{"text", out + " <M1>"}}}}.dump(), ""};
  }

  std::atomic<int> calls{0};
  std::atomic<int> flaky_seen{0};
  std::mutex mu;
  std::vector<std::string> bodies;
};

HarnessConfig fake_config() {
  HarnessConfig cfg;
  cfg.model = "m";
  cfg.request_template = json{{"text", "{{text}}"}, {"t", "{{temperature}}"}};
  cfg.response_field = "out.text";
  cfg.backoff_base = std::chrono::milliseconds(1);
  return cfg;
}

std::vector<SourceLine> lines(std::initializer_list<const char*> texts) {
  std::vector<SourceLine> out;
  int i = 0;
  for (const char* t : texts) out.push_back({std::to_string(++i), t});
  return out;
}

}  // namespace

TEST(Harness, DefaultTemplateCarriesTemperature) {
  ProviderRequest r;
  r.text = "he said \"hi\"";
  r.model = "thinkverse/towerinstruct";
  auto body = json::parse(render_request(default_request_template(), r));
  EXPECT_EQ(body["model"], "thinkverse/towerinstruct");
  EXPECT_EQ(body["options"]["temperature"], 0.2);
  EXPECT_FALSE(body["stream"].get<bool>());
  EXPECT_NE(body["prompt"].get<std::string>().find("he said \"hi\""), std::string::npos);
  EXPECT_NE(body["prompt"].get<std::string>().find("from en to it"), std::string::npos);
}

TEST(Harness, RequestChecks) {
  ProviderRequest r;
  r.model = "m";
  EXPECT_NO_THROW(check_request(r));
  r.temperature = 2.5;
  EXPECT_THROW(check_request(r), HarnessError);
  r.temperature = -0.1;
  EXPECT_THROW(check_request(r), HarnessError);
  r.temperature = 2.0;
  r.model.clear();
  EXPECT_THROW(check_request(r), HarnessError);
}

TEST(Harness, ExtractField) {
  auto j = json::parse(R"({"choices":[{"message":{"content":"ciao"}}],"n":3})");
  EXPECT_EQ(extract_field(j, "choices.0.message.content"), "ciao");
  EXPECT_FALSE(extract_field(j, "choices.1.message.content").has_value());
  EXPECT_FALSE(extract_field(j, "n").has_value());
  EXPECT_FALSE(extract_field(j, "missing").has_value());
}

TEST(Harness, PlainLines) {
  auto ls = read_plain_lines("one\r\n\n  \ntwo\nthree");
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0].id, "1");
  EXPECT_EQ(ls[1].id, "4");
  EXPECT_EQ(ls[2].text, "three");
}

TEST(Harness, StripTags) {
  std::string s = "  lui <M1> è   arrivato <F2>\t<weird> x<M1> ";
  EXPECT_EQ(strip_tags(s), 3u);
  EXPECT_EQ(s, "lui è arrivato x<M1>");
}

TEST(Harness, OrderPreservedWithFailure) {
  FakeTransport t;
  auto in = lines({"uno", "FAIL due", "tre"});
  auto cfg = fake_config();
  auto out = translate_batch(in, t, cfg);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_TRUE(out[0].ok);
  EXPECT_EQ(out[0].translation, "UNO");
  EXPECT_EQ(out[0].tags_removed, 1u);
  EXPECT_FALSE(out[1].ok);
  EXPECT_EQ(out[1].attempts, 3);
  EXPECT_EQ(out[1].raw_payload, "{\"error\":\"boom\"}");
  EXPECT_TRUE(out[2].ok);
  EXPECT_EQ(out[2].translation, "TRE");
  EXPECT_EQ(emit_translation_tsv(out), "1\tuno\tUNO\n2\tFAIL due\t\n3\ttre\tTRE\n");
}

TEST(Harness, RetriesThenSucceeds) {
  FakeTransport t;
  auto in = lines({"FLAKY"});
  auto out = translate_batch(in, t, fake_config());
  EXPECT_TRUE(out[0].ok);
  EXPECT_EQ(out[0].attempts, 2);
}

TEST(Harness, ParallelKeepsOrder) {
  FakeTransport t;
  std::vector<SourceLine> in;
  for (int i = 0; i < 64; ++i) in.push_back({std::to_string(i + 1), "line " + std::to_string(i)});
  auto cfg = fake_config();
  cfg.parallel = 8;
  auto out = translate_batch(in, t, cfg);
  for (int i = 0; i < 64; ++i) EXPECT_EQ(out[i].translation, "LINE " + std::to_string(i));
  EXPECT_EQ(t.calls, 64);
}

TEST(Harness, TemperatureRendersAsNumber) {
  FakeTransport t;
  auto in = lines({"x"});
  translate_batch(in, t, fake_config());
  EXPECT_EQ(json::parse(t.bodies.at(0))["t"], 0.2);
}

TEST(Harness, SourceTagsNeverSent) {
  FakeTransport t;
  auto in = lines({"she <F1> left"});
  auto out = translate_batch(in, t, fake_config());
  EXPECT_EQ(json::parse(t.bodies.at(0))["text"], "she left");
  EXPECT_EQ(out[0].source, "she left");
}

TEST(Harness, StoppedBatchMarksLinesCancelled) {
  FakeTransport t;
  std::stop_source stop;
  stop.request_stop();
  auto in = lines({"a", "b"});
  auto out = translate_batch(in, t, fake_config(), stop.get_token());
  EXPECT_EQ(t.calls, 0);
  EXPECT_FALSE(out[1].ok);
  EXPECT_EQ(out[1].error, "cancelled");
  EXPECT_EQ(out[1].id, "2");
}

TEST(Harness, ManifestRecordsProvenance) {
  FakeTransport t;
  auto in = lines({"a", "FAIL"});
  auto cfg = fake_config();
  auto out = translate_batch(in, t, cfg);
  auto m = json::parse(emit_manifest(out, cfg, "http://x/api", "2026-01-01T00:00:00Z"));
  EXPECT_EQ(m["model"], "m");
  EXPECT_EQ(m["temperature"], 0.2);
  EXPECT_EQ(m["timestamp"], "2026-01-01T00:00:00Z");
  EXPECT_EQ(m["failed"], 1);
  EXPECT_EQ(m["entries"].size(), 2u);
  EXPECT_EQ(utc_timestamp().size(), 20u);
}

TEST(Harness, HttpTransportAgainstLocalServer) {
  httplib::Server server;
  server.Post("/api/generate", [](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body);
    std::string prompt = body["prompt"];
    if (prompt.find("bad") != std::string::npos) {
      res.status = 503;
      return;
    }
    res.set_content(json{{"response", "tradotto <F1> da " + body["model"].get<std::string>()}}.dump(),
                    "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpTransport transport("http://127.0.0.1:" + std::to_string(port) + "/api/generate",
                          std::chrono::seconds(5));
  HarnessConfig cfg;
  cfg.model = "tower";
  cfg.backoff_base = std::chrono::milliseconds(1);
  auto in = lines({"hello", "bad line"});
  auto out = translate_batch(in, transport, cfg);
  server.stop();
  th.join();

  EXPECT_TRUE(out[0].ok);
  EXPECT_EQ(out[0].translation, "tradotto da tower");
  EXPECT_FALSE(out[1].ok);
  EXPECT_EQ(out[1].error, "provider status 503");
  EXPECT_EQ(out[1].attempts, 3);
}

TEST(Harness, HttpOnly) {
  EXPECT_THROW(HttpTransport("https://example.com/api"), HarnessError);
  EXPECT_THROW(HttpTransport("localhost:11434"), HarnessError);
  EXPECT_THROW(HttpTransport("http:///x"), HarnessError);
}

TEST(Harness, UnreachableEndpointFailsPerLine) {
  HttpTransport transport("http://127.0.0.1:1/api", std::chrono::seconds(1));
  HarnessConfig cfg;
  cfg.model = "m";
  cfg.backoff_base = std::chrono::milliseconds(1);
  auto in = lines({"x"});
  auto out = translate_batch(in, transport, cfg);
  EXPECT_FALSE(out[0].ok);
  EXPECT_EQ(out[0].error.rfind("transport: ", 0), 0u);
}
