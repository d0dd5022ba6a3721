#pragma once

// Batch client for HTTP+JSON translation providers. Produces untagged
// candidate translations that still need manual annotation before they can
// be evaluated.

#include <chrono>
#include <memory>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "conga/error.hpp"
#include "json.hpp"

namespace conga::mt {

inline constexpr double kDefaultTemperature = 0.2;

struct ProviderRequest {
  std::string text;
  std::string source_lang = "en";
  std::string target_lang = "it";
  double temperature = kDefaultTemperature;  // [0, 2]
  std::string model;
};

class HarnessError : public Error {
 public:
  using Error::Error;
};

// Throws HarnessError when temperature is outside [0, 2] or model is empty.
void check_request(const ProviderRequest& request);

struct HttpReply {
  int status = 0;  // 0 when the request never completed
  std::string body;
  std::string transport_error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // Must be safe to call from several threads at once.
  virtual HttpReply post_json(const std::string& body) = 0;
};

// Plain HTTP via cpp-httplib. `url` is "http://host[:port]/path".
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(std::string_view url,
                         std::chrono::seconds timeout = std::chrono::seconds(120));
  HttpReply post_json(const std::string& body) override;

 private:
  std::string origin_;
  std::string path_;
  std::chrono::seconds timeout_;
};

// Request body targeting Ollama's /api/generate.
nlohmann::json default_request_template();

struct HarnessConfig {
  std::string model;
  double temperature = kDefaultTemperature;
  std::string source_lang = "en";
  std::string target_lang = "it";
  // String values may contain {{text}}, {{model}}, {{source_lang}},
  // {{target_lang}} and {{temperature}}. A string that is exactly
  // "{{temperature}}" becomes a JSON number.
  nlohmann::json request_template = default_request_template();
  // Dotted path to the translation string; numeric parts index arrays
  // ("choices.0.message.content").
  std::string response_field = "response";
  unsigned parallel = 1;
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{500};  // doubles after every failure
};

std::string render_request(const nlohmann::json& request_template,
                           const ProviderRequest& request);
// nullopt unless the path resolves to a string.
std::optional<std::string> extract_field(const nlohmann::json& payload, std::string_view path);

struct SourceLine {
  std::string id;
  std::string text;
};

// One SourceLine per non-blank line; ids are 1-based line numbers.
std::vector<SourceLine> read_plain_lines(std::string_view text);

struct ProviderResponse {
  std::string id;
  std::string source;
  bool ok = false;
  std::string translation;  // non-empty when ok
  std::string error;
  int attempts = 0;
  std::chrono::milliseconds latency{0};
  std::string raw_payload;  // body of the last provider reply
  std::size_t tags_removed = 0;
};

// Whitespace-normalises `text` and drops any chunk shaped like a gender tag,
// so harness output never carries annotations. Returns the dropped count.
std::size_t strip_tags(std::string& text);

// One response per line, in input order. Per-line failures are recorded and
// never abort the batch. Lines not started before `stop` is requested are
// marked failed.
std::vector<ProviderResponse> translate_batch(std::span<const SourceLine> lines,
                                              Transport& transport, const HarnessConfig& config,
                                              std::stop_token stop = {});

// id<TAB>source<TAB>translation, LF. Failed lines carry an empty translation.
std::string emit_translation_tsv(std::span<const ProviderResponse> responses);

std::string emit_manifest(std::span<const ProviderResponse> responses,
                          const HarnessConfig& config, std::string_view endpoint,
                          std::string_view timestamp);

// Current UTC time, ISO 8601.
std::string utc_timestamp();

}  // namespace conga::mt
