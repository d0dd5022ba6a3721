#include "conga/mt_harness.hpp"

#include <atomic>
#include <ctime>
#include <thread>

#include "conga/tagged_text.hpp"
#include "conga/version.hpp"
#include "httplib.h"

namespace conga::mt {

using nlohmann::json;

void check_request(const ProviderRequest& request) {
  if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
    throw HarnessError("temperature " + std::to_string(request.temperature) +
                       " outside [0, 2]");
  }
  if (request.model.empty()) throw HarnessError("model identifier is empty");
}

HttpTransport::HttpTransport(std::string_view url, std::chrono::seconds timeout)
    : timeout_(timeout) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos || url.substr(0, scheme_end) != "http") {
    throw HarnessError("endpoint must be an http:// URL, got '" + std::string(url) + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = std::string(url.substr(0, path_start));
  path_ = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));
  if (origin_.size() <= scheme_end + 3) {
    throw HarnessError("endpoint has no host: '" + std::string(url) + "'");
  }
}

HttpReply HttpTransport::post_json(const std::string& body) {
  // httplib::Client is not shared across threads; one per request.
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  auto res = client.Post(path_, body, "application/json");
  HttpReply reply;
  if (!res) {
    reply.transport_error = httplib::to_string(res.error());
    return reply;
  }
  reply.status = res->status;
  reply.body = res->body;
  return reply;
}

json default_request_template() {
  return json{
      {"model", "{{model}}"},
      {"prompt",
       "Translate the following text from {{source_lang}} to {{target_lang}}. "
       "Reply with the translation only.\n\n{{text}}"},
      {"stream", false},
      {"options", {{"temperature", "{{temperature}}"}}},
  };
}

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string format_number(double v) { return json(v).dump(); }

void substitute(json& node, const ProviderRequest& r) {
  if (node.is_object() || node.is_array()) {
    for (auto& child : node) substitute(child, r);
    return;
  }
  if (!node.is_string()) return;
  auto s = node.get<std::string>();
  if (s == "{{temperature}}") {
    node = r.temperature;
    return;
  }
  replace_all(s, "{{text}}", r.text);
  replace_all(s, "{{model}}", r.model);
  replace_all(s, "{{source_lang}}", r.source_lang);
  replace_all(s, "{{target_lang}}", r.target_lang);
  replace_all(s, "{{temperature}}", format_number(r.temperature));
  node = std::move(s);
}

}  // namespace

std::string render_request(const json& request_template, const ProviderRequest& request) {
  json body = request_template;
  substitute(body, request);
  return body.dump();
}

std::optional<std::string> extract_field(const json& payload, std::string_view path) {
  const json* node = &payload;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto dot = path.find('.', start);
    auto part = path.substr(start, dot == std::string_view::npos ? dot : dot - start);
    if (node->is_object()) {
      auto it = node->find(std::string(part));
      if (it == node->end()) return std::nullopt;
      node = &*it;
    } else if (node->is_array()) {
      std::size_t idx = 0;
      if (part.empty()) return std::nullopt;
      for (char c : part) {
        if (c < '0' || c > '9') return std::nullopt;
        idx = idx * 10 + static_cast<std::size_t>(c - '0');
      }
      if (idx >= node->size()) return std::nullopt;
      node = &(*node)[idx];
    } else {
      return std::nullopt;
    }
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  if (!node->is_string()) return std::nullopt;
  return node->get<std::string>();
}

std::vector<SourceLine> read_plain_lines(std::string_view text) {
  std::vector<SourceLine> out;
  std::size_t line = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto raw = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    bool blank = true;
    for (char c : raw) blank = blank && is_tag_whitespace(c);
    if (!blank) out.push_back(SourceLine{std::to_string(line), std::string(raw)});
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

std::size_t strip_tags(std::string& text) {
  std::string out;
  std::size_t removed = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_tag_whitespace(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_tag_whitespace(text[i])) ++i;
    if (start == i) break;
    std::string_view chunk(text.data() + start, i - start);
    if (looks_like_tag(chunk)) {
      ++removed;
      continue;
    }
    if (!out.empty()) out += ' ';
    out += chunk;
  }
  text = std::move(out);
  return removed;
}

namespace {

ProviderResponse translate_one(const SourceLine& line, Transport& transport,
                               const HarnessConfig& config) {
  ProviderResponse resp;
  resp.id = line.id;
  resp.source = line.text;
  strip_tags(resp.source);
  ProviderRequest request{resp.source, config.source_lang, config.target_lang,
                          config.temperature, config.model};
  const std::string body = render_request(config.request_template, request);

  const auto started = std::chrono::steady_clock::now();
  auto delay = config.backoff_base;
  for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
    resp.attempts = attempt;
    HttpReply reply = transport.post_json(body);
    resp.raw_payload = reply.body;
    if (reply.status == 0) {
      resp.error = "transport: " + reply.transport_error;
    } else if (reply.status < 200 || reply.status >= 300) {
      resp.error = "provider status " + std::to_string(reply.status);
    } else {
      auto payload = json::parse(reply.body, nullptr, /*allow_exceptions=*/false);
      if (payload.is_discarded()) {
        resp.error = "provider reply is not JSON";
      } else if (auto text = extract_field(payload, config.response_field); !text) {
        resp.error = "reply has no string at '" + config.response_field + "'";
      } else {
        resp.tags_removed = strip_tags(*text);
        if (text->empty()) {
          resp.error = "empty translation";
        } else {
          resp.ok = true;
          resp.error.clear();
          resp.translation = std::move(*text);
          break;
        }
      }
    }
    if (attempt < config.max_attempts) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
  resp.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  return resp;
}

}  // namespace

std::vector<ProviderResponse> translate_batch(std::span<const SourceLine> lines,
                                              Transport& transport, const HarnessConfig& config,
                                              std::stop_token stop) {
  check_request(ProviderRequest{"", config.source_lang, config.target_lang, config.temperature,
                                config.model});
  if (config.max_attempts < 1) throw HarnessError("max_attempts must be at least 1");

  std::vector<ProviderResponse> out(lines.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < lines.size(); i = next++) {
      if (stop.stop_requested()) {
        out[i].id = lines[i].id;
        out[i].source = lines[i].text;
        strip_tags(out[i].source);
        out[i].error = "cancelled";
        continue;
      }
      out[i] = translate_one(lines[i], transport, config);
    }
  };
  const auto n = std::max<std::size_t>(1, std::min<std::size_t>(config.parallel, lines.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
    work();
  }
  return out;
}

namespace {
std::string tsv_field(std::string s) {
  for (char& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}
}  // namespace

std::string emit_translation_tsv(std::span<const ProviderResponse> responses) {
  std::string out;
  for (const auto& r : responses) {
    out += tsv_field(r.id) + '\t' + tsv_field(r.source) + '\t' +
           tsv_field(r.ok ? r.translation : std::string()) + '\n';
  }
  return out;
}

std::string emit_manifest(std::span<const ProviderResponse> responses,
                          const HarnessConfig& config, std::string_view endpoint,
                          std::string_view timestamp) {
  nlohmann::ordered_json j;
  j["toolkit_version"] = std::string(kVersion);
  j["timestamp"] = std::string(timestamp);
  j["endpoint"] = std::string(endpoint);
  j["model"] = config.model;
  j["temperature"] = config.temperature;
  j["source_lang"] = config.source_lang;
  j["target_lang"] = config.target_lang;
  j["request_template"] = config.request_template;
  j["response_field"] = config.response_field;
  j["parallel"] = config.parallel;
  j["max_attempts"] = config.max_attempts;
  std::size_t ok = 0;
  for (const auto& r : responses) ok += r.ok ? 1 : 0;
  j["lines"] = responses.size();
  j["succeeded"] = ok;
  j["failed"] = responses.size() - ok;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& r : responses) {
    nlohmann::ordered_json e;
    e["id"] = r.id;
    e["ok"] = r.ok;
    e["attempts"] = r.attempts;
    e["latency_ms"] = r.latency.count();
    e["error"] = r.error;
    e["tags_removed"] = r.tags_removed;
    e["raw_payload"] = r.raw_payload;
    j["entries"].push_back(std::move(e));
  }
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + '\n';
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace conga::mt
