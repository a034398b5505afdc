#include <algorithm>
#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "stableval/engine.hpp"
#include "stableval/errors.hpp"
#include "stableval/util.hpp"

namespace stableval {

using nlohmann::json;

namespace {

constexpr long k_backoff_cap_ms = 8000;

struct parsed_url {
  std::string scheme_host_port;  // e.g. http://127.0.0.1:8000
  std::string path_prefix;       // e.g. /v1
};

parsed_url split_base_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw config_error("base_url must start with http:// or https://, got: " + base_url);
  }
  auto path_start = base_url.find('/', scheme_end + 3);
  parsed_url out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = base_url;
  } else {
    out.scheme_host_port = base_url.substr(0, path_start);
    out.path_prefix = base_url.substr(path_start);
  }
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
    out.path_prefix.pop_back();
  }
  return out;
}

bool status_is_retryable(int status) {
  return status == 408 || status == 429 || status >= 500;
}

json build_payload(const std::string& model, const rendered_prompt& prompt,
                   const sampling_params& params, uint64_t seed) {
  json payload;
  payload["model"] = model;
  payload["messages"] = json::array({json{{"role", "user"}, {"content", prompt.text}}});
  payload["temperature"] = params.temperature;
  payload["top_p"] = params.top_p;
  if (params.top_k) payload["top_k"] = *params.top_k;
  if (params.min_p) payload["min_p"] = *params.min_p;
  if (params.presence_penalty) payload["presence_penalty"] = *params.presence_penalty;
  payload["max_tokens"] = params.max_tokens;
  payload["seed"] = seed;
  return payload;
}

// a body that fails to parse counts as transient: proxies emit partial bodies
// under load and a retry usually clears it
std::optional<completion> parse_success_body(const std::string& body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) return std::nullopt;
  const json& first = (*choices)[0];
  auto message = first.find("message");
  if (message == first.end() || !message->is_object()) return std::nullopt;
  auto content = message->find("content");
  if (content == message->end() || !content->is_string()) return std::nullopt;

  completion out;
  out.text = content->get<std::string>();
  out.finish = finish_reason::stop;
  if (first.contains("finish_reason") && first["finish_reason"].is_string()) {
    const std::string reason = first["finish_reason"].get<std::string>();
    if (reason == "length") out.finish = finish_reason::length;
  }
  if (doc.contains("usage") && doc["usage"].is_object()) {
    const json& usage = doc["usage"];
    if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number()) {
      out.prompt_tokens = usage["prompt_tokens"].get<int>();
    }
    if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number()) {
      out.completion_tokens = usage["completion_tokens"].get<int>();
    }
  }
  return out;
}

}  // namespace

http_backend::http_backend(endpoint_config config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw config_error("endpoint base_url must be set");
  if (config_.model.empty()) throw config_error("endpoint model must be set");
  if (config_.max_retries < 0) throw config_error("max_retries cannot be negative");
  sleeper = [](long ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
}

completion http_backend::complete(const rendered_prompt& prompt, const sampling_params& params,
                                  const attempt_context& ctx) {
  params.validate();
  const parsed_url url = split_base_url(config_.base_url);
  const std::string path = url.path_prefix + "/chat/completions";
  const std::string body = build_payload(config_.model, prompt, params, ctx.seed).dump();

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);

  std::string last_failure;
  bool saw_http_response = false;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const long delay =
          std::min(k_backoff_cap_ms, config_.backoff_base_ms * (1L << (attempt - 1)));
      if (sleeper) sleeper(delay);
    }

    const auto started = now_ms();
    httplib::Result result = client.Post(path, headers, body, "application/json");
    const long elapsed = now_ms() - started;

    if (!result) {
      last_failure = "connection failure: " + httplib::to_string(result.error());
      continue;
    }
    saw_http_response = true;

    if (result->status == 200) {
      auto parsed = parse_success_body(result->body);
      if (!parsed) {
        last_failure = "malformed completion body";
        continue;
      }
      parsed->latency_ms = elapsed;
      return *parsed;
    }
    if (status_is_retryable(result->status)) {
      last_failure = "HTTP " + std::to_string(result->status);
      continue;
    }
    throw config_error("endpoint rejected request with HTTP " +
                       std::to_string(result->status) + " for sample " + ctx.sample_id);
  }

  if (!saw_http_response) {
    throw transport_error("endpoint unreachable after " +
                          std::to_string(config_.max_retries + 1) + " attempts (" +
                          last_failure + ")");
  }
  completion failed;
  failed.finish = finish_reason::error;
  failed.text.clear();
  return failed;
}

}  // namespace stableval
