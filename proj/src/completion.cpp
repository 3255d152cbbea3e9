#include "argpipe/completion.hpp"

#include <httplib.h>
#include <json.hpp>

#include "argpipe/errors.hpp"
#include "argpipe/summarizer.hpp"
#include "argpipe/tokenizer.hpp"

namespace argpipe {

using nlohmann::json;

CompletionResponse MockCompletionClient::complete(const CompletionRequest& request) {
  calls_.fetch_add(1);

  std::string_view body(request.prompt);
  if (body.size() >= kPromptSuffix.size() &&
      body.substr(body.size() - kPromptSuffix.size()) == kPromptSuffix) {
    body.remove_suffix(kPromptSuffix.size());
  }

  const std::vector<TokenSpan> spans = token_spans(body);
  CompletionResponse response;
  response.provider = name();
  response.usage.prompt_tokens = count_tokens(request.prompt);
  if (!spans.empty() && request.max_tokens > 0) {
    const std::size_t take = std::min(request.max_tokens, spans.size());
    response.text = std::string(body.substr(spans.front().begin,
                                            spans[take - 1].end - spans.front().begin));
    response.usage.completion_tokens = take;
  }
  return response;
}

HttpCompletionClient::HttpCompletionClient(Options options) : options_(std::move(options)) {
  if (options_.base_url.empty()) throw Error("http completion client requires a base URL");
}

CompletionResponse HttpCompletionClient::complete(const CompletionRequest& request) {
  json body;
  body["prompt"] = request.prompt;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  const std::string payload = body.dump();

  httplib::Client client(options_.base_url);
  client.set_connection_timeout(30);
  client.set_read_timeout(300);
  httplib::Headers headers;
  const std::string key = api_key_from_env(options_.api_key_env);
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

  std::string last_error;
  for (std::size_t attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    auto res = client.Post(options_.path, headers, payload, "application/json");
    if (res && res->status == 200) {
      json parsed;
      try {
        parsed = json::parse(res->body);
      } catch (const json::exception& ex) {
        throw ProviderFailure(std::string("invalid completion response: ") + ex.what());
      }
      CompletionResponse response;
      response.provider = name();
      response.text = parsed.value("text", std::string());
      if (parsed.contains("usage")) {
        response.usage.prompt_tokens = parsed["usage"].value("prompt_tokens", 0u);
        response.usage.completion_tokens = parsed["usage"].value("completion_tokens", 0u);
      }
      return response;
    }
    const bool retryable = !res || res->status == 429 || res->status >= 500;
    last_error = res ? "HTTP " + std::to_string(res->status)
                     : "connection error (" + httplib::to_string(res.error()) + ")";
    if (!retryable || attempt == options_.retry.max_attempts) break;
    sleep_for(options_.retry, backoff_delay(options_.retry, attempt));
  }
  throw ProviderFailure("completion request failed after retries: " + last_error);
}

}  // namespace argpipe
