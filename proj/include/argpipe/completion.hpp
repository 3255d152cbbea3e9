#pragma once

#include <atomic>
#include <cstddef>
#include <optional>
#include <string>

#include "argpipe/http_support.hpp"

namespace argpipe {

struct CompletionRequest {
  std::string prompt;
  double temperature = 0.0;  // in [0, 1]
  std::size_t max_tokens = 128;
};

struct TokenUsage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& other) {
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    return *this;
  }
};

struct CompletionResponse {
  std::string text;
  TokenUsage usage;
  std::string provider;
};

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::string name() const = 0;
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
  // Hard prompt-size limit, when the provider has one.
  virtual std::optional<std::size_t> context_limit() const { return std::nullopt; }
};

// Deterministic offline client: echoes the first max_tokens tokens of the
// prompt body (the text before the trailing "\nTL;DR"), ignoring temperature.
class MockCompletionClient final : public CompletionClient {
 public:
  explicit MockCompletionClient(std::optional<std::size_t> context_limit = std::nullopt)
      : context_limit_(context_limit) {}

  std::string name() const override { return "mock"; }
  CompletionResponse complete(const CompletionRequest& request) override;
  std::optional<std::size_t> context_limit() const override { return context_limit_; }

  std::size_t calls() const { return calls_.load(); }

 private:
  std::optional<std::size_t> context_limit_;
  std::atomic<std::size_t> calls_{0};
};

// JSON-over-HTTP client:
//   POST <path>  {"prompt": str, "temperature": float, "max_tokens": int}
//     -> {"text": str, "usage": {"prompt_tokens": int, "completion_tokens": int}}
// Retries 429/5xx/connection errors per the policy; the API key, when the
// environment variable is set, is sent as a bearer token.
class HttpCompletionClient final : public CompletionClient {
 public:
  struct Options {
    std::string base_url;
    std::string path = "/complete";
    std::string api_key_env = "ARGPIPE_API_KEY";
    RetryPolicy retry;
    std::optional<std::size_t> context_limit;
  };

  explicit HttpCompletionClient(Options options);

  std::string name() const override { return "http"; }
  CompletionResponse complete(const CompletionRequest& request) override;
  std::optional<std::size_t> context_limit() const override { return options_.context_limit; }

 private:
  Options options_;
};

}  // namespace argpipe
