#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <string>

namespace argpipe {

// Retry contract for idempotent provider requests: up to max_attempts tries,
// exponential backoff doubling from base_delay, full jitter, capped at
// max_delay. The sleeper is injectable so tests run without waiting.
struct RetryPolicy {
  std::size_t max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  std::chrono::milliseconds max_delay{30000};
  std::function<void(std::chrono::milliseconds)> sleeper;
};

// Attempt numbers start at 1; returns the jittered delay before the next try.
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, std::size_t attempt);

void sleep_for(const RetryPolicy& policy, std::chrono::milliseconds delay);

// Reads the API key from the named environment variable; empty if unset.
std::string api_key_from_env(const std::string& env_var);

}  // namespace argpipe
