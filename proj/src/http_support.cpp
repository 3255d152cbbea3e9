#include "argpipe/http_support.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <thread>

namespace argpipe {

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, std::size_t attempt) {
  auto cap = policy.base_delay;
  for (std::size_t i = 1; i < attempt && cap < policy.max_delay; ++i) cap *= 2;
  cap = std::min(cap, policy.max_delay);
  if (cap.count() <= 0) return std::chrono::milliseconds(0);
  // Full jitter: uniform in [0, cap].
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_int_distribution<long long> dist(0, cap.count());
  return std::chrono::milliseconds(dist(rng));
}

void sleep_for(const RetryPolicy& policy, std::chrono::milliseconds delay) {
  if (policy.sleeper) {
    policy.sleeper(delay);
  } else {
    std::this_thread::sleep_for(delay);
  }
}

std::string api_key_from_env(const std::string& env_var) {
  if (env_var.empty()) return {};
  const char* value = std::getenv(env_var.c_str());
  return value ? std::string(value) : std::string();
}

}  // namespace argpipe
