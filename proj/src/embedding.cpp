#include "argpipe/embedding.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "argpipe/errors.hpp"
#include "argpipe/tokenizer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace argpipe {

using nlohmann::json;

namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kStopwords = {
      "a",    "an",   "and",  "are",  "as",    "at",   "be",    "been",  "but",  "by",
      "for",  "from", "had",  "has",  "have",  "he",   "her",   "his",   "i",    "if",
      "in",   "is",   "it",   "its",  "no",    "not",  "of",    "on",    "or",   "she",
      "so",   "that", "the",  "their", "them", "then", "there", "these", "they", "this",
      "to",   "was",  "we",   "were", "which", "will", "with",  "would", "you"};
  return kStopwords;
}

bool is_punctuation_token(const std::string& token) {
  return token.size() == 1 && !std::isalnum(static_cast<unsigned char>(token[0])) &&
         token[0] != '_' && static_cast<unsigned char>(token[0]) < 0x80;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

EmbeddingVector hashed_vector(const std::string& sentence, std::size_t dimension,
                              bool filter_tokens) {
  std::unordered_map<std::string, std::size_t> counts;
  for (std::string& token : tokenize(sentence)) {
    if (filter_tokens && (is_punctuation_token(token) || stopwords().count(token) > 0)) continue;
    ++counts[std::move(token)];
  }
  EmbeddingVector vec(dimension, 0.0);
  for (const auto& [token, count] : counts) {
    const std::size_t slot = static_cast<std::size_t>(fnv1a(token) % dimension);
    vec[slot] += 1.0 + std::log(static_cast<double>(count));
  }
  return vec;
}

}  // namespace

HashedBowProvider::HashedBowProvider(std::size_t dimension, bool filter_tokens)
    : dimension_(dimension), filter_tokens_(filter_tokens) {
  if (dimension == 0) throw Error("embedding dimension must be positive");
}

std::string HashedBowProvider::name() const {
  return (filter_tokens_ ? "hashed-bow-" : "hashed-tok-") + std::to_string(dimension_);
}

std::vector<EmbeddingVector> HashedBowProvider::embed(const std::vector<std::string>& sentences) {
  if (sentences.empty()) throw ProviderFailure("no sentences to embed");
  std::vector<EmbeddingVector> vectors(sentences.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(sentences.size()); ++i) {
    vectors[static_cast<std::size_t>(i)] =
        hashed_vector(sentences[static_cast<std::size_t>(i)], dimension_, filter_tokens_);
  }
  return vectors;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(Options options) : options_(std::move(options)) {
  if (options_.base_url.empty()) throw Error("http embedding provider requires a base URL");
}

HttpEmbeddingProvider::~HttpEmbeddingProvider() = default;

std::string HttpEmbeddingProvider::name() const {
  return "http-" + std::to_string(dimension_);
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed(
    const std::vector<std::string>& sentences) {
  if (sentences.empty()) throw ProviderFailure("no sentences to embed");

  json body;
  body["sentences"] = sentences;
  const std::string payload = body.dump();

  httplib::Client client(options_.base_url);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
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
        throw ProviderFailure(std::string("invalid embedding response: ") + ex.what());
      }
      if (!parsed.contains("embeddings") || !parsed["embeddings"].is_array()) {
        throw ProviderFailure("embedding response lacks 'embeddings' array");
      }
      std::vector<EmbeddingVector> vectors;
      for (const json& row : parsed["embeddings"]) {
        vectors.push_back(row.get<EmbeddingVector>());
      }
      if (vectors.size() != sentences.size()) {
        throw ProviderFailure("embedding count does not match sentence count");
      }
      for (const EmbeddingVector& vec : vectors) {
        if (dimension_ == 0) dimension_ = vec.size();
        if (vec.empty() || vec.size() != dimension_) {
          throw DimensionMismatch(dimension_, vec.size());
        }
        for (double value : vec) {
          if (!std::isfinite(value)) throw ProviderFailure("non-finite embedding value");
        }
      }
      return vectors;
    }
    const bool retryable = !res || res->status == 429 || res->status >= 500;
    last_error = res ? "HTTP " + std::to_string(res->status)
                     : "connection error (" + httplib::to_string(res.error()) + ")";
    if (!retryable || attempt == options_.retry.max_attempts) break;
    sleep_for(options_.retry, backoff_delay(options_.retry, attempt));
  }
  throw ProviderFailure("embedding request failed after retries: " + last_error);
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.size() != v.size()) throw DimensionMismatch(u.size(), v.size());
  double dot = 0.0;
  double norm_u = 0.0;
  double norm_v = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    norm_u += u[i] * u[i];
    norm_v += v[i] * v[i];
  }
  if (norm_u == 0.0 || norm_v == 0.0) return 0.0;
  return dot / (std::sqrt(norm_u) * std::sqrt(norm_v));
}

}  // namespace argpipe
