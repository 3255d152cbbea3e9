#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "argpipe/http_support.hpp"

namespace argpipe {

using EmbeddingVector = std::vector<double>;

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  // Feature-spec identifier, e.g. "hashed-bow-512"; stored with trained models.
  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;

  // One vector per input, order preserving.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& sentences) = 0;
};

// Offline deterministic provider: hashed bag-of-words with sublinear term
// frequency (1 + log count), lowercasing, punctuation stripping, and a fixed
// stopword list. Sentences made of stopwords only embed to the zero vector.
// With filter_tokens off, every token contributes, which keeps single-token
// inputs nonzero; that mode backs token-level greedy matching.
class HashedBowProvider final : public EmbeddingProvider {
 public:
  explicit HashedBowProvider(std::size_t dimension = 512, bool filter_tokens = true);

  std::string name() const override;
  std::size_t dimension() const override { return dimension_; }
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& sentences) override;

 private:
  std::size_t dimension_;
  bool filter_tokens_;
};

// Remote provider speaking JSON over HTTP:
//   POST <path>  {"sentences": [str]}  ->  {"embeddings": [[float]]}
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  struct Options {
    std::string base_url;
    std::string path = "/embed";
    std::string api_key_env = "ARGPIPE_API_KEY";
    RetryPolicy retry;
  };

  explicit HttpEmbeddingProvider(Options options);
  ~HttpEmbeddingProvider() override;

  std::string name() const override;
  std::size_t dimension() const override { return dimension_; }
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& sentences) override;

 private:
  Options options_;
  std::size_t dimension_ = 0;  // learned from the first response
};

// u.v / (|u||v|); zero vectors compare as 0 against everything.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

}  // namespace argpipe
