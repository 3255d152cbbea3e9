#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "argpipe/corpus.hpp"
#include "argpipe/embedding.hpp"
#include "argpipe/kernels.hpp"

namespace argpipe {

struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open

  std::size_t length() const { return end - begin; }
  bool operator==(const SentenceSpan&) const = default;
};

struct Segmentation {
  std::string doc_id;
  std::size_t sentence_count = 0;
  // Interior boundaries, strictly increasing, each in (0, sentence_count).
  std::vector<std::size_t> boundaries;

  std::vector<SentenceSpan> spans() const;
  std::size_t segment_count() const { return boundaries.size() + 1; }
};

struct C99Params {
  std::size_t mask_size = 11;
  // Fixed segment count; empty selects automatic termination.
  std::optional<std::size_t> target_segments;
  // Cap on the trajectory length explored by automatic termination; 0 means
  // one segment per sentence.
  std::size_t max_segments = 0;
  // Split-gain threshold is mean + termination_sigma * stddev.
  double termination_sigma = 1.2;
};

// Inside densities D(k) recorded along the greedy trajectory, k = 1.. .
struct C99Trace {
  std::vector<double> densities;
};

// Divisive clustering on the rank matrix: repeatedly insert the boundary that
// maximizes inside density (sum of within-segment rank mass over sum of
// within-segment areas). Ties prefer the smaller sentence index.
Segmentation c99_segment(const SquareMatrix& rank, const C99Params& params,
                         C99Trace* trace = nullptr);

// embed -> cosine similarity -> rank transform -> clustering.
Segmentation segment_document(const CaseDocument& doc, EmbeddingProvider& provider,
                              const C99Params& params, C99Trace* trace = nullptr);

// Text of one segment: its sentences joined with single spaces.
std::string segment_text(const CaseDocument& doc, const SentenceSpan& span);

}  // namespace argpipe
