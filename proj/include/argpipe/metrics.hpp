#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "argpipe/embedding.hpp"

namespace argpipe {

using TokenSeq = std::vector<std::string>;

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Clipped n-gram overlap; empty n-gram sets on either side score 0.
Prf rouge_n(const TokenSeq& candidate, const TokenSeq& reference, std::size_t n);

// Longest common subsequence; F1 is the balanced harmonic mean.
Prf rouge_l(const TokenSeq& candidate, const TokenSeq& reference);

// The LCS core of rouge_l, exposed so oracles can compare lengths exactly.
std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

// Geometric mean of clipped n-gram precisions times the brevity penalty.
// No smoothing: any precision of zero zeroes the score. Orders longer than
// the candidate are skipped, so a candidate always matches itself at 1.
double bleu(const TokenSeq& candidate, const std::vector<TokenSeq>& references,
            std::size_t max_n = 4);

// Corpus-level BLEU: n-gram and length statistics are pooled over all pairs
// before combining.
double corpus_bleu(std::span<const std::pair<TokenSeq, std::vector<TokenSeq>>> pairs,
                   std::size_t max_n = 4);

// Exact-match unigram alignment maximizing matches, then minimizing chunks;
// Fmean = 10PR/(R + 9P) discounted by 0.5 * (chunks/matches)^3.
double meteor(const TokenSeq& candidate, const TokenSeq& reference);

// Greedy token matching over provider embeddings: recall averages, over
// reference tokens, the best cosine against any candidate token; precision is
// symmetric. Raw scores, no baseline rescaling.
Prf bert_score(const TokenSeq& candidate, const TokenSeq& reference,
               EmbeddingProvider& provider);

struct EvalReport {
  Prf rouge1;
  Prf rouge2;
  Prf rougeL;
  double bleu = 0.0;
  double meteor = 0.0;
  std::optional<Prf> bertscore;
  std::size_t candidate_length = 0;  // tokens
};

struct EvalOptions {
  EmbeddingProvider* bert_provider = nullptr;  // null disables BERTScore
  std::size_t bleu_max_n = 4;
};

// Normalizes both texts with the shared tokenizer, then computes every
// enabled metric.
EvalReport evaluate_pair(const std::string& candidate, const std::string& reference,
                         const EvalOptions& options = {});

// Field-wise arithmetic mean; bertscore averages over reports that carry one.
EvalReport average_reports(std::span<const EvalReport> reports);

}  // namespace argpipe
