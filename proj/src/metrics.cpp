#include "argpipe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <unordered_map>

#include "argpipe/errors.hpp"
#include "argpipe/tokenizer.hpp"

namespace argpipe {

namespace {

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngram_counts(const TokenSeq& tokens, std::size_t n) {
  NgramCounts counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

std::size_t clipped_overlap(const NgramCounts& candidate, const NgramCounts& reference) {
  std::size_t overlap = 0;
  for (const auto& [gram, count] : candidate) {
    const auto it = reference.find(gram);
    if (it != reference.end()) overlap += std::min(count, it->second);
  }
  return overlap;
}

std::size_t total(const NgramCounts& counts) {
  std::size_t sum = 0;
  for (const auto& [gram, count] : counts) sum += count;
  return sum;
}

}  // namespace

Prf rouge_n(const TokenSeq& candidate, const TokenSeq& reference, std::size_t n) {
  if (n == 0) throw Error("rouge_n requires n >= 1");
  const NgramCounts cand = ngram_counts(candidate, n);
  const NgramCounts ref = ngram_counts(reference, n);
  Prf out;
  if (cand.empty() || ref.empty()) return out;
  const std::size_t overlap = clipped_overlap(cand, ref);
  out.precision = static_cast<double>(overlap) / static_cast<double>(total(cand));
  out.recall = static_cast<double>(overlap) / static_cast<double>(total(ref));
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() || b.empty()) return 0;
  // Two-row DP over the shorter sequence for the inner dimension.
  const TokenSeq& rows = a.size() >= b.size() ? a : b;
  const TokenSeq& cols = a.size() >= b.size() ? b : a;
  std::vector<std::size_t> prev(cols.size() + 1, 0);
  std::vector<std::size_t> curr(cols.size() + 1, 0);
  for (std::size_t i = 1; i <= rows.size(); ++i) {
    for (std::size_t j = 1; j <= cols.size(); ++j) {
      curr[j] = rows[i - 1] == cols[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[cols.size()];
}

Prf rouge_l(const TokenSeq& candidate, const TokenSeq& reference) {
  Prf out;
  if (candidate.empty() || reference.empty()) return out;
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  out.precision = lcs / static_cast<double>(candidate.size());
  out.recall = lcs / static_cast<double>(reference.size());
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

namespace {

struct BleuStats {
  std::vector<std::size_t> overlap;  // per order, clipped matches
  std::vector<std::size_t> total;    // per order, candidate n-grams
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;  // closest reference length

  explicit BleuStats(std::size_t max_n) : overlap(max_n, 0), total(max_n, 0) {}

  BleuStats& operator+=(const BleuStats& other) {
    for (std::size_t i = 0; i < overlap.size(); ++i) {
      overlap[i] += other.overlap[i];
      total[i] += other.total[i];
    }
    candidate_length += other.candidate_length;
    reference_length += other.reference_length;
    return *this;
  }
};

BleuStats bleu_stats(const TokenSeq& candidate, const std::vector<TokenSeq>& references,
                     std::size_t max_n) {
  BleuStats stats(max_n);
  stats.candidate_length = candidate.size();

  // Closest reference length; ties go to the shorter reference.
  std::size_t best_ref = 0;
  bool first = true;
  for (const TokenSeq& ref : references) {
    if (first) {
      best_ref = ref.size();
      first = false;
      continue;
    }
    const auto diff = [&](std::size_t len) {
      return len > candidate.size() ? len - candidate.size() : candidate.size() - len;
    };
    if (diff(ref.size()) < diff(best_ref) ||
        (diff(ref.size()) == diff(best_ref) && ref.size() < best_ref)) {
      best_ref = ref.size();
    }
  }
  stats.reference_length = best_ref;

  for (std::size_t n = 1; n <= max_n; ++n) {
    const NgramCounts cand = ngram_counts(candidate, n);
    if (cand.empty()) continue;
    // Clip against the maximum count over all references.
    NgramCounts max_ref;
    for (const TokenSeq& ref : references) {
      for (const auto& [gram, count] : ngram_counts(ref, n)) {
        auto& slot = max_ref[gram];
        slot = std::max(slot, count);
      }
    }
    stats.overlap[n - 1] = clipped_overlap(cand, max_ref);
    stats.total[n - 1] = total(cand);
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats) {
  if (stats.candidate_length == 0) return 0.0;
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t i = 0; i < stats.total.size(); ++i) {
    if (stats.total[i] == 0) continue;  // order longer than the candidate
    if (stats.overlap[i] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(stats.overlap[i]) /
                        static_cast<double>(stats.total[i]));
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double geo_mean = std::exp(log_sum / static_cast<double>(orders));
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  const double brevity = std::min(1.0, std::exp(1.0 - r / c));
  return geo_mean * brevity;
}

}  // namespace

double bleu(const TokenSeq& candidate, const std::vector<TokenSeq>& references,
            std::size_t max_n) {
  if (max_n == 0) throw Error("bleu requires max_n >= 1");
  if (references.empty()) throw Error("bleu requires at least one reference");
  return bleu_from_stats(bleu_stats(candidate, references, max_n));
}

double corpus_bleu(std::span<const std::pair<TokenSeq, std::vector<TokenSeq>>> pairs,
                   std::size_t max_n) {
  if (max_n == 0) throw Error("bleu requires max_n >= 1");
  BleuStats pooled(max_n);
  for (const auto& [candidate, references] : pairs) {
    if (references.empty()) throw Error("bleu requires at least one reference");
    pooled += bleu_stats(candidate, references, max_n);
  }
  return bleu_from_stats(pooled);
}

namespace {

struct Alignment {
  // matched[i] = reference position of candidate token i, or npos.
  std::vector<std::size_t> matched;
  std::size_t matches = 0;
  std::size_t chunks = 0;
};

constexpr std::size_t kUnmatched = static_cast<std::size_t>(-1);

std::size_t count_chunks(const std::vector<std::size_t>& matched) {
  std::size_t chunks = 0;
  std::size_t prev_cand = kUnmatched;
  std::size_t prev_ref = kUnmatched;
  for (std::size_t i = 0; i < matched.size(); ++i) {
    if (matched[i] == kUnmatched) continue;
    const bool contiguous =
        prev_cand != kUnmatched && i == prev_cand + 1 && matched[i] == prev_ref + 1;
    if (!contiguous) ++chunks;
    prev_cand = i;
    prev_ref = matched[i];
  }
  return chunks;
}

// Aligns by repeatedly taking the longest phrase shared by the unused parts of
// both sequences (leftmost on ties), which maximizes matches and keeps chunks
// near the minimum.
Alignment align_unigrams(const TokenSeq& candidate, const TokenSeq& reference) {
  Alignment alignment;
  alignment.matched.assign(candidate.size(), kUnmatched);
  std::vector<bool> cand_used(candidate.size(), false);
  std::vector<bool> ref_used(reference.size(), false);

  while (true) {
    std::size_t best_len = 0;
    std::size_t best_cand = 0;
    std::size_t best_ref = 0;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      if (cand_used[i]) continue;
      for (std::size_t j = 0; j < reference.size(); ++j) {
        if (ref_used[j]) continue;
        std::size_t len = 0;
        while (i + len < candidate.size() && j + len < reference.size() &&
               !cand_used[i + len] && !ref_used[j + len] &&
               candidate[i + len] == reference[j + len]) {
          ++len;
        }
        if (len > best_len) {
          best_len = len;
          best_cand = i;
          best_ref = j;
        }
      }
    }
    if (best_len == 0) break;
    for (std::size_t k = 0; k < best_len; ++k) {
      alignment.matched[best_cand + k] = best_ref + k;
      cand_used[best_cand + k] = true;
      ref_used[best_ref + k] = true;
    }
    alignment.matches += best_len;
  }
  alignment.chunks = count_chunks(alignment.matched);
  return alignment;
}

}  // namespace

double meteor(const TokenSeq& candidate, const TokenSeq& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const Alignment alignment = align_unigrams(candidate, reference);
  if (alignment.matches == 0) return 0.0;
  const double m = static_cast<double>(alignment.matches);
  const double precision = m / static_cast<double>(candidate.size());
  const double recall = m / static_cast<double>(reference.size());
  const double f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);
  const double ratio = static_cast<double>(alignment.chunks) / m;
  const double penalty = 0.5 * ratio * ratio * ratio;
  return f_mean * (1.0 - penalty);
}

Prf bert_score(const TokenSeq& candidate, const TokenSeq& reference,
               EmbeddingProvider& provider) {
  if (candidate.empty() || reference.empty()) {
    throw Error("bert_score requires non-empty token sequences");
  }
  const std::vector<EmbeddingVector> cand = provider.embed(candidate);
  const std::vector<EmbeddingVector> ref = provider.embed(reference);

  auto greedy = [](const std::vector<EmbeddingVector>& from,
                   const std::vector<EmbeddingVector>& to) {
    double sum = 0.0;
    for (const EmbeddingVector& u : from) {
      double best = -1.0;
      for (const EmbeddingVector& v : to) best = std::max(best, cosine(u, v));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };

  Prf out;
  out.recall = greedy(ref, cand);
  out.precision = greedy(cand, ref);
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

EvalReport evaluate_pair(const std::string& candidate, const std::string& reference,
                         const EvalOptions& options) {
  const TokenSeq ref = tokenize(reference);
  if (ref.empty()) throw EmptyReference();
  const TokenSeq cand = tokenize(candidate);

  EvalReport report;
  report.candidate_length = cand.size();
  report.rouge1 = rouge_n(cand, ref, 1);
  report.rouge2 = rouge_n(cand, ref, 2);
  report.rougeL = rouge_l(cand, ref);
  report.bleu = bleu(cand, {ref}, options.bleu_max_n);
  report.meteor = meteor(cand, ref);
  if (options.bert_provider != nullptr && !cand.empty()) {
    report.bertscore = bert_score(cand, ref, *options.bert_provider);
  }
  return report;
}

EvalReport average_reports(std::span<const EvalReport> reports) {
  EvalReport mean;
  if (reports.empty()) return mean;
  const double n = static_cast<double>(reports.size());
  double length = 0.0;
  std::size_t with_bert = 0;
  Prf bert_sum;
  auto add = [](Prf& acc, const Prf& value) {
    acc.precision += value.precision;
    acc.recall += value.recall;
    acc.f1 += value.f1;
  };
  for (const EvalReport& r : reports) {
    add(mean.rouge1, r.rouge1);
    add(mean.rouge2, r.rouge2);
    add(mean.rougeL, r.rougeL);
    mean.bleu += r.bleu;
    mean.meteor += r.meteor;
    length += static_cast<double>(r.candidate_length);
    if (r.bertscore) {
      add(bert_sum, *r.bertscore);
      ++with_bert;
    }
  }
  auto scale = [](Prf& acc, double div) {
    acc.precision /= div;
    acc.recall /= div;
    acc.f1 /= div;
  };
  scale(mean.rouge1, n);
  scale(mean.rouge2, n);
  scale(mean.rougeL, n);
  mean.bleu /= n;
  mean.meteor /= n;
  mean.candidate_length = static_cast<std::size_t>(std::llround(length / n));
  if (with_bert > 0) {
    scale(bert_sum, static_cast<double>(with_bert));
    mean.bertscore = bert_sum;
  }
  return mean;
}

}  // namespace argpipe
