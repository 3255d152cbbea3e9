#include "argpipe/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "argpipe/errors.hpp"

namespace argpipe {

std::vector<SentenceSpan> Segmentation::spans() const {
  std::vector<SentenceSpan> result;
  std::size_t begin = 0;
  for (std::size_t boundary : boundaries) {
    result.push_back({begin, boundary});
    begin = boundary;
  }
  result.push_back({begin, sentence_count});
  return result;
}

namespace {

// Prefix sums for O(1) block mass queries over the rank matrix.
class BlockSums {
 public:
  explicit BlockSums(const SquareMatrix& m) : n_(m.size()), prefix_((n_ + 1) * (n_ + 1), 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        at(i + 1, j + 1) = m(i, j) + at(i, j + 1) + at(i + 1, j) - at(i, j);
      }
    }
  }

  // Sum over the square block rows [s, e) x cols [s, e).
  double block(std::size_t s, std::size_t e) const {
    return at(e, e) - at(s, e) - at(e, s) + at(s, s);
  }

 private:
  double& at(std::size_t i, std::size_t j) { return prefix_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return prefix_[i * (n_ + 1) + j]; }

  std::size_t n_;
  std::vector<double> prefix_;
};

struct Trajectory {
  std::vector<double> densities;          // D(k), k = 1..K
  std::vector<std::size_t> insertions;    // boundary inserted at each step
};

double area_of(std::size_t length) {
  return static_cast<double>(length) * static_cast<double>(length);
}

// Greedy trajectory up to max_k segments.
Trajectory run_greedy(const SquareMatrix& rank, std::size_t max_k) {
  const std::size_t n = rank.size();
  const BlockSums sums(rank);

  std::set<std::size_t> cuts;  // interior boundaries, sorted
  double total_mass = sums.block(0, n);
  double total_area = area_of(n);

  Trajectory trajectory;
  trajectory.densities.push_back(total_mass / total_area);

  while (cuts.size() + 1 < max_k) {
    double best_density = -1.0;
    std::size_t best_boundary = 0;
    double best_mass = 0.0;
    double best_area = 0.0;

    std::size_t begin = 0;
    auto it = cuts.begin();
    while (begin < n) {
      const std::size_t end = it != cuts.end() ? *it : n;
      const double seg_mass = sums.block(begin, end);
      const double seg_area = area_of(end - begin);
      for (std::size_t b = begin + 1; b < end; ++b) {
        const double mass = total_mass - seg_mass + sums.block(begin, b) + sums.block(b, end);
        const double area = total_area - seg_area + area_of(b - begin) + area_of(end - b);
        const double density = mass / area;
        if (density > best_density) {
          best_density = density;
          best_boundary = b;
          best_mass = mass;
          best_area = area;
        }
      }
      begin = end;
      if (it != cuts.end()) ++it;
    }

    if (best_density < 0.0) break;  // no candidate positions remain
    cuts.insert(best_boundary);
    total_mass = best_mass;
    total_area = best_area;
    trajectory.densities.push_back(best_density);
    trajectory.insertions.push_back(best_boundary);
  }
  return trajectory;
}

// Largest k in [2, K] whose split gain clears mean + sigma_factor * stddev;
// 1 when no gain does.
std::size_t choose_segment_count(const std::vector<double>& densities, double sigma_factor) {
  const std::size_t K = densities.size();
  if (K < 2) return 1;
  std::vector<double> gains(K - 1);
  for (std::size_t k = 2; k <= K; ++k) gains[k - 2] = densities[k - 1] - densities[k - 2];

  double mean = 0.0;
  for (double g : gains) mean += g;
  mean /= static_cast<double>(gains.size());
  double variance = 0.0;
  for (double g : gains) variance += (g - mean) * (g - mean);
  variance /= static_cast<double>(gains.size());
  const double threshold = mean + sigma_factor * std::sqrt(variance);

  std::size_t chosen = 1;
  for (std::size_t k = 2; k <= K; ++k) {
    if (gains[k - 2] > threshold) chosen = k;
  }
  return chosen;
}

}  // namespace

Segmentation c99_segment(const SquareMatrix& rank, const C99Params& params, C99Trace* trace) {
  const std::size_t n = rank.size();
  if (n == 0) throw NonSquareMatrix();

  if (params.target_segments && (*params.target_segments < 1 || *params.target_segments > n)) {
    throw InvalidTargetCount(*params.target_segments, n);
  }

  std::size_t max_k = n;
  if (params.target_segments) {
    max_k = *params.target_segments;
  } else if (params.max_segments > 0) {
    max_k = std::min(max_k, params.max_segments);
  }

  Trajectory trajectory = run_greedy(rank, max_k);
  if (trace) trace->densities = trajectory.densities;

  std::size_t k = trajectory.densities.size();
  if (!params.target_segments) {
    k = choose_segment_count(trajectory.densities, params.termination_sigma);
  }

  Segmentation segmentation;
  segmentation.sentence_count = n;
  segmentation.boundaries.assign(trajectory.insertions.begin(),
                                 trajectory.insertions.begin() + (k - 1));
  std::sort(segmentation.boundaries.begin(), segmentation.boundaries.end());
  return segmentation;
}

Segmentation segment_document(const CaseDocument& doc, EmbeddingProvider& provider,
                              const C99Params& params, C99Trace* trace) {
  if (doc.sentences.empty()) throw Error("document has no sentences: " + doc.case_id);
  std::vector<std::string> texts;
  texts.reserve(doc.sentences.size());
  for (const SentenceRecord& s : doc.sentences) texts.push_back(s.text);

  const std::vector<EmbeddingVector> vectors = provider.embed(texts);
  const SquareMatrix sim = similarity_matrix(vectors);
  const SquareMatrix rank = rank_matrix(sim, params.mask_size);
  Segmentation segmentation = c99_segment(rank, params, trace);
  segmentation.doc_id = doc.case_id;
  return segmentation;
}

std::string segment_text(const CaseDocument& doc, const SentenceSpan& span) {
  if (span.begin >= span.end || span.end > doc.sentences.size()) throw SpanOutOfRange();
  std::string out;
  for (std::size_t i = span.begin; i < span.end; ++i) {
    if (i > span.begin) out.push_back(' ');
    out += doc.sentences[i].text;
  }
  return out;
}

}  // namespace argpipe
