#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "argpipe/corpus.hpp"
#include "argpipe/embedding.hpp"
#include "argpipe/segmenter.hpp"

namespace argpipe {

enum class SegmentLabel : int { NonArgumentative = 0, Argumentative = 1 };

struct LabeledSegment {
  std::string doc_id;
  SentenceSpan span;
  std::optional<SegmentLabel> gold;
  std::optional<SegmentLabel> predicted;
  std::optional<double> score;  // present iff predicted is present
};

// Argumentative iff any sentence in the span carries an IRC annotation.
SegmentLabel gold_label(const CaseDocument& doc, const SentenceSpan& span);

std::vector<SegmentLabel> gold_labels(const CaseDocument& doc, const Segmentation& segmentation);

// Mean of the provider's sentence vectors over the span, L2-normalized;
// a zero mean stays zero.
EmbeddingVector featurize(const CaseDocument& doc, const SentenceSpan& span,
                          EmbeddingProvider& provider);

// Feature vectors for every segment with a single provider call.
std::vector<EmbeddingVector> featurize_segments(const CaseDocument& doc,
                                                const Segmentation& segmentation,
                                                EmbeddingProvider& provider);

struct TrainParams {
  std::size_t epochs = 300;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  bool class_weighting = true;  // inverse-frequency sample weights
};

struct ClassifierModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::string feature_spec;
  TrainParams training;
  std::vector<double> loss_history;  // one entry per epoch, non-increasing
};

struct TrainingExample {
  EmbeddingVector features;
  SegmentLabel label = SegmentLabel::NonArgumentative;
};

// Binary logistic regression fitted by full-batch gradient descent with
// step halving, so the recorded loss never increases.
ClassifierModel train_classifier(const std::vector<TrainingExample>& examples,
                                 const TrainParams& params, const std::string& feature_spec);

double predict_score(const ClassifierModel& model, const EmbeddingVector& features);

// Label is Argumentative when score >= threshold (a tie goes to positive).
std::pair<SegmentLabel, double> predict_label(const ClassifierModel& model,
                                              const EmbeddingVector& features,
                                              double threshold = 0.5);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassificationReport {
  ClassScores argumentative;
  ClassScores non_argumentative;
  double macro_f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;  // positive class = Argumentative

  std::size_t total() const { return tp + fp + fn + tn; }
};

ClassificationReport evaluate_classifier(
    const std::vector<std::pair<SegmentLabel, SegmentLabel>>& gold_predicted);

struct SegmentCountStats {
  double avg = 0.0;
  std::size_t max = 0;
  std::size_t min = 0;
};

// Per-document segment counts by label, aggregated over a corpus:
// argumentative, non-argumentative, and total rows.
struct SegmentationStats {
  SegmentCountStats argumentative;
  SegmentCountStats non_argumentative;
  SegmentCountStats total;
};

SegmentationStats segmentation_stats(const std::vector<std::vector<SegmentLabel>>& per_doc_labels);

void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

// External predictions, one JSON object per line:
//   {"case_id": str, "segment_index": int, "label": 0|1}
using PredictionMap = std::map<std::pair<std::string, std::size_t>, SegmentLabel>;
PredictionMap load_injected_predictions(const std::string& path);

}  // namespace argpipe
