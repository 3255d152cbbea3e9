#include "argpipe/labeler.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "argpipe/errors.hpp"

namespace argpipe {

using nlohmann::json;

SegmentLabel gold_label(const CaseDocument& doc, const SentenceSpan& span) {
  if (span.begin >= span.end || span.end > doc.sentences.size()) throw SpanOutOfRange();
  for (std::size_t i = span.begin; i < span.end; ++i) {
    if (doc.sentences[i].irc) return SegmentLabel::Argumentative;
  }
  return SegmentLabel::NonArgumentative;
}

std::vector<SegmentLabel> gold_labels(const CaseDocument& doc, const Segmentation& segmentation) {
  std::vector<SegmentLabel> labels;
  for (const SentenceSpan& span : segmentation.spans()) labels.push_back(gold_label(doc, span));
  return labels;
}

namespace {

EmbeddingVector normalized_mean(const std::vector<EmbeddingVector>& vectors, std::size_t begin,
                                std::size_t end) {
  const std::size_t dim = vectors.front().size();
  EmbeddingVector mean(dim, 0.0);
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += vectors[i][d];
  }
  const double count = static_cast<double>(end - begin);
  double norm = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    mean[d] /= count;
    norm += mean[d] * mean[d];
  }
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& v : mean) v /= norm;
  }
  return mean;
}

}  // namespace

EmbeddingVector featurize(const CaseDocument& doc, const SentenceSpan& span,
                          EmbeddingProvider& provider) {
  if (span.begin >= span.end || span.end > doc.sentences.size()) throw SpanOutOfRange();
  std::vector<std::string> texts;
  for (std::size_t i = span.begin; i < span.end; ++i) texts.push_back(doc.sentences[i].text);
  const std::vector<EmbeddingVector> vectors = provider.embed(texts);
  return normalized_mean(vectors, 0, vectors.size());
}

std::vector<EmbeddingVector> featurize_segments(const CaseDocument& doc,
                                                const Segmentation& segmentation,
                                                EmbeddingProvider& provider) {
  std::vector<std::string> texts;
  texts.reserve(doc.sentences.size());
  for (const SentenceRecord& s : doc.sentences) texts.push_back(s.text);
  const std::vector<EmbeddingVector> vectors = provider.embed(texts);

  std::vector<EmbeddingVector> features;
  for (const SentenceSpan& span : segmentation.spans()) {
    if (span.end > vectors.size()) throw SpanOutOfRange();
    features.push_back(normalized_mean(vectors, span.begin, span.end));
  }
  return features;
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Numerically stable -[y log p + (1-y) log (1-p)] for p = sigmoid(z).
double bce(double z, double y) {
  const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return softplus - y * z;
}

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

LossGradient loss_and_gradient(const std::vector<TrainingExample>& examples,
                               const std::vector<double>& sample_weights, double weight_total,
                               const std::vector<double>& w, double b, double l2) {
  const std::size_t dim = w.size();
  LossGradient out;
  out.grad_w.assign(dim, 0.0);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const EmbeddingVector& x = examples[i].features;
    const double y = examples[i].label == SegmentLabel::Argumentative ? 1.0 : 0.0;
    double z = b;
    for (std::size_t d = 0; d < dim; ++d) z += w[d] * x[d];
    const double s = sample_weights[i];
    out.loss += s * bce(z, y);
    const double residual = s * (sigmoid(z) - y);
    for (std::size_t d = 0; d < dim; ++d) out.grad_w[d] += residual * x[d];
    out.grad_b += residual;
  }
  out.loss /= weight_total;
  out.grad_b /= weight_total;
  double penalty = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    out.grad_w[d] = out.grad_w[d] / weight_total + l2 * w[d];
    penalty += w[d] * w[d];
  }
  out.loss += 0.5 * l2 * penalty;
  return out;
}

}  // namespace

ClassifierModel train_classifier(const std::vector<TrainingExample>& examples,
                                 const TrainParams& params, const std::string& feature_spec) {
  if (examples.empty()) throw SingleClassTrainingSet();
  std::size_t positives = 0;
  for (const TrainingExample& ex : examples) {
    if (ex.label == SegmentLabel::Argumentative) ++positives;
  }
  const std::size_t negatives = examples.size() - positives;
  if (positives == 0 || negatives == 0) throw SingleClassTrainingSet();

  const std::size_t dim = examples.front().features.size();
  for (const TrainingExample& ex : examples) {
    if (ex.features.size() != dim) throw DimensionMismatch(dim, ex.features.size());
  }

  // Inverse-frequency weights make both classes contribute equally.
  std::vector<double> sample_weights(examples.size(), 1.0);
  if (params.class_weighting) {
    const double n = static_cast<double>(examples.size());
    const double w_pos = n / (2.0 * static_cast<double>(positives));
    const double w_neg = n / (2.0 * static_cast<double>(negatives));
    for (std::size_t i = 0; i < examples.size(); ++i) {
      sample_weights[i] = examples[i].label == SegmentLabel::Argumentative ? w_pos : w_neg;
    }
  }
  double weight_total = 0.0;
  for (double s : sample_weights) weight_total += s;

  ClassifierModel model;
  model.weights.assign(dim, 0.0);
  model.bias = 0.0;
  model.feature_spec = feature_spec;
  model.training = params;

  double lr = params.learning_rate;
  LossGradient current = loss_and_gradient(examples, sample_weights, weight_total, model.weights,
                                           model.bias, params.l2);
  if (!std::isfinite(current.loss)) throw NonFiniteLoss();

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    bool stepped = false;
    std::vector<double> next_w(dim);
    for (int halving = 0; halving < 30; ++halving) {
      for (std::size_t d = 0; d < dim; ++d) next_w[d] = model.weights[d] - lr * current.grad_w[d];
      const double next_b = model.bias - lr * current.grad_b;
      LossGradient next =
          loss_and_gradient(examples, sample_weights, weight_total, next_w, next_b, params.l2);
      if (!std::isfinite(next.loss)) throw NonFiniteLoss();
      if (next.loss <= current.loss + 1e-12) {
        model.weights = next_w;
        model.bias = next_b;
        current = std::move(next);
        stepped = true;
        break;
      }
      lr *= 0.5;
    }
    model.loss_history.push_back(current.loss);
    if (!stepped) break;  // even the smallest step uphill: converged
  }
  return model;
}

double predict_score(const ClassifierModel& model, const EmbeddingVector& features) {
  if (features.size() != model.weights.size()) {
    throw DimensionMismatch(model.weights.size(), features.size());
  }
  double z = model.bias;
  for (std::size_t d = 0; d < features.size(); ++d) z += model.weights[d] * features[d];
  return sigmoid(z);
}

std::pair<SegmentLabel, double> predict_label(const ClassifierModel& model,
                                              const EmbeddingVector& features, double threshold) {
  const double score = predict_score(model, features);
  const SegmentLabel label =
      score >= threshold ? SegmentLabel::Argumentative : SegmentLabel::NonArgumentative;
  return {label, score};
}

namespace {

ClassScores scores_from(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassScores s;
  s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                      : 0.0;
  return s;
}

}  // namespace

ClassificationReport evaluate_classifier(
    const std::vector<std::pair<SegmentLabel, SegmentLabel>>& gold_predicted) {
  if (gold_predicted.empty()) throw EmptyTestSet();
  ClassificationReport report;
  for (const auto& [gold, predicted] : gold_predicted) {
    const bool g = gold == SegmentLabel::Argumentative;
    const bool p = predicted == SegmentLabel::Argumentative;
    if (g && p) ++report.tp;
    if (!g && p) ++report.fp;
    if (g && !p) ++report.fn;
    if (!g && !p) ++report.tn;
  }
  report.argumentative = scores_from(report.tp, report.fp, report.fn);
  report.non_argumentative = scores_from(report.tn, report.fn, report.fp);
  report.macro_f1 = (report.argumentative.f1 + report.non_argumentative.f1) / 2.0;
  return report;
}

namespace {

SegmentCountStats count_stats(const std::vector<std::size_t>& counts) {
  SegmentCountStats stats;
  if (counts.empty()) return stats;
  stats.min = std::numeric_limits<std::size_t>::max();
  double total = 0.0;
  for (std::size_t c : counts) {
    total += static_cast<double>(c);
    stats.max = std::max(stats.max, c);
    stats.min = std::min(stats.min, c);
  }
  stats.avg = total / static_cast<double>(counts.size());
  return stats;
}

}  // namespace

SegmentationStats segmentation_stats(
    const std::vector<std::vector<SegmentLabel>>& per_doc_labels) {
  std::vector<std::size_t> argumentative, non_argumentative, total;
  for (const std::vector<SegmentLabel>& labels : per_doc_labels) {
    std::size_t positive = 0;
    for (SegmentLabel label : labels) {
      if (label == SegmentLabel::Argumentative) ++positive;
    }
    argumentative.push_back(positive);
    non_argumentative.push_back(labels.size() - positive);
    total.push_back(labels.size());
  }
  SegmentationStats stats;
  stats.argumentative = count_stats(argumentative);
  stats.non_argumentative = count_stats(non_argumentative);
  stats.total = count_stats(total);
  return stats;
}

void save_model(const ClassifierModel& model, const std::string& path) {
  json out;
  out["dim"] = model.weights.size();
  out["weights"] = model.weights;
  out["bias"] = model.bias;
  out["feature_spec"] = model.feature_spec;
  std::ofstream file(path);
  if (!file) throw Error("cannot open model file for writing: " + path);
  file << out.dump(2) << '\n';
}

ClassifierModel load_model(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error("cannot open model file: " + path);
  json in;
  try {
    file >> in;
  } catch (const json::exception& ex) {
    throw Error("invalid model file " + path + ": " + ex.what());
  }
  ClassifierModel model;
  model.weights = in.at("weights").get<std::vector<double>>();
  model.bias = in.at("bias").get<double>();
  model.feature_spec = in.value("feature_spec", std::string());
  const auto dim = in.at("dim").get<std::size_t>();
  if (dim != model.weights.size()) throw DimensionMismatch(dim, model.weights.size());
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw Error("model weights must be finite");
  }
  return model;
}

PredictionMap load_injected_predictions(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error("cannot open predictions file: " + path);
  PredictionMap predictions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& ex) {
      throw MalformedRecord(line_no, ex.what());
    }
    if (!record.contains("case_id") || !record.contains("segment_index") ||
        !record.contains("label")) {
      throw MalformedRecord(line_no, "expected case_id, segment_index, and label");
    }
    const int label = record["label"].get<int>();
    if (label != 0 && label != 1) throw MalformedRecord(line_no, "label must be 0 or 1");
    predictions[{record["case_id"].get<std::string>(),
                 record["segment_index"].get<std::size_t>()}] =
        label == 1 ? SegmentLabel::Argumentative : SegmentLabel::NonArgumentative;
  }
  return predictions;
}

}  // namespace argpipe
