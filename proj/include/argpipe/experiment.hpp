#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "argpipe/completion.hpp"
#include "argpipe/corpus.hpp"
#include "argpipe/embedding.hpp"
#include "argpipe/labeler.hpp"
#include "argpipe/metrics.hpp"
#include "argpipe/segmenter.hpp"
#include "argpipe/summarizer.hpp"

namespace argpipe {

struct ExperimentConfig {
  std::string corpus_path;
  std::vector<SummaryMethod> methods{SummaryMethod::ArgSegments};
  std::string profile = "small";  // small -> 2500-token budget, large -> 7500
  std::vector<double> temperatures{0.0, 0.3, 0.5, 0.8};
  std::vector<std::size_t> max_tokens;  // defaults per profile when empty
  std::size_t budget = 0;               // 0 -> profile default
  std::uint64_t seed = 7;

  enum class ClassifierSource { Gold, Model, Injected };
  ClassifierSource classifier = ClassifierSource::Gold;
  std::string classifier_path;

  std::string provider = "mock";  // mock | http
  std::string endpoint;
  std::string out_dir = "results";
  std::size_t mask_size = 11;
  std::size_t embedding_dim = 512;
  std::size_t max_in_flight = 1;
  bool bertscore = true;

  std::vector<std::size_t> effective_max_tokens() const;
  std::size_t effective_budget() const;
};

// Flat key = value file; '#' starts a comment.
ExperimentConfig load_experiment_config(const std::string& path);

struct ResultRow {
  std::string label;  // "(0, 32)", "Average", or a method name
  double avg_length = 0.0;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  double bleu = 0.0;         // mean of per-document BLEU
  double meteor = 0.0;
  double bertscore = 0.0;
  double corpus_bleu = 0.0;  // pooled counts over the cell's documents
  std::optional<double> cost;
};

struct GridResult {
  std::vector<ResultRow> rows;  // grid order; last row is the average
  std::vector<std::string> failed_docs;
  std::size_t evaluated_docs = 0;
};

enum class TableFormat { Markdown, Csv };

// Columns: parameters, avg length, Rouge-1, Rouge-2, Rouge-L, BLEU, METEOR,
// BERTScore; a cost column is appended when any row carries one. ROUGE, BLEU,
// and BERTScore render x100 at two decimals; METEOR renders raw at two.
std::string render_table(std::span<const ResultRow> rows, TableFormat format,
                         bool with_cost = false);

class ExperimentRunner {
 public:
  ExperimentRunner(const Corpus& corpus, const ExperimentConfig& config, CompletionClient& client,
                   EmbeddingProvider& embedder);

  // One row per (temperature, max_tokens) cell plus the average row. Per-cell
  // per-document records are persisted under <out_dir>/results and reloaded on
  // resume. Documents that fail in any cell are excluded from every average
  // and listed in the result.
  GridResult run_grid(SummaryMethod method);

  // One row per method, run at the first grid cell, with total estimated cost.
  GridResult compare_methods();

  // Writes report.md and report.csv under out_dir from previously run grids.
  void write_reports(const std::vector<std::pair<std::string, GridResult>>& sections) const;

 private:
  struct DocResult {
    SummaryRecord summary;
    EvalReport eval;
  };

  const Segmentation& segmentation_for(std::size_t doc_index);
  const std::vector<SegmentLabel>& labels_for(std::size_t doc_index);
  DocResult run_document(std::size_t doc_index, SummaryMethod method,
                         const GenerationParams& params);

  const Corpus& corpus_;
  ExperimentConfig config_;
  CompletionClient& client_;
  EmbeddingProvider& embedder_;
  SummarizerOptions summarizer_options_;
  std::optional<ClassifierModel> model_;
  PredictionMap injected_;
  std::vector<std::optional<Segmentation>> segmentations_;
  std::vector<std::optional<std::vector<SegmentLabel>>> labels_;
};

}  // namespace argpipe
