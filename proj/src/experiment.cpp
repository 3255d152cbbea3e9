#include "argpipe/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "argpipe/errors.hpp"
#include "argpipe/tokenizer.hpp"

namespace argpipe {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::size_t> ExperimentConfig::effective_max_tokens() const {
  if (!max_tokens.empty()) return max_tokens;
  if (profile == "large") return {128, 256, 512};
  return {32, 64, 128};
}

std::size_t ExperimentConfig::effective_budget() const {
  if (budget > 0) return budget;
  return profile == "large" ? TokenBudgetPolicy::large_profile().budget_tokens
                            : TokenBudgetPolicy::small_profile().budget_tokens;
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::stringstream stream(value);
  while (std::getline(stream, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = item.find_last_not_of(" \t");
    items.push_back(item.substr(begin, end - begin + 1));
  }
  return items;
}

SummaryMethod method_from_string(const std::string& name) {
  if (name == "baseline") return SummaryMethod::BaselineChunks;
  if (name == "argseg") return SummaryMethod::ArgSegments;
  throw UsageError("unknown method '" + name + "' (expected baseline|argseg)");
}

std::string format_temperature(double t) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", t);
  return buffer;
}

std::string cell_label(double temperature, std::size_t max_tokens) {
  return "(" + format_temperature(temperature) + ", " + std::to_string(max_tokens) + ")";
}

std::string cell_file_name(SummaryMethod method, double temperature, std::size_t max_tokens) {
  return std::string(to_string(method)) + "_t" + format_temperature(temperature) + "_m" +
         std::to_string(max_tokens) + ".jsonl";
}

json usage_to_json(const TokenUsage& usage) {
  return json{{"prompt_tokens", usage.prompt_tokens},
              {"completion_tokens", usage.completion_tokens}};
}

json prf_to_json(const Prf& prf) {
  return json{{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
}

Prf prf_from_json(const json& value) {
  Prf prf;
  prf.precision = value.at("precision").get<double>();
  prf.recall = value.at("recall").get<double>();
  prf.f1 = value.at("f1").get<double>();
  return prf;
}

json eval_to_json(const EvalReport& report) {
  json out;
  out["rouge1"] = prf_to_json(report.rouge1);
  out["rouge2"] = prf_to_json(report.rouge2);
  out["rougeL"] = prf_to_json(report.rougeL);
  out["bleu"] = report.bleu;
  out["meteor"] = report.meteor;
  out["bertscore"] = report.bertscore ? prf_to_json(*report.bertscore) : json(nullptr);
  out["candidate_length"] = report.candidate_length;
  return out;
}

EvalReport eval_from_json(const json& value) {
  EvalReport report;
  report.rouge1 = prf_from_json(value.at("rouge1"));
  report.rouge2 = prf_from_json(value.at("rouge2"));
  report.rougeL = prf_from_json(value.at("rougeL"));
  report.bleu = value.at("bleu").get<double>();
  report.meteor = value.at("meteor").get<double>();
  if (!value.at("bertscore").is_null()) report.bertscore = prf_from_json(value.at("bertscore"));
  report.candidate_length = value.at("candidate_length").get<std::size_t>();
  return report;
}

json summary_to_json(const SummaryRecord& record) {
  json out;
  out["doc_id"] = record.doc_id;
  out["method"] = to_string(record.method);
  out["parts"] = record.parts;
  out["final_summary"] = record.final_summary;
  out["usage"] = usage_to_json(record.total_usage);
  out["cost"] = record.cost;
  return out;
}

SummaryRecord summary_from_json(const json& value) {
  SummaryRecord record;
  record.doc_id = value.at("doc_id").get<std::string>();
  record.method = method_from_string(value.at("method").get<std::string>());
  record.parts = value.at("parts").get<std::vector<std::string>>();
  record.final_summary = value.at("final_summary").get<std::string>();
  record.total_usage.prompt_tokens = value.at("usage").at("prompt_tokens").get<std::size_t>();
  record.total_usage.completion_tokens =
      value.at("usage").at("completion_tokens").get<std::size_t>();
  record.cost = value.at("cost").get<double>();
  return record;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error("cannot open config file: " + path);
  ExperimentConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) continue;
    try {
      if (key == "corpus") {
        config.corpus_path = value;
      } else if (key == "methods" || key == "method") {
        config.methods.clear();
        for (const std::string& m : split_list(value)) config.methods.push_back(method_from_string(m));
      } else if (key == "profile") {
        config.profile = value;
      } else if (key == "temperatures") {
        config.temperatures.clear();
        for (const std::string& t : split_list(value)) config.temperatures.push_back(std::stod(t));
      } else if (key == "max_tokens") {
        config.max_tokens.clear();
        for (const std::string& m : split_list(value)) {
          config.max_tokens.push_back(static_cast<std::size_t>(std::stoull(m)));
        }
      } else if (key == "budget") {
        config.budget = static_cast<std::size_t>(std::stoull(value));
      } else if (key == "seed") {
        config.seed = std::stoull(value);
      } else if (key == "classifier") {
        if (value == "gold") {
          config.classifier = ExperimentConfig::ClassifierSource::Gold;
        } else if (value.rfind("model:", 0) == 0) {
          config.classifier = ExperimentConfig::ClassifierSource::Model;
          config.classifier_path = value.substr(6);
        } else if (value.rfind("injected:", 0) == 0) {
          config.classifier = ExperimentConfig::ClassifierSource::Injected;
          config.classifier_path = value.substr(9);
        } else {
          throw UsageError("classifier must be gold, model:<path>, or injected:<path>");
        }
      } else if (key == "provider") {
        config.provider = value;
      } else if (key == "endpoint") {
        config.endpoint = value;
      } else if (key == "out") {
        config.out_dir = value;
      } else if (key == "mask") {
        config.mask_size = static_cast<std::size_t>(std::stoull(value));
      } else if (key == "embedding_dim") {
        config.embedding_dim = static_cast<std::size_t>(std::stoull(value));
      } else if (key == "max_in_flight") {
        config.max_in_flight = static_cast<std::size_t>(std::stoull(value));
      } else if (key == "bertscore") {
        config.bertscore = value == "true" || value == "1" || value == "on";
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("config line " + std::to_string(line_no) + ": invalid value for " + key);
    }
  }
  if (config.temperatures.empty()) throw UsageError("config requires at least one temperature");
  for (double t : config.temperatures) {
    if (t < 0.0 || t > 1.0) throw UsageError("temperatures must lie in [0, 1]");
  }
  if (config.methods.empty()) throw UsageError("config requires at least one method");
  return config;
}

namespace {

std::string format_metric(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

std::string format_cost(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.5f", value);
  return buffer;
}

}  // namespace

std::string render_table(std::span<const ResultRow> rows, TableFormat format, bool with_cost) {
  if (rows.empty()) throw EmptyRows();
  std::vector<std::string> header = {"Parameters", "Avg. length", "Rouge-1", "Rouge-2",
                                     "Rouge-L",    "BLEU",        "METEOR",  "BERTScore"};
  if (with_cost) header.push_back("Cost");

  std::vector<std::vector<std::string>> body;
  for (const ResultRow& row : rows) {
    std::vector<std::string> cells;
    cells.push_back(row.label);
    cells.push_back(format_metric(row.avg_length));
    cells.push_back(format_metric(row.rouge1 * 100.0));
    cells.push_back(format_metric(row.rouge2 * 100.0));
    cells.push_back(format_metric(row.rougeL * 100.0));
    cells.push_back(format_metric(row.bleu * 100.0));
    cells.push_back(format_metric(row.meteor));
    cells.push_back(format_metric(row.bertscore * 100.0));
    if (with_cost) cells.push_back(row.cost ? "$" + format_cost(*row.cost) : "");
    body.push_back(std::move(cells));
  }

  std::string out;
  if (format == TableFormat::Markdown) {
    auto emit_row = [&out](const std::vector<std::string>& cells) {
      out += "|";
      for (const std::string& cell : cells) {
        out += ' ';
        out += cell;
        out += " |";
      }
      out += '\n';
    };
    emit_row(header);
    out += "|";
    for (std::size_t i = 0; i < header.size(); ++i) out += "---|";
    out += '\n';
    for (const auto& cells : body) emit_row(cells);
  } else {
    auto emit_row = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += ',';
        const bool quote = cells[i].find(',') != std::string::npos;
        if (quote) out += '"';
        out += cells[i];
        if (quote) out += '"';
      }
      out += '\n';
    };
    emit_row(header);
    for (const auto& cells : body) emit_row(cells);
  }
  return out;
}

ExperimentRunner::ExperimentRunner(const Corpus& corpus, const ExperimentConfig& config,
                                   CompletionClient& client, EmbeddingProvider& embedder)
    : corpus_(corpus),
      config_(config),
      client_(client),
      embedder_(embedder),
      segmentations_(corpus.size()),
      labels_(corpus.size()) {
  summarizer_options_.policy.budget_tokens = config_.effective_budget();
  summarizer_options_.pricing_profile = config_.profile == "large" ? "large" : "small";
  summarizer_options_.max_in_flight = config_.max_in_flight;

  if (config_.classifier == ExperimentConfig::ClassifierSource::Model) {
    model_ = load_model(config_.classifier_path);
  } else if (config_.classifier == ExperimentConfig::ClassifierSource::Injected) {
    injected_ = load_injected_predictions(config_.classifier_path);
  }
}

const Segmentation& ExperimentRunner::segmentation_for(std::size_t doc_index) {
  if (!segmentations_[doc_index]) {
    C99Params params;
    params.mask_size = config_.mask_size;
    segmentations_[doc_index] = segment_document(corpus_[doc_index], embedder_, params);
  }
  return *segmentations_[doc_index];
}

const std::vector<SegmentLabel>& ExperimentRunner::labels_for(std::size_t doc_index) {
  if (!labels_[doc_index]) {
    const CaseDocument& doc = corpus_[doc_index];
    const Segmentation& segmentation = segmentation_for(doc_index);
    std::vector<SegmentLabel> labels;
    switch (config_.classifier) {
      case ExperimentConfig::ClassifierSource::Gold:
        labels = gold_labels(doc, segmentation);
        break;
      case ExperimentConfig::ClassifierSource::Model: {
        for (const EmbeddingVector& features : featurize_segments(doc, segmentation, embedder_)) {
          labels.push_back(predict_label(*model_, features).first);
        }
        break;
      }
      case ExperimentConfig::ClassifierSource::Injected: {
        const std::size_t count = segmentation.segment_count();
        for (std::size_t i = 0; i < count; ++i) {
          const auto it = injected_.find({doc.case_id, i});
          if (it == injected_.end()) {
            throw Error("missing injected prediction for " + doc.case_id + " segment " +
                        std::to_string(i));
          }
          labels.push_back(it->second);
        }
        break;
      }
    }
    labels_[doc_index] = std::move(labels);
  }
  return *labels_[doc_index];
}

ExperimentRunner::DocResult ExperimentRunner::run_document(std::size_t doc_index,
                                                           SummaryMethod method,
                                                           const GenerationParams& params) {
  const CaseDocument& doc = corpus_[doc_index];
  if (!doc.reference_summary) throw Error("document " + doc.case_id + " has no reference summary");

  Summarizer summarizer(client_, summarizer_options_);
  DocResult result;
  if (method == SummaryMethod::ArgSegments) {
    const Segmentation& segmentation = segmentation_for(doc_index);
    const std::vector<SegmentLabel>& labels = labels_for(doc_index);
    result.summary = summarizer.summarize_document(doc, method, params, &segmentation, labels);
  } else {
    result.summary = summarizer.summarize_document(doc, method, params);
  }

  EvalOptions eval_options;
  HashedBowProvider bert_provider(config_.embedding_dim, /*filter_tokens=*/false);
  if (config_.bertscore) eval_options.bert_provider = &bert_provider;
  result.eval = evaluate_pair(result.summary.final_summary, *doc.reference_summary, eval_options);
  return result;
}

GridResult ExperimentRunner::run_grid(SummaryMethod method) {
  const fs::path results_dir = fs::path(config_.out_dir) / "results";
  fs::create_directories(results_dir);

  const std::vector<std::size_t> max_tokens = config_.effective_max_tokens();

  struct Cell {
    double temperature;
    std::size_t max_tokens;
    // doc index -> (summary, eval); missing docs failed
    std::map<std::size_t, DocResult> results;
  };
  std::vector<Cell> cells;
  std::set<std::string> failed;

  for (std::size_t mt : max_tokens) {
    for (double t : config_.temperatures) {
      Cell cell{t, mt, {}};
      const fs::path cell_path = results_dir / cell_file_name(method, t, mt);

      // Resume: reload completed documents for this cell.
      std::map<std::string, DocResult> loaded;
      if (fs::exists(cell_path)) {
        std::ifstream in(cell_path);
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          const json record = json::parse(line);
          DocResult result;
          result.summary = summary_from_json(record.at("summary"));
          result.eval = eval_from_json(record.at("eval"));
          loaded[record.at("case_id").get<std::string>()] = std::move(result);
        }
      }

      std::ofstream out(cell_path, std::ios::app);
      for (std::size_t i = 0; i < corpus_.size(); ++i) {
        const std::string& id = corpus_[i].case_id;
        const auto it = loaded.find(id);
        if (it != loaded.end()) {
          cell.results.emplace(i, it->second);
          continue;
        }
        try {
          DocResult result = run_document(i, method, {t, mt});
          json record;
          record["case_id"] = id;
          record["method"] = to_string(method);
          record["temperature"] = t;
          record["max_tokens"] = mt;
          record["summary"] = summary_to_json(result.summary);
          record["eval"] = eval_to_json(result.eval);
          out << record.dump() << '\n';
          cell.results.emplace(i, std::move(result));
        } catch (const Error& ex) {
          failed.insert(id + ": " + ex.what());
        }
      }
      cells.push_back(std::move(cell));
    }
  }

  // A document that failed anywhere is dropped everywhere so every cell
  // averages over the same set.
  std::set<std::size_t> complete;
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    const bool everywhere = std::all_of(cells.begin(), cells.end(), [&](const Cell& cell) {
      return cell.results.count(i) > 0;
    });
    if (everywhere) complete.insert(i);
  }

  GridResult grid;
  grid.failed_docs.assign(failed.begin(), failed.end());
  grid.evaluated_docs = complete.size();

  for (const Cell& cell : cells) {
    ResultRow row;
    row.label = cell_label(cell.temperature, cell.max_tokens);
    if (!complete.empty()) {
      std::vector<EvalReport> reports;
      std::vector<std::pair<TokenSeq, std::vector<TokenSeq>>> bleu_pairs;
      double length = 0.0;
      for (std::size_t i : complete) {
        const DocResult& result = cell.results.at(i);
        reports.push_back(result.eval);
        length += static_cast<double>(result.eval.candidate_length);
        bleu_pairs.emplace_back(tokenize(result.summary.final_summary),
                                std::vector<TokenSeq>{tokenize(*corpus_[i].reference_summary)});
      }
      const EvalReport mean = average_reports(reports);
      row.avg_length = length / static_cast<double>(complete.size());
      row.rouge1 = mean.rouge1.f1;
      row.rouge2 = mean.rouge2.f1;
      row.rougeL = mean.rougeL.f1;
      row.bleu = mean.bleu;
      row.meteor = mean.meteor;
      row.bertscore = mean.bertscore ? mean.bertscore->f1 : 0.0;
      row.corpus_bleu = corpus_bleu(bleu_pairs);
    }
    grid.rows.push_back(row);
  }

  // Shaded average row: column-wise mean of the cell rows.
  ResultRow average;
  average.label = "Average";
  const double count = static_cast<double>(grid.rows.size());
  for (const ResultRow& row : grid.rows) {
    average.avg_length += row.avg_length;
    average.rouge1 += row.rouge1;
    average.rouge2 += row.rouge2;
    average.rougeL += row.rougeL;
    average.bleu += row.bleu;
    average.meteor += row.meteor;
    average.bertscore += row.bertscore;
    average.corpus_bleu += row.corpus_bleu;
  }
  average.avg_length /= count;
  average.rouge1 /= count;
  average.rouge2 /= count;
  average.rougeL /= count;
  average.bleu /= count;
  average.meteor /= count;
  average.bertscore /= count;
  average.corpus_bleu /= count;
  grid.rows.push_back(average);
  return grid;
}

GridResult ExperimentRunner::compare_methods() {
  const double temperature = config_.temperatures.front();
  const std::size_t max_tokens = config_.effective_max_tokens().front();

  GridResult comparison;
  std::set<std::string> failed;

  struct MethodRun {
    SummaryMethod method;
    std::map<std::size_t, DocResult> results;
    double total_cost = 0.0;
  };
  std::vector<MethodRun> runs;
  for (SummaryMethod method : config_.methods) {
    MethodRun run{method, {}, 0.0};
    for (std::size_t i = 0; i < corpus_.size(); ++i) {
      try {
        run.results.emplace(i, run_document(i, method, {temperature, max_tokens}));
      } catch (const Error& ex) {
        failed.insert(corpus_[i].case_id + ": " + ex.what());
      }
    }
    runs.push_back(std::move(run));
  }

  std::set<std::size_t> complete;
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    const bool everywhere = std::all_of(runs.begin(), runs.end(), [&](const MethodRun& run) {
      return run.results.count(i) > 0;
    });
    if (everywhere) complete.insert(i);
  }

  comparison.failed_docs.assign(failed.begin(), failed.end());
  comparison.evaluated_docs = complete.size();

  for (const MethodRun& run : runs) {
    ResultRow row;
    row.label = to_string(run.method);
    double total_cost = 0.0;
    if (!complete.empty()) {
      std::vector<EvalReport> reports;
      std::vector<std::pair<TokenSeq, std::vector<TokenSeq>>> bleu_pairs;
      double length = 0.0;
      for (std::size_t i : complete) {
        const DocResult& result = run.results.at(i);
        reports.push_back(result.eval);
        length += static_cast<double>(result.eval.candidate_length);
        total_cost += result.summary.cost;
        bleu_pairs.emplace_back(tokenize(result.summary.final_summary),
                                std::vector<TokenSeq>{tokenize(*corpus_[i].reference_summary)});
      }
      const EvalReport mean = average_reports(reports);
      row.avg_length = length / static_cast<double>(complete.size());
      row.rouge1 = mean.rouge1.f1;
      row.rouge2 = mean.rouge2.f1;
      row.rougeL = mean.rougeL.f1;
      row.bleu = mean.bleu;
      row.meteor = mean.meteor;
      row.bertscore = mean.bertscore ? mean.bertscore->f1 : 0.0;
      row.corpus_bleu = corpus_bleu(bleu_pairs);
    }
    row.cost = total_cost;
    comparison.rows.push_back(row);
  }
  return comparison;
}

void ExperimentRunner::write_reports(
    const std::vector<std::pair<std::string, GridResult>>& sections) const {
  fs::create_directories(config_.out_dir);

  std::string md;
  std::string csv;
  for (const auto& [title, grid] : sections) {
    const bool with_cost =
        std::any_of(grid.rows.begin(), grid.rows.end(),
                    [](const ResultRow& row) { return row.cost.has_value(); });
    md += "## " + title + "\n\n";
    md += render_table(grid.rows, TableFormat::Markdown, with_cost);
    md += "\nCorpus-level BLEU per row: ";
    for (std::size_t i = 0; i < grid.rows.size(); ++i) {
      if (i > 0) md += ", ";
      md += grid.rows[i].label + " " + format_metric(grid.rows[i].corpus_bleu * 100.0);
    }
    md += "\n\nDocuments evaluated: " + std::to_string(grid.evaluated_docs) + "\n";
    if (!grid.failed_docs.empty()) {
      md += "Excluded documents:\n";
      for (const std::string& failure : grid.failed_docs) md += "- " + failure + "\n";
    }
    md += "\n";

    csv += render_table(grid.rows, TableFormat::Csv, with_cost);
    csv += "\n";
  }
  md += "Token counts use the built-in tokenizer (word runs plus punctuation marks).\n";

  std::ofstream md_file(fs::path(config_.out_dir) / "report.md");
  if (!md_file) throw Error("cannot write report.md under " + config_.out_dir);
  md_file << md;
  std::ofstream csv_file(fs::path(config_.out_dir) / "report.csv");
  if (!csv_file) throw Error("cannot write report.csv under " + config_.out_dir);
  csv_file << csv;
}

}  // namespace argpipe
