#include "argpipe/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "argpipe/completion.hpp"
#include "argpipe/corpus.hpp"
#include "argpipe/embedding.hpp"
#include "argpipe/errors.hpp"
#include "argpipe/experiment.hpp"
#include "argpipe/labeler.hpp"
#include "argpipe/metrics.hpp"
#include "argpipe/segmenter.hpp"
#include "argpipe/summarizer.hpp"
#include "argpipe/tokenizer.hpp"

namespace argpipe {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
  std::string out_dir = ".";
  std::string api_key_env = "ARGPIPE_API_KEY";
  std::uint64_t seed = 7;
  bool json_output = false;
  int verbosity = 0;
};

fs::path resolve_out(const GlobalOptions& globals, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return p;
  return fs::path(globals.out_dir) / p;
}

std::ofstream open_out(const GlobalOptions& globals, const std::string& path) {
  const fs::path resolved = resolve_out(globals, path);
  if (resolved.has_parent_path()) fs::create_directories(resolved.parent_path());
  std::ofstream out(resolved);
  if (!out) throw Error("cannot open output file: " + resolved.string());
  return out;
}

std::unique_ptr<EmbeddingProvider> make_embedder(const GlobalOptions& globals,
                                                 const std::string& provider,
                                                 const std::string& endpoint, std::size_t dim) {
  if (provider == "builtin") return std::make_unique<HashedBowProvider>(dim);
  if (provider == "http") {
    if (endpoint.empty()) throw UsageError("--endpoint is required with --provider http");
    HttpEmbeddingProvider::Options options;
    options.base_url = endpoint;
    options.api_key_env = globals.api_key_env;
    return std::make_unique<HttpEmbeddingProvider>(std::move(options));
  }
  throw UsageError("unknown embedding provider '" + provider + "' (expected builtin|http)");
}

std::unique_ptr<CompletionClient> make_completion_client(const GlobalOptions& globals,
                                                         const std::string& provider,
                                                         const std::string& endpoint) {
  if (provider == "mock") return std::make_unique<MockCompletionClient>();
  if (provider == "http") {
    if (endpoint.empty()) throw UsageError("--endpoint is required with --provider http");
    HttpCompletionClient::Options options;
    options.base_url = endpoint;
    options.api_key_env = globals.api_key_env;
    return std::make_unique<HttpCompletionClient>(std::move(options));
  }
  throw UsageError("unknown completion provider '" + provider + "' (expected mock|http)");
}

std::map<std::string, std::size_t> corpus_index(const Corpus& corpus) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index[corpus[i].case_id] = i;
  return index;
}

void write_segmentations(std::ostream& out, const std::vector<Segmentation>& segmentations) {
  for (const Segmentation& s : segmentations) {
    json record;
    record["case_id"] = s.doc_id;
    record["boundaries"] = s.boundaries;
    out << record.dump() << '\n';
  }
}

std::vector<Segmentation> load_segmentations(const std::string& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open segments file: " + path);
  const auto index = corpus_index(corpus);
  std::map<std::string, std::vector<std::size_t>> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& ex) {
      throw MalformedRecord(line_no, ex.what());
    }
    by_id[record.at("case_id").get<std::string>()] =
        record.at("boundaries").get<std::vector<std::size_t>>();
  }
  std::vector<Segmentation> segmentations;
  for (const CaseDocument& doc : corpus) {
    const auto it = by_id.find(doc.case_id);
    if (it == by_id.end()) throw Error("segments file lacks document " + doc.case_id);
    Segmentation s;
    s.doc_id = doc.case_id;
    s.sentence_count = doc.sentences.size();
    s.boundaries = it->second;
    std::size_t prev = 0;
    for (std::size_t b : s.boundaries) {
      if (b <= prev || b >= s.sentence_count) {
        throw Error("invalid boundary " + std::to_string(b) + " for document " + doc.case_id);
      }
      prev = b;
    }
    segmentations.push_back(std::move(s));
  }
  return segmentations;
}

// Segmentations for the whole corpus: from a file when given, otherwise C99
// with automatic termination over the builtin embeddings.
std::vector<Segmentation> segmentations_for(const Corpus& corpus, const std::string& segments_file,
                                            EmbeddingProvider& embedder, const C99Params& params) {
  if (!segments_file.empty()) return load_segmentations(segments_file, corpus);
  std::vector<Segmentation> segmentations;
  for (const CaseDocument& doc : corpus) {
    segmentations.push_back(segment_document(doc, embedder, params));
  }
  return segmentations;
}

std::vector<std::vector<SegmentLabel>> load_label_file(const std::string& path,
                                                       const Corpus& corpus,
                                                       const std::vector<Segmentation>& segs) {
  const PredictionMap predictions = load_injected_predictions(path);
  std::vector<std::vector<SegmentLabel>> labels;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    std::vector<SegmentLabel> doc_labels;
    for (std::size_t i = 0; i < segs[d].segment_count(); ++i) {
      const auto it = predictions.find({corpus[d].case_id, i});
      if (it == predictions.end()) {
        throw Error("labels file lacks " + corpus[d].case_id + " segment " + std::to_string(i));
      }
      doc_labels.push_back(it->second);
    }
    labels.push_back(std::move(doc_labels));
  }
  return labels;
}

int cmd_ingest(const GlobalOptions& globals, const std::string& path) {
  const Corpus corpus = ingest_corpus(path);
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  for (const CaseDocument& doc : corpus) {
    sentences += doc.sentences.size();
    tokens += doc.token_count;
  }
  if (globals.json_output) {
    json out;
    out["documents"] = corpus.size();
    out["sentences"] = sentences;
    out["tokens"] = tokens;
    std::cout << out.dump() << '\n';
  } else {
    std::cout << "ingested " << corpus.size() << " documents (" << sentences << " sentences, "
              << tokens << " tokens) from " << path << '\n';
  }
  return 0;
}

int cmd_stats(const GlobalOptions& globals, const std::string& path) {
  const Corpus corpus = ingest_corpus(path);
  const CorpusStats stats = corpus_stats(corpus);
  if (globals.json_output) {
    auto field = [](const FieldStats& f) {
      return json{{"count", f.count}, {"avg", f.avg}, {"max", f.max}, {"min", f.min}};
    };
    json out;
    out["documents"] = field(stats.documents);
    out["summaries"] = field(stats.summaries);
    std::cout << out.dump() << '\n';
    return 0;
  }
  auto row = [](const std::string& type, const FieldStats& f) {
    char buffer[160];
    std::snprintf(buffer, sizeof(buffer), "%-24s %16.2f %18zu %18zu", type.c_str(), f.avg, f.max,
                  f.min);
    return std::string(buffer);
  };
  std::printf("%-24s %16s %18s %18s\n", "Type", "Avg. # of tokens", "Max. # of tokens",
              "Min. # of tokens");
  std::cout << row("Court decision", stats.documents) << '\n';
  if (stats.summaries.count > 0) {
    std::cout << row("Human-written summary", stats.summaries) << '\n';
  }
  return 0;
}

int cmd_split(const GlobalOptions& globals, const std::string& path, std::uint64_t seed,
              const std::string& out_dir) {
  const Corpus corpus = ingest_corpus(path);
  const CorpusSplit split = split_corpus(corpus, SplitRatios{}, seed);

  const auto index = corpus_index(corpus);
  auto write_part = [&](const std::string& name, const std::vector<std::string>& ids) {
    Corpus part;
    for (const std::string& id : ids) part.push_back(corpus[index.at(id)]);
    const fs::path dir = resolve_out(globals, out_dir);
    fs::create_directories(dir);
    write_corpus_file(part, (dir / (name + ".jsonl")).string());
  };
  write_part("train", split.train);
  write_part("validation", split.validation);
  write_part("test", split.test);

  json manifest;
  manifest["seed"] = split.seed;
  manifest["train"] = split.train;
  manifest["validation"] = split.validation;
  manifest["test"] = split.test;
  std::ofstream manifest_file(resolve_out(globals, out_dir) / "split.json");
  manifest_file << manifest.dump(2) << '\n';

  if (globals.json_output) {
    json out;
    out["train"] = split.train.size();
    out["validation"] = split.validation.size();
    out["test"] = split.test.size();
    std::cout << out.dump() << '\n';
  } else {
    std::cout << "split " << corpus.size() << " documents into " << split.train.size() << "/"
              << split.validation.size() << "/" << split.test.size()
              << " (train/validation/test), seed " << seed << '\n';
  }
  return 0;
}

int cmd_segment(const GlobalOptions& globals, const std::string& path,
                std::optional<std::size_t> target, std::size_t mask, const std::string& provider,
                const std::string& endpoint, std::size_t dim, const std::string& out_file) {
  const Corpus corpus = ingest_corpus(path);
  const auto embedder = make_embedder(globals, provider, endpoint, dim);
  C99Params params;
  params.mask_size = mask;
  params.target_segments = target;

  std::vector<Segmentation> segmentations;
  for (const CaseDocument& doc : corpus) {
    segmentations.push_back(segment_document(doc, *embedder, params));
  }
  if (out_file.empty()) {
    write_segmentations(std::cout, segmentations);
  } else {
    auto out = open_out(globals, out_file);
    write_segmentations(out, segmentations);
  }
  return 0;
}

void write_label_lines(std::ostream& out, const Corpus& corpus,
                       const std::vector<Segmentation>& segs,
                       const std::vector<std::vector<SegmentLabel>>& labels,
                       const std::vector<std::vector<double>>* scores) {
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (std::size_t i = 0; i < labels[d].size(); ++i) {
      json record;
      record["case_id"] = corpus[d].case_id;
      record["segment_index"] = i;
      record["label"] = labels[d][i] == SegmentLabel::Argumentative ? 1 : 0;
      if (scores != nullptr) record["score"] = (*scores)[d][i];
      const auto span = segs[d].spans()[i];
      record["span"] = json::array({span.begin, span.end});
      out << record.dump() << '\n';
    }
  }
}

void print_segmentation_stats(const GlobalOptions& globals,
                              const std::vector<std::vector<SegmentLabel>>& labels) {
  const SegmentationStats stats = segmentation_stats(labels);
  if (globals.json_output) {
    auto row = [](const SegmentCountStats& s) {
      return json{{"avg", s.avg}, {"max", s.max}, {"min", s.min}};
    };
    json out;
    out["argumentative"] = row(stats.argumentative);
    out["non_argumentative"] = row(stats.non_argumentative);
    out["total"] = row(stats.total);
    std::cout << out.dump() << '\n';
    return;
  }
  auto row = [](const std::string& type, const SegmentCountStats& s) {
    std::printf("%-28s %18.2f %18zu %18zu\n", type.c_str(), s.avg, s.max, s.min);
  };
  std::printf("%-28s %18s %18s %18s\n", "Type", "Avg. # of segments", "Max. # of segments",
              "Min. # of segments");
  row("Argumentative segmentation", stats.argumentative);
  row("Non-argumentative segmentation", stats.non_argumentative);
  row("Total", stats.total);
}

int cmd_label(const GlobalOptions& globals, const std::string& path,
              const std::string& segments_file, bool gold, bool with_stats, std::size_t mask,
              std::size_t dim, const std::string& out_file) {
  if (!gold) throw UsageError("label currently requires --gold (use predict for model labels)");
  const Corpus corpus = ingest_corpus(path);
  HashedBowProvider embedder(dim);
  C99Params params;
  params.mask_size = mask;
  const auto segs = segmentations_for(corpus, segments_file, embedder, params);

  std::vector<std::vector<SegmentLabel>> labels;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    labels.push_back(gold_labels(corpus[d], segs[d]));
  }
  if (!out_file.empty()) {
    auto out = open_out(globals, out_file);
    write_label_lines(out, corpus, segs, labels, nullptr);
    if (with_stats) print_segmentation_stats(globals, labels);
  } else if (with_stats) {
    print_segmentation_stats(globals, labels);
  } else {
    write_label_lines(std::cout, corpus, segs, labels, nullptr);
  }
  return 0;
}

int cmd_train(const GlobalOptions& globals, const std::string& path,
              const std::string& segments_file, const TrainParams& params, std::size_t mask,
              std::size_t dim, const std::string& model_out) {
  const Corpus corpus = ingest_corpus(path);
  HashedBowProvider embedder(dim);
  C99Params c99;
  c99.mask_size = mask;
  const auto segs = segmentations_for(corpus, segments_file, embedder, c99);

  std::vector<TrainingExample> examples;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto features = featurize_segments(corpus[d], segs[d], embedder);
    const auto labels = gold_labels(corpus[d], segs[d]);
    for (std::size_t i = 0; i < features.size(); ++i) {
      examples.push_back({features[i], labels[i]});
    }
  }
  const ClassifierModel model = train_classifier(examples, params, embedder.name());
  const fs::path model_path = resolve_out(globals, model_out);
  if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
  save_model(model, model_path.string());

  if (globals.json_output) {
    json out;
    out["examples"] = examples.size();
    out["epochs_run"] = model.loss_history.size();
    out["final_loss"] = model.loss_history.empty() ? 0.0 : model.loss_history.back();
    std::cout << out.dump() << '\n';
  } else {
    std::cout << "trained on " << examples.size() << " segments; final loss "
              << (model.loss_history.empty() ? 0.0 : model.loss_history.back()) << "; model -> "
              << resolve_out(globals, model_out).string() << '\n';
  }
  return 0;
}

int cmd_predict(const GlobalOptions& globals, const std::string& path,
                const std::string& segments_file, const std::string& model_path, double threshold,
                std::size_t mask, std::size_t dim, const std::string& out_file) {
  const Corpus corpus = ingest_corpus(path);
  HashedBowProvider embedder(dim);
  C99Params c99;
  c99.mask_size = mask;
  const auto segs = segmentations_for(corpus, segments_file, embedder, c99);
  const ClassifierModel model = load_model(model_path);
  if (model.feature_spec != embedder.name()) {
    throw DimensionMismatch(model.weights.size(), embedder.dimension());
  }

  std::vector<std::vector<SegmentLabel>> labels(corpus.size());
  std::vector<std::vector<double>> scores(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const EmbeddingVector& features : featurize_segments(corpus[d], segs[d], embedder)) {
      const auto [label, score] = predict_label(model, features, threshold);
      labels[d].push_back(label);
      scores[d].push_back(score);
    }
  }
  if (out_file.empty()) {
    write_label_lines(std::cout, corpus, segs, labels, &scores);
  } else {
    auto out = open_out(globals, out_file);
    write_label_lines(out, corpus, segs, labels, &scores);
  }
  return 0;
}

int cmd_eval_classifier(const GlobalOptions& globals, const std::string& path,
                        const std::string& segments_file, const std::string& predictions_file,
                        std::size_t mask, std::size_t dim) {
  const Corpus corpus = ingest_corpus(path);
  HashedBowProvider embedder(dim);
  C99Params c99;
  c99.mask_size = mask;
  const auto segs = segmentations_for(corpus, segments_file, embedder, c99);
  const auto predicted = load_label_file(predictions_file, corpus, segs);

  std::vector<std::pair<SegmentLabel, SegmentLabel>> pairs;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto gold = gold_labels(corpus[d], segs[d]);
    for (std::size_t i = 0; i < gold.size(); ++i) pairs.emplace_back(gold[i], predicted[d][i]);
  }
  const ClassificationReport report = evaluate_classifier(pairs);

  if (globals.json_output) {
    auto scores = [](const ClassScores& s) {
      return json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
    };
    json out;
    out["argumentative"] = scores(report.argumentative);
    out["non_argumentative"] = scores(report.non_argumentative);
    out["macro_f1"] = report.macro_f1;
    out["confusion"] = {{"tp", report.tp}, {"fp", report.fp}, {"fn", report.fn}, {"tn", report.tn}};
    std::cout << out.dump() << '\n';
  } else {
    std::printf("segments evaluated: %zu\n", report.total());
    std::printf("argumentative     P %.4f  R %.4f  F1 %.4f\n", report.argumentative.precision,
                report.argumentative.recall, report.argumentative.f1);
    std::printf("non-argumentative P %.4f  R %.4f  F1 %.4f\n", report.non_argumentative.precision,
                report.non_argumentative.recall, report.non_argumentative.f1);
    std::printf("macro F1 %.4f\n", report.macro_f1);
    std::printf("confusion tp=%zu fp=%zu fn=%zu tn=%zu\n", report.tp, report.fp, report.fn,
                report.tn);
  }
  return 0;
}

int cmd_summarize(const GlobalOptions& globals, const std::string& path, const std::string& method,
                  double temperature, std::size_t max_tokens, std::size_t budget,
                  const std::string& provider, const std::string& endpoint,
                  const std::string& segments_file, const std::string& labels_file,
                  std::size_t mask, std::size_t dim, std::size_t max_in_flight,
                  const std::string& out_file) {
  const Corpus corpus = ingest_corpus(path);
  const SummaryMethod summary_method =
      method == "baseline" ? SummaryMethod::BaselineChunks
                           : (method == "argseg" ? SummaryMethod::ArgSegments
                                                 : throw UsageError("method must be baseline|argseg"));

  const auto client = make_completion_client(globals, provider, endpoint);
  SummarizerOptions options;
  options.policy.budget_tokens = budget;
  options.pricing_profile = budget > TokenBudgetPolicy::small_profile().budget_tokens
                                ? "large"
                                : "small";
  options.max_in_flight = max_in_flight;
  Summarizer summarizer(*client, options);

  std::vector<Segmentation> segs;
  std::vector<std::vector<SegmentLabel>> labels;
  if (summary_method == SummaryMethod::ArgSegments) {
    HashedBowProvider embedder(dim);
    C99Params c99;
    c99.mask_size = mask;
    segs = segmentations_for(corpus, segments_file, embedder, c99);
    if (!labels_file.empty()) {
      labels = load_label_file(labels_file, corpus, segs);
    } else {
      for (std::size_t d = 0; d < corpus.size(); ++d) {
        labels.push_back(gold_labels(corpus[d], segs[d]));
      }
    }
  }

  std::ostringstream buffer;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    SummaryRecord record;
    if (summary_method == SummaryMethod::ArgSegments) {
      record = summarizer.summarize_document(corpus[d], summary_method,
                                             {temperature, max_tokens}, &segs[d], labels[d]);
    } else {
      record = summarizer.summarize_document(corpus[d], summary_method, {temperature, max_tokens});
    }
    json line;
    line["case_id"] = record.doc_id;
    line["method"] = to_string(record.method);
    line["parts"] = record.parts;
    line["final_summary"] = record.final_summary;
    line["usage"] = {{"prompt_tokens", record.total_usage.prompt_tokens},
                     {"completion_tokens", record.total_usage.completion_tokens}};
    line["cost"] = record.cost;
    buffer << line.dump() << '\n';
  }
  if (out_file.empty()) {
    std::cout << buffer.str();
  } else {
    auto out = open_out(globals, out_file);
    out << buffer.str();
  }
  return 0;
}

std::map<std::string, std::string> load_text_by_id(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::map<std::string, std::string> texts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& ex) {
      throw MalformedRecord(line_no, ex.what());
    }
    const std::string id = record.at("case_id").get<std::string>();
    if (record.contains("text") && record["text"].is_string()) {
      texts[id] = record["text"].get<std::string>();
    } else if (record.contains("final_summary") && record["final_summary"].is_string()) {
      texts[id] = record["final_summary"].get<std::string>();
    } else if (record.contains("reference_summary") && record["reference_summary"].is_string()) {
      texts[id] = record["reference_summary"].get<std::string>();
    } else {
      throw MalformedRecord(line_no, "expected text, final_summary, or reference_summary");
    }
  }
  return texts;
}

int cmd_score(const GlobalOptions& globals, const std::string& candidates_file,
              const std::string& references_file, const std::string& out_file, std::size_t dim,
              bool with_bert) {
  const auto candidates = load_text_by_id(candidates_file);
  const auto references = load_text_by_id(references_file);

  HashedBowProvider bert_provider(dim, /*filter_tokens=*/false);
  EvalOptions options;
  if (with_bert) options.bert_provider = &bert_provider;

  std::vector<std::pair<std::string, EvalReport>> reports;
  std::vector<EvalReport> flat;
  for (const auto& [id, candidate] : candidates) {
    const auto ref = references.find(id);
    if (ref == references.end()) throw Error("no reference for case " + id);
    EvalReport report = evaluate_pair(candidate, ref->second, options);
    flat.push_back(report);
    reports.emplace_back(id, std::move(report));
  }
  if (reports.empty()) throw Error("no candidate/reference pairs to score");
  const EvalReport aggregate = average_reports(flat);

  auto prf = [](const Prf& p) {
    return json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
  };
  auto to_json = [&prf](const EvalReport& r) {
    json out;
    out["rouge1"] = prf(r.rouge1);
    out["rouge2"] = prf(r.rouge2);
    out["rougeL"] = prf(r.rougeL);
    out["bleu"] = r.bleu;
    out["meteor"] = r.meteor;
    out["bertscore"] = r.bertscore ? prf(*r.bertscore) : json(nullptr);
    out["candidate_length"] = r.candidate_length;
    return out;
  };

  const bool csv = out_file.size() >= 4 && out_file.substr(out_file.size() - 4) == ".csv";
  std::string rendered;
  if (csv) {
    rendered = "case_id,length,rouge1,rouge2,rougeL,bleu,meteor,bertscore\n";
    auto line = [&rendered](const std::string& id, const EvalReport& r) {
      char buffer[256];
      std::snprintf(buffer, sizeof(buffer), "%s,%zu,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f\n", id.c_str(),
                    r.candidate_length, r.rouge1.f1 * 100.0, r.rouge2.f1 * 100.0,
                    r.rougeL.f1 * 100.0, r.bleu * 100.0, r.meteor,
                    r.bertscore ? r.bertscore->f1 * 100.0 : 0.0);
      rendered += buffer;
    };
    for (const auto& [id, report] : reports) line(id, report);
    line("average", aggregate);
  } else {
    json out;
    out["pairs"] = json::array();
    for (const auto& [id, report] : reports) {
      json entry;
      entry["case_id"] = id;
      entry["scores"] = to_json(report);
      out["pairs"].push_back(std::move(entry));
    }
    out["average"] = to_json(aggregate);
    rendered = out.dump(2) + "\n";
  }

  if (out_file.empty()) {
    std::cout << rendered;
  } else {
    auto out = open_out(globals, out_file);
    out << rendered;
    if (globals.verbosity > 0) {
      std::cout << "wrote " << resolve_out(globals, out_file).string() << '\n';
    }
  }
  return 0;
}

int cmd_experiment(const GlobalOptions& globals, const std::string& config_path) {
  ExperimentConfig config = load_experiment_config(config_path);
  config.out_dir = resolve_out(globals, config.out_dir).string();
  const Corpus corpus = ingest_corpus(config.corpus_path);

  const auto client = make_completion_client(globals, config.provider, config.endpoint);
  HashedBowProvider embedder(config.embedding_dim);
  ExperimentRunner runner(corpus, config, *client, embedder);

  std::vector<std::pair<std::string, GridResult>> sections;
  for (SummaryMethod method : config.methods) {
    GridResult grid = runner.run_grid(method);
    sections.emplace_back(std::string("Grid: ") + to_string(method), std::move(grid));
  }
  if (config.methods.size() > 1) {
    sections.emplace_back("Method comparison", runner.compare_methods());
  }
  runner.write_reports(sections);

  if (globals.json_output) {
    json out;
    out["report_md"] = (fs::path(config.out_dir) / "report.md").string();
    out["report_csv"] = (fs::path(config.out_dir) / "report.csv").string();
    std::cout << out.dump() << '\n';
  } else {
    std::cout << "experiment complete; reports under " << config.out_dir << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"argumentative segmentation, classification, summarization, and scoring"};
  app.require_subcommand(1);

  GlobalOptions globals;
  app.add_option("--out-dir", globals.out_dir, "Directory that receives all outputs");
  app.add_option("--api-key-env", globals.api_key_env,
                 "Environment variable holding the provider API key");
  app.add_option("--seed", globals.seed, "Seed for all randomized steps");
  app.add_flag("--json", globals.json_output, "Machine-readable output");
  app.add_flag("-v,--verbose", globals.verbosity, "Verbose progress output");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus file");
  std::string ingest_path;
  ingest->add_option("path", ingest_path, "Corpus JSONL file")->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Token statistics for documents and summaries");
  std::string stats_path;
  stats->add_option("path", stats_path, "Corpus JSONL file")->required();

  // split
  auto* split = app.add_subcommand("split", "Shuffle and slice into train/validation/test");
  std::string split_path, split_out = "split";
  std::uint64_t split_seed = 0;
  bool split_seed_given = false;
  split->add_option("path", split_path, "Corpus JSONL file")->required();
  split->add_option("--seed", split_seed, "Shuffle seed")->each([&](const std::string&) {
    split_seed_given = true;
  });
  split->add_option("--out", split_out, "Output directory for the three parts");

  // segment
  auto* segment = app.add_subcommand("segment", "C99 segmentation over sentence embeddings");
  std::string segment_path, segment_provider = "builtin", segment_endpoint, segment_out;
  std::size_t segment_mask = 11, segment_dim = 512;
  long long segment_target = -1;
  bool segment_auto = false;
  segment->add_option("corpus", segment_path, "Corpus JSONL file")->required();
  segment->add_option("--segments", segment_target, "Fixed number of segments per document");
  segment->add_flag("--auto", segment_auto, "Automatic termination (default)");
  segment->add_option("--mask", segment_mask, "Rank mask size (odd, >= 3)");
  segment->add_option("--provider", segment_provider, "builtin|http");
  segment->add_option("--endpoint", segment_endpoint, "Embedding service base URL");
  segment->add_option("--dim", segment_dim, "Builtin embedding dimension");
  segment->add_option("--out", segment_out, "Output file (default stdout)");

  // label
  auto* label = app.add_subcommand("label", "Gold argumentativeness labels for segments");
  std::string label_path, label_segments, label_out;
  std::size_t label_mask = 11, label_dim = 512;
  bool label_gold = false, label_stats = false;
  label->add_option("corpus", label_path, "Corpus JSONL file")->required();
  label->add_flag("--gold", label_gold, "Rule-based labels from IRC annotations");
  label->add_flag("--stats", label_stats, "Print per-corpus segment count statistics");
  label->add_option("--segments-file", label_segments, "Precomputed segmentation file");
  label->add_option("--mask", label_mask, "Rank mask size when segmenting on the fly");
  label->add_option("--dim", label_dim, "Builtin embedding dimension");
  label->add_option("--out", label_out, "Output file (default stdout)");

  // train
  auto* train = app.add_subcommand("train", "Train the segment classifier");
  std::string train_path, train_segments, train_model_out = "model.json";
  TrainParams train_params;
  std::size_t train_mask = 11, train_dim = 512;
  bool train_no_weighting = false;
  train->add_option("corpus", train_path, "Corpus JSONL file")->required();
  train->add_option("--segments-file", train_segments, "Precomputed segmentation file");
  train->add_option("--epochs", train_params.epochs, "Training epochs");
  train->add_option("--lr", train_params.learning_rate, "Learning rate");
  train->add_option("--l2", train_params.l2, "L2 regularization strength");
  train->add_option("--seed", train_params.seed, "Training seed");
  train->add_flag("--no-class-weighting", train_no_weighting,
                  "Disable inverse-frequency class weights");
  train->add_option("--mask", train_mask, "Rank mask size when segmenting on the fly");
  train->add_option("--dim", train_dim, "Builtin embedding dimension");
  train->add_option("--model-out", train_model_out, "Model output path");

  // predict
  auto* predict = app.add_subcommand("predict", "Predict segment labels with a trained model");
  std::string predict_path, predict_segments, predict_model, predict_out;
  double predict_threshold = 0.5;
  std::size_t predict_mask = 11, predict_dim = 512;
  predict->add_option("corpus", predict_path, "Corpus JSONL file")->required();
  predict->add_option("--model", predict_model, "Model file")->required();
  predict->add_option("--segments-file", predict_segments, "Precomputed segmentation file");
  predict->add_option("--threshold", predict_threshold, "Decision threshold");
  predict->add_option("--mask", predict_mask, "Rank mask size when segmenting on the fly");
  predict->add_option("--dim", predict_dim, "Builtin embedding dimension");
  predict->add_option("--out", predict_out, "Output file (default stdout)");

  // eval-classifier
  auto* eval_cls = app.add_subcommand("eval-classifier", "Score predictions against gold labels");
  std::string eval_path, eval_segments, eval_predictions;
  std::size_t eval_mask = 11, eval_dim = 512;
  eval_cls->add_option("corpus", eval_path, "Corpus JSONL file")->required();
  eval_cls->add_option("--predictions", eval_predictions, "Predicted labels file")->required();
  eval_cls->add_option("--segments-file", eval_segments, "Precomputed segmentation file");
  eval_cls->add_option("--mask", eval_mask, "Rank mask size when segmenting on the fly");
  eval_cls->add_option("--dim", eval_dim, "Builtin embedding dimension");

  // summarize
  auto* summarize = app.add_subcommand("summarize", "Generate summaries per document");
  std::string summarize_path, summarize_method = "baseline", summarize_provider = "mock";
  std::string summarize_endpoint, summarize_segments, summarize_labels, summarize_out;
  double summarize_temperature = 0.0;
  std::size_t summarize_max_tokens = 128, summarize_budget = 2500;
  std::size_t summarize_mask = 11, summarize_dim = 512, summarize_in_flight = 1;
  summarize->add_option("corpus", summarize_path, "Corpus JSONL file")->required();
  summarize->add_option("--method", summarize_method, "baseline|argseg");
  summarize->add_option("--temperature", summarize_temperature, "Sampling temperature in [0, 1]");
  summarize->add_option("--max-tokens", summarize_max_tokens, "Max completion tokens");
  summarize->add_option("--budget", summarize_budget, "Prompt token budget");
  summarize->add_option("--provider", summarize_provider, "mock|http");
  summarize->add_option("--endpoint", summarize_endpoint, "Completion service base URL");
  summarize->add_option("--segments-file", summarize_segments, "Precomputed segmentation file");
  summarize->add_option("--labels-file", summarize_labels, "Predicted labels file");
  summarize->add_option("--mask", summarize_mask, "Rank mask size when segmenting on the fly");
  summarize->add_option("--dim", summarize_dim, "Builtin embedding dimension");
  summarize->add_option("--max-in-flight", summarize_in_flight, "Concurrent provider calls");
  summarize->add_option("--out", summarize_out, "Output file (default stdout)");

  // score
  auto* score = app.add_subcommand("score", "Automatic metrics for candidate/reference pairs");
  std::string score_candidates, score_references, score_out;
  std::size_t score_dim = 512;
  bool score_no_bert = false;
  score->add_option("--candidates", score_candidates, "Candidate summaries JSONL")->required();
  score->add_option("--references", score_references, "Reference summaries JSONL")->required();
  score->add_option("--out", score_out, "report.json or report.csv (default stdout JSON)");
  score->add_option("--dim", score_dim, "BERTScore embedding dimension");
  score->add_flag("--no-bertscore", score_no_bert, "Skip BERTScore");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Parameter-grid experiment runner");
  std::string experiment_config;
  experiment->add_option("--config", experiment_config, "Flat key=value config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << '\n';
    return 2;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(globals, ingest_path);
    if (stats->parsed()) return cmd_stats(globals, stats_path);
    if (split->parsed()) {
      return cmd_split(globals, split_path, split_seed_given ? split_seed : globals.seed,
                       split_out);
    }
    if (segment->parsed()) {
      std::optional<std::size_t> target;
      if (segment_target >= 0) {
        if (segment_auto) throw UsageError("--segments and --auto are mutually exclusive");
        target = static_cast<std::size_t>(segment_target);
      }
      return cmd_segment(globals, segment_path, target, segment_mask, segment_provider,
                         segment_endpoint, segment_dim, segment_out);
    }
    if (label->parsed()) {
      return cmd_label(globals, label_path, label_segments, label_gold, label_stats, label_mask,
                       label_dim, label_out);
    }
    if (train->parsed()) {
      train_params.class_weighting = !train_no_weighting;
      return cmd_train(globals, train_path, train_segments, train_params, train_mask, train_dim,
                       train_model_out);
    }
    if (predict->parsed()) {
      return cmd_predict(globals, predict_path, predict_segments, predict_model,
                         predict_threshold, predict_mask, predict_dim, predict_out);
    }
    if (eval_cls->parsed()) {
      return cmd_eval_classifier(globals, eval_path, eval_segments, eval_predictions, eval_mask,
                                 eval_dim);
    }
    if (summarize->parsed()) {
      return cmd_summarize(globals, summarize_path, summarize_method, summarize_temperature,
                           summarize_max_tokens, summarize_budget, summarize_provider,
                           summarize_endpoint, summarize_segments, summarize_labels,
                           summarize_mask, summarize_dim, summarize_in_flight, summarize_out);
    }
    if (score->parsed()) {
      return cmd_score(globals, score_candidates, score_references, score_out, score_dim,
                       !score_no_bert);
    }
    if (experiment->parsed()) return cmd_experiment(globals, experiment_config);
    throw UsageError("no subcommand given");
  } catch (const UsageError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("argpipe");
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace argpipe
