#include "argpipe/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "argpipe/tokenizer.hpp"

namespace argpipe {

using nlohmann::json;

const char* to_string(IrcLabel label) {
  switch (label) {
    case IrcLabel::Issue: return "issue";
    case IrcLabel::Reason: return "reason";
    case IrcLabel::Conclusion: return "conclusion";
  }
  return "issue";
}

std::optional<IrcLabel> irc_from_string(const std::string& value) {
  if (value == "issue") return IrcLabel::Issue;
  if (value == "reason") return IrcLabel::Reason;
  if (value == "conclusion") return IrcLabel::Conclusion;
  return std::nullopt;
}

std::string CaseDocument::full_text() const {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += sentences[i].text;
  }
  return out;
}

namespace {

bool all_whitespace(const std::string& text) {
  return std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

CaseDocument parse_record(const json& record, std::size_t line_no) {
  if (!record.is_object()) throw MalformedRecord(line_no, "record is not a JSON object");
  CaseDocument doc;

  if (!record.contains("case_id") || !record["case_id"].is_string()) {
    throw MalformedRecord(line_no, "missing string field 'case_id'");
  }
  doc.case_id = record["case_id"].get<std::string>();
  if (doc.case_id.empty()) throw MalformedRecord(line_no, "'case_id' is empty");

  if (!record.contains("sentences") || !record["sentences"].is_array()) {
    throw MalformedRecord(line_no, "missing array field 'sentences'");
  }
  const json& sentences = record["sentences"];
  if (sentences.empty()) throw MalformedRecord(line_no, "'sentences' is empty");

  std::size_t index = 0;
  for (const json& item : sentences) {
    if (!item.is_object() || !item.contains("text") || !item["text"].is_string()) {
      throw MalformedRecord(line_no, "sentence " + std::to_string(index) +
                                         " lacks a string 'text' field");
    }
    SentenceRecord sentence;
    sentence.index = index;
    sentence.text = item["text"].get<std::string>();
    if (sentence.text.empty() || all_whitespace(sentence.text)) {
      throw MalformedRecord(line_no, "sentence " + std::to_string(index) + " text is blank");
    }
    if (item.contains("irc") && !item["irc"].is_null()) {
      if (!item["irc"].is_string()) {
        throw MalformedRecord(line_no, "sentence " + std::to_string(index) +
                                           " 'irc' must be a string or null");
      }
      const std::string value = item["irc"].get<std::string>();
      sentence.irc = irc_from_string(value);
      if (!sentence.irc) {
        throw MalformedRecord(line_no,
                              "sentence " + std::to_string(index) + " has unknown irc '" + value +
                                  "' (expected issue|reason|conclusion)");
      }
    }
    doc.sentences.push_back(std::move(sentence));
    ++index;
  }

  if (record.contains("reference_summary") && !record["reference_summary"].is_null()) {
    if (!record["reference_summary"].is_string()) {
      throw MalformedRecord(line_no, "'reference_summary' must be a string or null");
    }
    std::string summary = record["reference_summary"].get<std::string>();
    if (!summary.empty()) doc.reference_summary = std::move(summary);
  }

  doc.token_count = 0;
  for (const SentenceRecord& s : doc.sentences) doc.token_count += count_tokens(s.text);
  return doc;
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || all_whitespace(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& ex) {
      throw MalformedRecord(line_no, ex.what());
    }
    CaseDocument doc = parse_record(record, line_no);
    if (!seen_ids.insert(doc.case_id).second) throw DuplicateCaseId(doc.case_id);
    corpus.push_back(std::move(doc));
  }
  if (corpus.empty()) throw EmptyCorpus();
  return corpus;
}

Corpus ingest_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  return parse_corpus(in);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const CaseDocument& doc : corpus) {
    json sentences = json::array();
    for (const SentenceRecord& s : doc.sentences) {
      json item;
      item["text"] = s.text;
      item["irc"] = s.irc ? json(to_string(*s.irc)) : json(nullptr);
      sentences.push_back(std::move(item));
    }
    json record;
    record["case_id"] = doc.case_id;
    record["sentences"] = std::move(sentences);
    record["reference_summary"] = doc.reference_summary ? json(*doc.reference_summary) : json(nullptr);
    out << record.dump() << '\n';
  }
}

void write_corpus_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  write_corpus(corpus, out);
}

CorpusSplit split_corpus(const Corpus& corpus, const SplitRatios& ratios, std::uint64_t seed) {
  const std::size_t n = corpus.size();
  if (n < 3) throw CorpusTooSmall(n);
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9) throw Error("split ratios must sum to 1");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  // Explicit Fisher-Yates so the permutation is identical across platforms.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }

  const auto train_end = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.train));
  const auto validation_end = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * (ratios.train + ratios.validation)));

  CorpusSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = corpus[order[i]].case_id;
    if (i < train_end) {
      split.train.push_back(id);
    } else if (i < validation_end) {
      split.validation.push_back(id);
    } else {
      split.test.push_back(id);
    }
  }
  return split;
}

namespace {

FieldStats stats_over(const std::vector<std::size_t>& counts) {
  FieldStats stats;
  stats.count = counts.size();
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

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) throw EmptyCorpus();
  std::vector<std::size_t> doc_counts;
  std::vector<std::size_t> summary_counts;
  for (const CaseDocument& doc : corpus) {
    doc_counts.push_back(doc.token_count);
    if (doc.reference_summary) summary_counts.push_back(count_tokens(*doc.reference_summary));
  }
  CorpusStats stats;
  stats.documents = stats_over(doc_counts);
  stats.summaries = stats_over(summary_counts);
  return stats;
}

std::vector<std::string> split_sentences(const std::string& raw_text) {
  std::vector<std::string> sentences;
  std::string current;
  const std::size_t n = raw_text.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = raw_text[i];
    current.push_back(c);
    if (c == '.' || c == '?' || c == '!') {
      // Boundary only when followed by whitespace and an opener character.
      std::size_t j = i + 1;
      bool saw_space = false;
      while (j < n && std::isspace(static_cast<unsigned char>(raw_text[j]))) {
        saw_space = true;
        ++j;
      }
      if (saw_space && j < n) {
        const unsigned char next = static_cast<unsigned char>(raw_text[j]);
        if (std::isupper(next) || std::isdigit(next) || next == '"' || next == '\'') {
          if (!all_whitespace(current)) sentences.push_back(current);
          current.clear();
          i = j;
          continue;
        }
      }
    }
    ++i;
  }
  if (!current.empty() && !all_whitespace(current)) sentences.push_back(current);
  return sentences;
}

}  // namespace argpipe
