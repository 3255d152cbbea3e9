#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "argpipe/errors.hpp"

namespace argpipe {

enum class IrcLabel { Issue, Reason, Conclusion };

const char* to_string(IrcLabel label);
std::optional<IrcLabel> irc_from_string(const std::string& value);

struct SentenceRecord {
  std::size_t index = 0;
  std::string text;
  std::optional<IrcLabel> irc;
};

struct CaseDocument {
  std::string case_id;
  std::vector<SentenceRecord> sentences;
  std::optional<std::string> reference_summary;
  std::size_t token_count = 0;  // derived with the default tokenizer at load time

  // Sentences joined with single spaces; the joined form tokenizes to the
  // concatenation of the per-sentence token sequences.
  std::string full_text() const;
};

using Corpus = std::vector<CaseDocument>;

// One JSON object per line:
//   {"case_id": str,
//    "sentences": [{"text": str, "irc": "issue"|"reason"|"conclusion"|null}],
//    "reference_summary": str|null}
Corpus ingest_corpus(const std::string& path);
Corpus parse_corpus(std::istream& in);

void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus_file(const Corpus& corpus, const std::string& path);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct CorpusSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
};

// Seeded Fisher-Yates shuffle followed by contiguous slicing at cumulative
// ratio boundaries floor(n * r_train) and floor(n * (r_train + r_validation)),
// so each split stays within one document of its exact share.
CorpusSplit split_corpus(const Corpus& corpus, const SplitRatios& ratios, std::uint64_t seed);

struct FieldStats {
  std::size_t count = 0;
  double avg = 0.0;
  std::size_t max = 0;
  std::size_t min = 0;
};

struct CorpusStats {
  FieldStats documents;
  FieldStats summaries;
};

CorpusStats corpus_stats(const Corpus& corpus);

// Fallback rule-based splitter for raw text: breaks after '.', '?' or '!'
// followed by whitespace and an uppercase letter, quote, or digit.
std::vector<std::string> split_sentences(const std::string& raw_text);

}  // namespace argpipe
