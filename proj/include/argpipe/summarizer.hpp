#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argpipe/completion.hpp"
#include "argpipe/corpus.hpp"
#include "argpipe/labeler.hpp"
#include "argpipe/segmenter.hpp"

namespace argpipe {

// Appended verbatim to every prompt.
inline constexpr std::string_view kPromptSuffix = "\nTL;DR";

struct TokenBudgetPolicy {
  std::size_t budget_tokens = 2500;
  std::string tokenizer = "default";

  static TokenBudgetPolicy small_profile() { return {2500, "default"}; }
  static TokenBudgetPolicy large_profile() { return {7500, "default"}; }
};

struct Chunk {
  std::string doc_id;
  std::size_t first_sentence = 0;
  std::size_t sentence_count = 0;  // 0 for raw-token pieces of one oversized sentence
  bool token_split = false;
  std::string text;
  std::size_t token_count = 0;
};

// text + "\nTL;DR", nothing else; the body is preserved byte for byte.
std::string build_prompt(const std::string& text);

// Greedy whole-sentence packing; a sentence exceeding the budget on its own is
// split at token boundaries into maximal budget-sized raw-token pieces.
std::vector<Chunk> chunk_sentences(const std::string& doc_id,
                                   std::span<const std::string> sentences,
                                   const TokenBudgetPolicy& policy);

std::vector<Chunk> chunk_by_budget(const CaseDocument& doc, const TokenBudgetPolicy& policy);

// Texts of Argumentative segments in document order; may be empty.
std::vector<std::string> select_argumentative_text(const CaseDocument& doc,
                                                   const Segmentation& segmentation,
                                                   std::span<const SegmentLabel> labels);

enum class SummaryMethod { BaselineChunks, ArgSegments };

const char* to_string(SummaryMethod method);

struct GenerationParams {
  double temperature = 0.0;
  std::size_t max_tokens = 128;
};

struct PricingProfile {
  double prompt_per_1k = 0.0;
  double completion_per_1k = 0.0;
};

class PricingTable {
 public:
  // "small": $0.02/1k for both prompt and completion;
  // "large": $0.03/1k prompt, $0.06/1k completion.
  static PricingTable defaults();

  const PricingProfile& profile(const std::string& name) const;
  void set(const std::string& name, PricingProfile profile) { profiles_[name] = profile; }

 private:
  std::map<std::string, PricingProfile> profiles_;
};

double estimate_cost(const TokenUsage& usage, const PricingTable& pricing,
                     const std::string& profile);

struct SummaryRecord {
  std::string doc_id;
  SummaryMethod method = SummaryMethod::BaselineChunks;
  std::vector<std::string> parts;
  std::string final_summary;  // parts joined with single spaces, document order
  TokenUsage total_usage;
  double cost = 0.0;
};

struct SummarizerOptions {
  TokenBudgetPolicy policy = TokenBudgetPolicy::small_profile();
  std::string pricing_profile = "small";
  PricingTable pricing = PricingTable::defaults();
  std::size_t max_in_flight = 1;  // concurrent provider calls
};

class Summarizer {
 public:
  Summarizer(CompletionClient& client, SummarizerOptions options)
      : client_(client), options_(std::move(options)) {}

  // BaselineChunks summarizes budget-sized chunks of the whole document;
  // ArgSegments summarizes each Argumentative segment (chunked further only
  // when it exceeds the budget). Parts keep document order regardless of
  // completion order.
  SummaryRecord summarize_document(const CaseDocument& doc, SummaryMethod method,
                                   const GenerationParams& params,
                                   const Segmentation* segmentation = nullptr,
                                   std::span<const SegmentLabel> labels = {});

  const SummarizerOptions& options() const { return options_; }

 private:
  CompletionClient& client_;
  SummarizerOptions options_;
};

}  // namespace argpipe
