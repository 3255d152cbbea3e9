#include "argpipe/summarizer.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <thread>

#include "argpipe/errors.hpp"
#include "argpipe/tokenizer.hpp"

namespace argpipe {

std::string build_prompt(const std::string& text) {
  const bool blank = std::all_of(text.begin(), text.end(),
                                 [](unsigned char c) { return std::isspace(c) != 0; });
  if (text.empty() || blank) throw EmptyText();
  std::string prompt = text;
  prompt += kPromptSuffix;
  return prompt;
}

std::vector<Chunk> chunk_sentences(const std::string& doc_id,
                                   std::span<const std::string> sentences,
                                   const TokenBudgetPolicy& policy) {
  if (policy.budget_tokens == 0) throw Error("token budget must be positive");
  std::vector<Chunk> chunks;

  Chunk current;
  current.doc_id = doc_id;
  auto flush = [&chunks, &current, &doc_id]() {
    if (current.sentence_count > 0) chunks.push_back(std::move(current));
    current = Chunk{};
    current.doc_id = doc_id;
  };

  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const std::string& sentence = sentences[s];
    const std::vector<TokenSpan> spans = token_spans(sentence);

    if (spans.size() > policy.budget_tokens) {
      // Oversized sentence: emit pending chunk, then budget-sized raw pieces.
      flush();
      std::size_t start = 0;
      while (start < spans.size()) {
        const std::size_t take = std::min(policy.budget_tokens, spans.size() - start);
        Chunk piece;
        piece.doc_id = doc_id;
        piece.first_sentence = s;
        piece.sentence_count = 0;
        piece.token_split = true;
        piece.text = sentence.substr(spans[start].begin,
                                     spans[start + take - 1].end - spans[start].begin);
        piece.token_count = take;
        chunks.push_back(std::move(piece));
        start += take;
      }
      continue;
    }

    if (current.sentence_count > 0 &&
        current.token_count + spans.size() > policy.budget_tokens) {
      flush();
      current.first_sentence = s;
    }
    if (current.sentence_count == 0) current.first_sentence = s;
    if (current.sentence_count > 0) current.text.push_back(' ');
    current.text += sentence;
    current.token_count += spans.size();
    ++current.sentence_count;
  }
  flush();
  return chunks;
}

std::vector<Chunk> chunk_by_budget(const CaseDocument& doc, const TokenBudgetPolicy& policy) {
  std::vector<std::string> texts;
  texts.reserve(doc.sentences.size());
  for (const SentenceRecord& s : doc.sentences) texts.push_back(s.text);
  return chunk_sentences(doc.case_id, texts, policy);
}

std::vector<std::string> select_argumentative_text(const CaseDocument& doc,
                                                   const Segmentation& segmentation,
                                                   std::span<const SegmentLabel> labels) {
  const std::vector<SentenceSpan> spans = segmentation.spans();
  if (labels.size() != spans.size()) throw LabelSegmentMismatch(labels.size(), spans.size());
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (labels[i] == SegmentLabel::Argumentative) texts.push_back(segment_text(doc, spans[i]));
  }
  return texts;
}

const char* to_string(SummaryMethod method) {
  return method == SummaryMethod::BaselineChunks ? "baseline" : "argseg";
}

PricingTable PricingTable::defaults() {
  PricingTable table;
  table.set("small", {0.02, 0.02});
  table.set("large", {0.03, 0.06});
  return table;
}

const PricingProfile& PricingTable::profile(const std::string& name) const {
  const auto it = profiles_.find(name);
  if (it == profiles_.end()) throw UnknownProfile(name);
  return it->second;
}

double estimate_cost(const TokenUsage& usage, const PricingTable& pricing,
                     const std::string& profile) {
  const PricingProfile& p = pricing.profile(profile);
  return static_cast<double>(usage.prompt_tokens) / 1000.0 * p.prompt_per_1k +
         static_cast<double>(usage.completion_tokens) / 1000.0 * p.completion_per_1k;
}

namespace {

// Runs one completion per prompt, reassembling responses by index. Failures
// surface after all workers finish, lowest index first.
std::vector<CompletionResponse> run_completions(CompletionClient& client,
                                                const std::vector<std::string>& prompts,
                                                const GenerationParams& params,
                                                std::size_t max_in_flight) {
  std::vector<CompletionResponse> responses(prompts.size());

  if (const auto limit = client.context_limit()) {
    for (const std::string& prompt : prompts) {
      const std::size_t tokens = count_tokens(prompt);
      if (tokens > *limit) throw RequestTooLarge(tokens, *limit);
    }
  }

  auto run_one = [&](std::size_t index) {
    CompletionRequest request;
    request.prompt = prompts[index];
    request.temperature = params.temperature;
    request.max_tokens = params.max_tokens;
    responses[index] = client.complete(request);
  };

  if (max_in_flight <= 1 || prompts.size() <= 1) {
    for (std::size_t i = 0; i < prompts.size(); ++i) run_one(i);
    return responses;
  }

  std::vector<std::exception_ptr> errors(prompts.size());
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::min(max_in_flight, prompts.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t index = next.fetch_add(1);
        if (index >= prompts.size()) return;
        try {
          run_one(index);
        } catch (...) {
          errors[index] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return responses;
}

}  // namespace

SummaryRecord Summarizer::summarize_document(const CaseDocument& doc, SummaryMethod method,
                                             const GenerationParams& params,
                                             const Segmentation* segmentation,
                                             std::span<const SegmentLabel> labels) {
  std::vector<Chunk> pieces;
  if (method == SummaryMethod::BaselineChunks) {
    pieces = chunk_by_budget(doc, options_.policy);
  } else {
    if (segmentation == nullptr) {
      throw Error("ArgSegments summarization requires a segmentation for " + doc.case_id);
    }
    const std::vector<SentenceSpan> spans = segmentation->spans();
    if (labels.size() != spans.size()) throw LabelSegmentMismatch(labels.size(), spans.size());
    bool any_argumentative = false;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      if (labels[i] != SegmentLabel::Argumentative) continue;
      any_argumentative = true;
      // One completion per argumentative segment; a segment over the budget
      // is chunked like a tiny document.
      std::vector<std::string> texts;
      for (std::size_t s = spans[i].begin; s < spans[i].end; ++s) {
        texts.push_back(doc.sentences[s].text);
      }
      for (Chunk& c : chunk_sentences(doc.case_id, texts, options_.policy)) {
        c.first_sentence += spans[i].begin;
        pieces.push_back(std::move(c));
      }
    }
    if (!any_argumentative) throw NoArgumentativeSegments(doc.case_id);
  }

  std::vector<std::string> prompts;
  prompts.reserve(pieces.size());
  for (const Chunk& piece : pieces) prompts.push_back(build_prompt(piece.text));

  const std::vector<CompletionResponse> responses =
      run_completions(client_, prompts, params, options_.max_in_flight);

  SummaryRecord record;
  record.doc_id = doc.case_id;
  record.method = method;
  for (const CompletionResponse& response : responses) {
    record.parts.push_back(response.text);
    record.total_usage += response.usage;
  }
  for (std::size_t i = 0; i < record.parts.size(); ++i) {
    if (i > 0) record.final_summary.push_back(' ');
    record.final_summary += record.parts[i];
  }
  record.cost = estimate_cost(record.total_usage, options_.pricing, options_.pricing_profile);
  return record;
}

}  // namespace argpipe
