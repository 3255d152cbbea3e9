#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace argpipe {

// Byte span of one token within the original text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Shared tokenization used for token counting, budgeting, and metrics: a token
// is either a maximal run of word characters (ASCII alphanumerics, '_', or any
// non-ASCII byte) or a single punctuation mark. Whitespace only separates.
std::vector<TokenSpan> token_spans(std::string_view text);

// Lowercased token strings under the same segmentation.
std::vector<std::string> tokenize(std::string_view text);

std::size_t count_tokens(std::string_view text);

std::string to_lower(std::string_view text);

}  // namespace argpipe
