#include "argpipe/tokenizer.hpp"

#include <cctype>

namespace argpipe {

namespace {

inline bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

// Non-ASCII bytes count as word characters so multi-byte sequences stay whole.
inline bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c == '_' || c >= 0x80;
}

}  // namespace

std::vector<TokenSpan> token_spans(std::string_view text) {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      ++i;
      continue;
    }
    if (is_word_byte(c)) {
      std::size_t j = i + 1;
      while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
      spans.push_back({i, j});
      i = j;
    } else {
      spans.push_back({i, i + 1});
      ++i;
    }
  }
  return spans;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for (const TokenSpan& span : token_spans(text)) {
    tokens.push_back(to_lower(text.substr(span.begin, span.end - span.begin)));
  }
  return tokens;
}

std::size_t count_tokens(std::string_view text) { return token_spans(text).size(); }

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace argpipe
