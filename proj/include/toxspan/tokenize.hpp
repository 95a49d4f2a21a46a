#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "toxspan/token.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan {

struct TokenizerConfig {
  // Characters that join a word run along with letters and digits.
  std::u32string intra_word = U"'*";

  bool is_intra_word(char32_t c) const {
    return intra_word.find(c) != std::u32string::npos;
  }
  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

// Word tokens are maximal runs of letters, digits and intra-word characters
// that contain at least one letter or digit. Any other non-space character is
// its own punctuation token; whitespace is dropped.
inline std::vector<Token> tokenize(std::u32string_view text, const TokenizerConfig& config = {}) {
  std::vector<Token> tokens;
  const std::size_t n = text.size();
  std::size_t i = 0;
  auto push = [&](std::size_t start, std::size_t end, bool word) {
    tokens.push_back({unicode::encode_utf8(text.substr(start, end - start)), start, end, word});
  };
  while (i < n) {
    const char32_t c = text[i];
    if (unicode::is_space(c)) {
      ++i;
      continue;
    }
    if (unicode::is_alnum(c) || config.is_intra_word(c)) {
      std::size_t j = i;
      bool has_alnum = false;
      while (j < n && (unicode::is_alnum(text[j]) || config.is_intra_word(text[j]))) {
        has_alnum = has_alnum || unicode::is_alnum(text[j]);
        ++j;
      }
      if (has_alnum) {
        push(i, j, true);
      } else {
        for (std::size_t k = i; k < j; ++k) push(k, k + 1, false);
      }
      i = j;
      continue;
    }
    push(i, i + 1, false);
    ++i;
  }
  return tokens;
}

inline std::vector<Token> tokenize(std::string_view utf8, const TokenizerConfig& config = {}) {
  return tokenize(std::u32string_view(unicode::decode_utf8(utf8, "text")), config);
}

inline std::vector<Token> tokenize(const std::string& utf8, const TokenizerConfig& config = {}) {
  return tokenize(std::string_view(utf8), config);
}

inline std::vector<Token> tokenize(const char* utf8, const TokenizerConfig& config = {}) {
  return tokenize(std::string_view(utf8), config);
}

}  // namespace toxspan
