#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "toxspan/spans.hpp"

namespace toxspan {

// A slice of a post with its half-open character range. `text` holds the
// UTF-8 encoding of source[start, end).
struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
  bool is_word = true;

  Range range() const { return {start, end}; }
  friend bool operator==(const Token&, const Token&) = default;
};

using Label = std::uint8_t;
inline constexpr Label kNotToxic = 0;
inline constexpr Label kToxic = 1;
inline constexpr std::size_t kNumLabels = 2;

}  // namespace toxspan
