#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toxspan/error.hpp"
#include "toxspan/lexicon.hpp"
#include "toxspan/token.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan::crf {

// Which feature families extract_features emits. The bias feature is always
// on.
struct FeatureTemplates {
  bool identity = true;  // w=<lowercased token>
  bool affixes = true;   // pre1..3, suf1..3 on word tokens
  bool shape = true;     // has_digit, has_star, all_caps, punct
  bool context = true;   // prev=/next= lowercased neighbours
  bool lexicon = true;   // lex=1 when a lexicon is supplied and matches

  std::string to_string() const {
    std::string out;
    auto add = [&](bool on, std::string_view name) {
      if (!on) return;
      if (!out.empty()) out += ',';
      out += name;
    };
    add(identity, "identity");
    add(affixes, "affixes");
    add(shape, "shape");
    add(context, "context");
    add(lexicon, "lexicon");
    return out.empty() ? "none" : out;
  }

  static FeatureTemplates parse(std::string_view spec) {
    FeatureTemplates t{false, false, false, false, false};
    if (spec == "none") return t;
    while (!spec.empty()) {
      const auto comma = spec.find(',');
      const auto name = spec.substr(0, comma);
      if (name == "identity") t.identity = true;
      else if (name == "affixes") t.affixes = true;
      else if (name == "shape") t.shape = true;
      else if (name == "context") t.context = true;
      else if (name == "lexicon") t.lexicon = true;
      else throw DataError("unknown feature template '" + std::string(name) + "'");
      if (comma == std::string_view::npos) break;
      spec.remove_prefix(comma + 1);
    }
    return t;
  }

  friend bool operator==(const FeatureTemplates&, const FeatureTemplates&) = default;
};

// Sparse feature map, sorted by id, no zero values.
using FeatureVector = std::vector<std::pair<std::string, double>>;

inline constexpr std::string_view kBeginMarker = "<BOS>";
inline constexpr std::string_view kEndMarker = "<EOS>";

inline double feature_value(const FeatureVector& fv, std::string_view id) {
  const auto it = std::lower_bound(fv.begin(), fv.end(), id,
                                   [](const auto& entry, std::string_view key) { return entry.first < key; });
  return (it != fv.end() && it->first == id) ? it->second : 0.0;
}

inline FeatureVector extract_features(std::span<const Token> tokens, std::size_t position,
                                      const Lexicon* lexicon = nullptr,
                                      const FeatureTemplates& templates = {}) {
  if (position >= tokens.size()) {
    throw UsageError("extract_features: position " + std::to_string(position) +
                     " out of range for " + std::to_string(tokens.size()) + " tokens");
  }
  const Token& token = tokens[position];
  const auto chars = unicode::decode_utf8(token.text, "token");
  const auto lower = unicode::fold_case(chars);

  FeatureVector fv;
  auto add = [&](std::string id) { fv.emplace_back(std::move(id), 1.0); };
  add("bias");
  if (templates.identity) add("w=" + unicode::encode_utf8(lower));
  if (templates.affixes && token.is_word) {
    for (std::size_t k = 1; k <= 3 && k <= lower.size(); ++k) {
      add("pre" + std::to_string(k) + "=" + unicode::encode_utf8(lower.substr(0, k)));
      add("suf" + std::to_string(k) + "=" + unicode::encode_utf8(lower.substr(lower.size() - k)));
    }
  }
  if (templates.shape) {
    if (std::any_of(chars.begin(), chars.end(), unicode::is_digit)) add("has_digit");
    if (chars.find(U'*') != std::u32string::npos) add("has_star");
    bool any_upper = false;
    bool all_upper = true;
    for (char32_t c : chars) {
      if (!unicode::is_alnum(c) || unicode::is_digit(c)) continue;
      if (unicode::is_upper(c)) any_upper = true;
      else all_upper = false;
    }
    if (any_upper && all_upper) add("all_caps");
    if (!token.is_word) add("punct");
  }
  if (templates.context) {
    add("prev=" + (position == 0 ? std::string(kBeginMarker)
                                 : unicode::fold_case_utf8(tokens[position - 1].text)));
    add("next=" + (position + 1 == tokens.size() ? std::string(kEndMarker)
                                                 : unicode::fold_case_utf8(tokens[position + 1].text)));
  }
  if (templates.lexicon && lexicon != nullptr && token.is_word &&
      lexicon->contains(std::u32string_view(chars))) {
    add("lex=1");
  }
  std::sort(fv.begin(), fv.end());
  fv.erase(std::unique(fv.begin(), fv.end(),
                       [](const auto& a, const auto& b) { return a.first == b.first; }),
           fv.end());
  return fv;
}

}  // namespace toxspan::crf
