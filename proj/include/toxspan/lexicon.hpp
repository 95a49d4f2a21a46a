#pragma once

// Profanity lexicon: a trie over case-folded words, matched against whole
// word tokens.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toxspan/corpus.hpp"
#include "toxspan/error.hpp"
#include "toxspan/tokenize.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan {

class Lexicon {
 public:
  struct SourceNote {
    std::string name;
    std::size_t words = 0;  // non-comment lines read from the source
  };

  Lexicon() : nodes_(1) {}

  // Case-folds and inserts; empty words are ignored. Returns true if new.
  bool insert(std::string_view utf8) {
    const auto word = unicode::fold_case(unicode::decode_utf8(utf8, "lexicon entry"));
    if (word.empty()) return false;
    std::uint32_t node = 0;
    for (char32_t c : word) {
      auto it = nodes_[node].next.find(c);
      if (it == nodes_[node].next.end()) {
        const auto child = static_cast<std::uint32_t>(nodes_.size());
        nodes_[node].next.emplace(c, child);
        nodes_.emplace_back();
        node = child;
      } else {
        node = it->second;
      }
    }
    if (nodes_[node].terminal) return false;
    nodes_[node].terminal = true;
    ++size_;
    return true;
  }

  // Membership of the case-folded word.
  bool contains(std::u32string_view word) const {
    std::uint32_t node = 0;
    for (char32_t c : word) {
      const auto it = nodes_[node].next.find(unicode::to_lower(c));
      if (it == nodes_[node].next.end()) return false;
      node = it->second;
    }
    return !word.empty() && nodes_[node].terminal;
  }
  bool contains(std::string_view utf8) const {
    return contains(std::u32string_view(unicode::decode_utf8(utf8)));
  }

  // Entries of the same length as `pattern` that agree with it at every
  // position not holding `wildcard`. Patterns made only of wildcards match
  // nothing.
  std::vector<std::string> wildcard_matches(std::u32string_view pattern,
                                            char32_t wildcard = U'*') const {
    std::vector<std::string> out;
    if (std::all_of(pattern.begin(), pattern.end(), [&](char32_t c) { return c == wildcard; })) {
      return out;
    }
    std::u32string prefix;
    collect_wildcard(0, pattern, wildcard, prefix, out);
    return out;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  // Entries in code point order (which is also UTF-8 byte order).
  std::vector<std::string> words() const {
    std::vector<std::string> out;
    out.reserve(size_);
    std::u32string prefix;
    collect(0, prefix, out);
    return out;
  }

  const std::vector<SourceNote>& sources() const { return sources_; }
  void add_source_note(SourceNote note) { sources_.push_back(std::move(note)); }

  // One word per line, sorted.
  void save(std::ostream& out) const {
    for (const auto& w : words()) out << w << '\n';
    if (!out) throw DataError("lexicon write failed");
  }

 private:
  struct Node {
    std::map<char32_t, std::uint32_t> next;
    bool terminal = false;
  };

  void collect(std::uint32_t node, std::u32string& prefix, std::vector<std::string>& out) const {
    if (nodes_[node].terminal) out.push_back(unicode::encode_utf8(prefix));
    for (const auto& [c, child] : nodes_[node].next) {
      prefix.push_back(c);
      collect(child, prefix, out);
      prefix.pop_back();
    }
  }

  void collect_wildcard(std::uint32_t node, std::u32string_view rest, char32_t wildcard,
                        std::u32string& prefix, std::vector<std::string>& out) const {
    if (rest.empty()) {
      if (nodes_[node].terminal) out.push_back(unicode::encode_utf8(prefix));
      return;
    }
    const char32_t c = rest.front();
    if (c == wildcard) {
      for (const auto& [edge, child] : nodes_[node].next) {
        prefix.push_back(edge);
        collect_wildcard(child, rest.substr(1), wildcard, prefix, out);
        prefix.pop_back();
      }
      return;
    }
    const auto it = nodes_[node].next.find(unicode::to_lower(c));
    if (it == nodes_[node].next.end()) return;
    prefix.push_back(it->first);
    collect_wildcard(it->second, rest.substr(1), wildcard, prefix, out);
    prefix.pop_back();
  }

  std::vector<Node> nodes_;
  std::size_t size_ = 0;
  std::vector<SourceNote> sources_;
};

// A named word list: UTF-8, one word per line, `#` comments and blank lines
// ignored.
struct WordSource {
  std::string name;
  std::string content;
};

inline std::vector<std::string> read_word_list(const WordSource& source) {
  if (auto bad = unicode::find_invalid_utf8(source.content)) {
    throw DataError(source.name + ": invalid UTF-8 at byte " + std::to_string(*bad));
  }
  std::vector<std::string> words;
  std::string_view rest = source.content;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    auto line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    words.emplace_back(line);
  }
  return words;
}

inline Lexicon build_lexicon(std::span<const WordSource> sources) {
  Lexicon lex;
  for (const auto& source : sources) {
    const auto words = read_word_list(source);
    for (const auto& w : words) lex.insert(w);
    lex.add_source_note({source.name, words.size()});
  }
  return lex;
}

inline Lexicon build_lexicon(std::initializer_list<WordSource> sources) {
  return build_lexicon(std::span<const WordSource>(sources.begin(), sources.size()));
}

template <typename Range>
Lexicon lexicon_from_words(const Range& words) {
  Lexicon lex;
  for (const auto& w : words) lex.insert(w);
  return lex;
}

// Word tokens wholly covered by gold offsets, case-folded, deduplicated and
// sorted.
inline std::vector<std::string> mine_training_lexicon(std::span<const Post> posts,
                                                      const TokenizerConfig& tokenizer = {}) {
  std::set<std::string> found;
  for (const Post& post : posts) {
    if (post.gold.empty()) continue;
    for (const Token& token : tokenize(post.text, tokenizer)) {
      if (token.is_word && post.gold.contains_range(token.range())) {
        found.insert(unicode::fold_case_utf8(token.text));
      }
    }
  }
  return {found.begin(), found.end()};
}

struct MatchOptions {
  // Accept tokens like "f**k" when some entry of equal length agrees on every
  // non-asterisk character.
  bool censored = false;
  TokenizerConfig tokenizer;
};

// Censored-word candidates for a token; empty unless it contains '*' and at
// least one other character.
inline std::vector<std::string> normalize_censored(const Lexicon& lex, std::string_view token_text) {
  const auto word = unicode::decode_utf8(token_text, "token");
  if (word.find(U'*') == std::u32string::npos) return {};
  return lex.wildcard_matches(word, U'*');
}

inline bool token_matches(const Lexicon& lex, const Token& token, const MatchOptions& options) {
  if (!token.is_word) return false;
  const auto word = unicode::decode_utf8(token.text, "token");
  if (lex.contains(std::u32string_view(word))) return true;
  return options.censored && word.find(U'*') != std::u32string::npos &&
         !lex.wildcard_matches(word, U'*').empty();
}

inline SpanSet match(const Lexicon& lex, std::span<const Token> tokens, const MatchOptions& options = {}) {
  std::vector<std::size_t> offsets;
  for (const Token& token : tokens) {
    if (!token_matches(lex, token, options)) continue;
    for (std::size_t c = token.start; c < token.end; ++c) offsets.push_back(c);
  }
  return SpanSet(std::move(offsets));
}

inline SpanSet match(const Lexicon& lex, std::string_view text, const MatchOptions& options = {}) {
  const auto tokens = tokenize(text, options.tokenizer);
  return match(lex, std::span<const Token>(tokens), options);
}

}  // namespace toxspan
