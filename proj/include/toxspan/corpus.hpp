#pragma once

// Toxic-spans dataset and prediction files.
//
// Dataset:     header `spans,text` (optional id column `id`/`text_id`/`post_id`)
// Predictions: header `spans,text_id`
//
// The spans cell is a bracketed list of character offsets, e.g. "[0, 1, 2]".
// Offsets index Unicode scalar values of the text, not bytes.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "toxspan/csv.hpp"
#include "toxspan/error.hpp"
#include "toxspan/spans.hpp"
#include "toxspan/token.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan {

struct Post {
  std::string id;
  std::string text;  // UTF-8
  SpanSet gold;

  friend bool operator==(const Post&, const Post&) = default;
};

struct PredictionRecord {
  std::string post_id;
  SpanSet predicted;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                              std::initializer_list<std::string_view> names) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto h = trim(header[i]);
    for (auto name : names) {
      if (h == name) return i;
    }
  }
  return std::nullopt;
}

inline std::string row_prefix(std::size_t row) {
  return "row " + std::to_string(row) + ": ";
}

// Parses "[0, 1, 2]". `row` is the 1-based data row used in diagnostics.
inline SpanSet parse_spans_cell(std::string_view cell, std::size_t row,
                                std::vector<std::string>* warnings) {
  auto s = trim(cell);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw DataError(row_prefix(row) + "spans cell must be a bracketed list, got '" +
                    std::string(cell) + "'");
  }
  s = trim(s.substr(1, s.size() - 2));
  std::vector<std::size_t> offsets;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    unsigned long long value = 0;
    const auto* first = item.data();
    const auto* last = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (item.empty() || ec != std::errc{} || ptr != last) {
      throw DataError(row_prefix(row) + "non-integer offset '" + std::string(item) + "'");
    }
    offsets.push_back(static_cast<std::size_t>(value));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
    if (trim(s).empty()) {
      throw DataError(row_prefix(row) + "trailing comma in spans cell");
    }
  }
  const std::size_t dropped = SpanSet::normalize(offsets);
  if (dropped > 0 && warnings != nullptr) {
    warnings->push_back(row_prefix(row) + "dropped " + std::to_string(dropped) +
                        " duplicate offset(s)");
  }
  return SpanSet(std::move(offsets));
}

inline void check_utf8(std::string_view bytes, std::string_view source) {
  if (auto bad = unicode::find_invalid_utf8(bytes)) {
    const auto line = 1 + std::count(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(*bad), '\n');
    throw DataError(std::string(source) + ": invalid UTF-8 at byte " + std::to_string(*bad) +
                    " (line " + std::to_string(line) + ")");
  }
}

}  // namespace detail

inline std::string read_stream(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_stream(in);
}

// One Post per data row, in file order. Duplicate offsets are dropped with a
// warning appended to `warnings` (when given).
inline std::vector<Post> parse_dataset(std::string_view content,
                                       std::vector<std::string>* warnings = nullptr,
                                       std::string_view source = "dataset") {
  detail::check_utf8(content, source);
  csv::Reader reader(content);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw DataError(std::string(source) + ": empty file, expected header");
  const auto spans_col = detail::find_column(fields, {"spans"});
  const auto text_col = detail::find_column(fields, {"text"});
  const auto id_col = detail::find_column(fields, {"id", "text_id", "post_id"});
  if (!spans_col || !text_col) {
    throw DataError(std::string(source) + ": header must contain 'spans' and 'text' columns");
  }
  const std::size_t width = fields.size();

  std::vector<Post> posts;
  std::size_t row = 0;
  while (reader.next(fields)) {
    ++row;
    if (fields.size() != width) {
      throw DataError(std::string(source) + ": " + detail::row_prefix(row) + "expected " +
                      std::to_string(width) + " fields, found " + std::to_string(fields.size()) +
                      " (line " + std::to_string(reader.line_number()) + ")");
    }
    Post post;
    post.id = id_col ? fields[*id_col] : std::to_string(row - 1);
    post.text = std::move(fields[*text_col]);
    post.gold = detail::parse_spans_cell(fields[*spans_col], row, warnings);
    const std::size_t length = unicode::length(post.text);
    if (!post.gold.empty() && post.gold.back() >= length) {
      throw DataError(std::string(source) + ": " + detail::row_prefix(row) + "offset " +
                      std::to_string(post.gold.back()) + " exceeds text length " +
                      std::to_string(length));
    }
    posts.push_back(std::move(post));
  }
  return posts;
}

inline std::vector<Post> load_dataset(const std::string& path,
                                      std::vector<std::string>* warnings = nullptr) {
  return parse_dataset(read_file(path), warnings, path);
}

// Writes `spans,text`, adding an `id` column only when some id differs from
// its row index, so parse(write(posts)) == posts.
inline void write_dataset(std::span<const Post> posts, std::ostream& out) {
  bool default_ids = true;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (posts[i].id != std::to_string(i)) default_ids = false;
  }
  out << (default_ids ? "spans,text\n" : "spans,text,id\n");
  for (const Post& post : posts) {
    csv::write_field(out, format_offsets(post.gold), true);
    out << ',';
    csv::write_field(out, post.text, true);
    if (!default_ids) {
      out << ',';
      csv::write_field(out, post.id);
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed");
}

inline std::vector<PredictionRecord> parse_predictions(std::string_view content,
                                                       std::vector<std::string>* warnings = nullptr,
                                                       std::string_view source = "predictions") {
  detail::check_utf8(content, source);
  csv::Reader reader(content);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw DataError(std::string(source) + ": empty file, expected header");
  const auto spans_col = detail::find_column(fields, {"spans"});
  const auto id_col = detail::find_column(fields, {"text_id", "id", "post_id"});
  if (!spans_col || !id_col) {
    throw DataError(std::string(source) + ": header must contain 'spans' and 'text_id' columns");
  }
  const std::size_t width = fields.size();
  std::vector<PredictionRecord> records;
  std::size_t row = 0;
  while (reader.next(fields)) {
    ++row;
    if (fields.size() != width) {
      throw DataError(std::string(source) + ": " + detail::row_prefix(row) + "expected " +
                      std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    records.push_back({fields[*id_col], detail::parse_spans_cell(fields[*spans_col], row, warnings)});
  }
  return records;
}

inline std::vector<PredictionRecord> load_predictions(const std::string& path,
                                                      std::vector<std::string>* warnings = nullptr) {
  return parse_predictions(read_file(path), warnings, path);
}

inline void write_predictions(std::span<const PredictionRecord> records, std::ostream& out) {
  out << "spans,text_id\n";
  for (const auto& record : records) {
    csv::write_field(out, format_offsets(record.predicted), true);
    out << ',';
    csv::write_field(out, record.post_id);
    out << '\n';
  }
  if (!out) throw DataError("write failed");
}

// Offsets must lie inside the text they annotate.
inline void check_offsets(const SpanSet& spans, std::string_view text, std::string_view id) {
  const std::size_t length = unicode::length(text);
  if (!spans.empty() && spans.back() >= length) {
    throw DataError("post " + std::string(id) + ": offset " + std::to_string(spans.back()) +
                    " exceeds text length " + std::to_string(length));
  }
}

// Character offsets covered by toxic-labelled tokens. With `gap_fill`, the
// characters between two consecutive toxic tokens are included as well.
inline SpanSet token_labels_to_offsets(std::span<const Token> tokens,
                                       std::span<const Label> labels, bool gap_fill = true) {
  if (tokens.size() != labels.size()) {
    throw UsageError("token_labels_to_offsets: " + std::to_string(tokens.size()) +
                     " tokens but " + std::to_string(labels.size()) + " labels");
  }
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (labels[i] != kToxic) continue;
    const std::size_t from =
        (gap_fill && i > 0 && labels[i - 1] == kToxic) ? tokens[i - 1].end : tokens[i].start;
    for (std::size_t c = from; c < tokens[i].end; ++c) offsets.push_back(c);
  }
  return SpanSet(std::move(offsets));
}

// Tokens whose whole range lies inside `gold` are toxic; partial overlap is not.
inline std::vector<Label> labels_from_gold(std::span<const Token> tokens, const SpanSet& gold) {
  std::vector<Label> labels;
  labels.reserve(tokens.size());
  for (const Token& t : tokens) labels.push_back(gold.contains_range(t.range()) ? kToxic : kNotToxic);
  return labels;
}

}  // namespace toxspan
