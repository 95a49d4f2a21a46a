#pragma once

// RFC 4180 style CSV reading and writing. Quoted fields may hold commas,
// doubled quotes and raw newlines; record separators are LF or CRLF.

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "toxspan/error.hpp"

namespace toxspan::csv {

class Reader {
 public:
  explicit Reader(std::string_view content) : data_(content) {
    if (data_.substr(0, 3) == "\xEF\xBB\xBF") data_.remove_prefix(3);
  }

  // Reads the next non-blank record. Returns false at end of input.
  bool next(std::vector<std::string>& fields) {
    while (pos_ < data_.size()) {
      ++record_;
      line_ = line_at_pos_;
      fields.clear();
      if (at_line_end()) {
        skip_line_end();
        continue;
      }
      read_record(fields);
      return true;
    }
    return false;
  }

  // 1-based record number of the last record returned (header is record 1).
  std::size_t record_number() const { return record_; }
  // 1-based line on which the last record started.
  std::size_t line_number() const { return line_; }

 private:
  bool at_line_end() const {
    return data_[pos_] == '\n' ||
           (data_[pos_] == '\r' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '\n');
  }
  void skip_line_end() {
    pos_ += data_[pos_] == '\r' ? 2 : 1;
    ++line_at_pos_;
  }

  void read_record(std::vector<std::string>& fields) {
    for (;;) {
      std::string field;
      if (pos_ < data_.size() && data_[pos_] == '"') {
        ++pos_;
        for (;;) {
          if (pos_ >= data_.size()) {
            throw DataError("line " + std::to_string(line_) +
                            ": unterminated quoted field");
          }
          const char c = data_[pos_++];
          if (c == '"') {
            if (pos_ < data_.size() && data_[pos_] == '"') {
              field += '"';
              ++pos_;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line_at_pos_;
            field += c;
          }
        }
        if (pos_ < data_.size() && data_[pos_] != ',' && !at_line_end()) {
          throw DataError("line " + std::to_string(line_) +
                          ": unexpected character after closing quote");
        }
      } else {
        while (pos_ < data_.size() && data_[pos_] != ',' && !at_line_end()) {
          field += data_[pos_++];
        }
      }
      fields.push_back(std::move(field));
      if (pos_ >= data_.size()) return;
      if (data_[pos_] == ',') {
        ++pos_;
        continue;
      }
      skip_line_end();
      return;
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
  std::size_t record_ = 0;
  std::size_t line_ = 1;
  std::size_t line_at_pos_ = 1;
};

inline bool needs_quotes(std::string_view field) {
  if (field.empty()) return false;
  if (field.front() == ' ' || field.back() == ' ') return true;
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void write_field(std::ostream& out, std::string_view field, bool force_quotes = false) {
  if (!force_quotes && !needs_quotes(field)) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace toxspan::csv
