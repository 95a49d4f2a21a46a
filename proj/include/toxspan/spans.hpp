#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "toxspan/error.hpp"

namespace toxspan {

// Half-open character range [start, end).
struct Range {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend auto operator<=>(const Range&, const Range&) = default;
};

// Canonical set of character offsets: strictly increasing, no duplicates.
class SpanSet {
 public:
  using const_iterator = std::vector<std::size_t>::const_iterator;

  SpanSet() = default;
  SpanSet(std::initializer_list<std::size_t> offsets)
      : SpanSet(std::vector<std::size_t>(offsets)) {}
  explicit SpanSet(std::vector<std::size_t> offsets) {
    normalize(offsets);
    offsets_ = std::move(offsets);
  }

  // Sorts and deduplicates in place; returns the number of duplicates dropped.
  static std::size_t normalize(std::vector<std::size_t>& offsets) {
    std::sort(offsets.begin(), offsets.end());
    const auto last = std::unique(offsets.begin(), offsets.end());
    const auto dropped = static_cast<std::size_t>(offsets.end() - last);
    offsets.erase(last, offsets.end());
    return dropped;
  }

  // Every offset in [start, end).
  static SpanSet iota(std::size_t start, std::size_t end) {
    SpanSet out;
    for (std::size_t i = start; i < end; ++i) out.offsets_.push_back(i);
    return out;
  }

  bool empty() const { return offsets_.empty(); }
  std::size_t size() const { return offsets_.size(); }
  const_iterator begin() const { return offsets_.begin(); }
  const_iterator end() const { return offsets_.end(); }
  const std::vector<std::size_t>& offsets() const { return offsets_; }
  std::size_t back() const { return offsets_.back(); }

  bool contains(std::size_t offset) const {
    return std::binary_search(offsets_.begin(), offsets_.end(), offset);
  }
  bool contains_range(Range r) const {
    if (r.start >= r.end) return false;
    const auto it = std::lower_bound(offsets_.begin(), offsets_.end(), r.start);
    const auto n = static_cast<std::size_t>(offsets_.end() - it);
    return n >= r.length() && *(it + static_cast<std::ptrdiff_t>(r.length() - 1)) == r.end - 1;
  }

  std::size_t intersection_size(const SpanSet& other) const {
    std::size_t n = 0;
    auto a = offsets_.begin();
    auto b = other.offsets_.begin();
    while (a != offsets_.end() && b != other.offsets_.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++n, ++a, ++b;
      }
    }
    return n;
  }

  SpanSet set_union(const SpanSet& other) const {
    SpanSet out;
    std::set_union(offsets_.begin(), offsets_.end(), other.offsets_.begin(),
                   other.offsets_.end(), std::back_inserter(out.offsets_));
    return out;
  }

  SpanSet set_intersection(const SpanSet& other) const {
    SpanSet out;
    std::set_intersection(offsets_.begin(), offsets_.end(),
                          other.offsets_.begin(), other.offsets_.end(),
                          std::back_inserter(out.offsets_));
    return out;
  }

  bool is_subset_of(const SpanSet& other) const {
    return std::includes(other.offsets_.begin(), other.offsets_.end(),
                         offsets_.begin(), offsets_.end());
  }

  friend bool operator==(const SpanSet&, const SpanSet&) = default;

 private:
  std::vector<std::size_t> offsets_;
};

// Maximal contiguous runs, ascending, non-overlapping and non-adjacent.
inline std::vector<Range> offsets_to_ranges(const SpanSet& spans) {
  std::vector<Range> out;
  for (std::size_t offset : spans) {
    if (!out.empty() && out.back().end == offset) {
      ++out.back().end;
    } else {
      out.push_back({offset, offset + 1});
    }
  }
  return out;
}

// Union of the covered offsets. Overlapping ranges are fine; empty or
// inverted ones are rejected.
inline SpanSet ranges_to_offsets(std::span<const Range> ranges) {
  std::vector<std::size_t> offsets;
  for (const Range& r : ranges) {
    if (r.start >= r.end) {
      throw DataError("invalid range [" + std::to_string(r.start) + ", " +
                      std::to_string(r.end) + "): start must be < end");
    }
    for (std::size_t i = r.start; i < r.end; ++i) offsets.push_back(i);
  }
  return SpanSet(std::move(offsets));
}

inline SpanSet ranges_to_offsets(std::initializer_list<Range> ranges) {
  return ranges_to_offsets(std::span<const Range>(ranges.begin(), ranges.size()));
}

// "[0, 1, 2]" as used by the dataset and prediction files.
inline std::string format_offsets(const SpanSet& spans) {
  std::string out = "[";
  bool first = true;
  for (std::size_t offset : spans) {
    if (!first) out += ", ";
    out += std::to_string(offset);
    first = false;
  }
  out += ']';
  return out;
}

}  // namespace toxspan
