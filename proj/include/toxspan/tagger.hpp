#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toxspan/corpus.hpp"
#include "toxspan/crf.hpp"
#include "toxspan/lexicon.hpp"

namespace toxspan {

// Anything that maps a post's text to predicted toxic offsets.
class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual SpanSet tag(std::string_view text) const = 0;
  virtual std::string_view name() const = 0;
};

class LexiconTagger final : public Tagger {
 public:
  explicit LexiconTagger(Lexicon lexicon, MatchOptions options = {})
      : lexicon_(std::move(lexicon)), options_(std::move(options)) {}

  SpanSet tag(std::string_view text) const override { return match(lexicon_, text, options_); }
  std::string_view name() const override { return "lexicon"; }

 private:
  Lexicon lexicon_;
  MatchOptions options_;
};

class CrfTagger final : public Tagger {
 public:
  CrfTagger(crf::CrfModel model, std::optional<Lexicon> lexicon, bool gap_fill)
      : model_(std::move(model)), lexicon_(std::move(lexicon)), gap_fill_(gap_fill) {}

  SpanSet tag(std::string_view text) const override {
    return crf::predict(model_, text, lexicon_ ? &*lexicon_ : nullptr, gap_fill_);
  }
  std::string_view name() const override { return "crf"; }

 private:
  crf::CrfModel model_;
  std::optional<Lexicon> lexicon_;
  bool gap_fill_;
};

inline std::vector<PredictionRecord> predict_posts(const Tagger& tagger, std::span<const Post> posts) {
  std::vector<PredictionRecord> out;
  out.reserve(posts.size());
  for (const Post& post : posts) out.push_back({post.id, tagger.tag(post.text)});
  return out;
}

}  // namespace toxspan
