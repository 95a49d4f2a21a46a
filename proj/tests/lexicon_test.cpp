#include "toxspan/lexicon.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "test_support.hpp"

namespace toxspan {
namespace {

TEST(BuildLexicon, UnionWithCaseFolding) {
  const auto lex = build_lexicon({{"a", "Stupid\nfucked\n"}, {"b", "fucked\nsilly\n"}});
  EXPECT_EQ(lex.size(), 3u);
  EXPECT_EQ(lex.words(), (std::vector<std::string>{"fucked", "silly", "stupid"}));
  ASSERT_EQ(lex.sources().size(), 2u);
  EXPECT_EQ(lex.sources()[0].words, 2u);
}

TEST(BuildLexicon, NoSources) { EXPECT_TRUE(build_lexicon(std::span<const WordSource>{}).empty()); }

TEST(BuildLexicon, CommentsAndBlankLines) {
  const auto lex = build_lexicon({{"list", "# comment\nasshole\n\n  \r\n"}});
  EXPECT_EQ(lex.words(), (std::vector<std::string>{"asshole"}));
}

TEST(BuildLexicon, InvalidUtf8NamesSource) {
  try {
    build_lexicon({{"bad-words.txt", "ok\n\xc3\x28\n"}});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("bad-words.txt"), std::string::npos);
  }
}

TEST(Lexicon, SaveIsSortedOneWordPerLine) {
  const auto lex = lexicon_from_words(std::vector<std::string>{"zeta", "Alpha", "mid"});
  std::ostringstream out;
  lex.save(out);
  EXPECT_EQ(out.str(), "alpha\nmid\nzeta\n");
}

TEST(MineTrainingLexicon, TablePosts) {
  EXPECT_EQ(mine_training_lexicon(testing::table_posts()),
            (std::vector<std::string>{"asshole", "fucked", "silly", "stupid"}));
}

TEST(MineTrainingLexicon, NoAnnotations) {
  const std::vector<Post> posts = {{"0", "nothing here", {}}, {"1", "nor here", {}}};
  EXPECT_TRUE(mine_training_lexicon(posts).empty());
}

TEST(MineTrainingLexicon, PartialCoverageExcluded) {
  const std::vector<Post> posts = {{"0", "completely fucked", SpanSet::iota(11, 15)}};
  EXPECT_TRUE(mine_training_lexicon(posts).empty());
}

TEST(Match, TableExamples) {
  const auto lex = lexicon_from_words(std::vector<std::string>{"stupid", "fucked"});
  EXPECT_EQ(match(lex, "Stupid hatcheries have completely fucked everything"),
            ranges_to_offsets({Range{0, 6}, Range{34, 40}}));
  const auto silly = lexicon_from_words(std::vector<std::string>{"silly"});
  EXPECT_EQ(match(silly, "You're just silly."), SpanSet::iota(12, 17));
}

TEST(Match, WholeTokensOnly) {
  const auto lex = lexicon_from_words(std::vector<std::string>{"ass"});
  EXPECT_TRUE(match(lex, "assistance appreciated").empty());
}

TEST(Match, PunctuationNeverMatches) {
  const auto lex = lexicon_from_words(std::vector<std::string>{"!"});
  EXPECT_TRUE(match(lex, "hey !").empty());
}

TEST(NormalizeCensored, PositionalPattern) {
  const auto lex = lexicon_from_words(std::vector<std::string>{"fuck", "flak", "fork", "fucker"});
  auto hits = normalize_censored(lex, "f**k");
  std::sort(hits.begin(), hits.end());
  EXPECT_EQ(hits, (std::vector<std::string>{"flak", "fork", "fuck"}));
  EXPECT_TRUE(normalize_censored(lex, "****").empty());
  EXPECT_TRUE(normalize_censored(lex, "fuck").empty());  // no asterisk, nothing to expand
}

TEST(Match, CensoredMitigationIsOptIn) {
  const auto lex = lexicon_from_words(std::vector<std::string>{"fuck", "flak"});
  EXPECT_TRUE(match(lex, "f**k off").empty());
  MatchOptions options;
  options.censored = true;
  EXPECT_EQ(match(lex, "f**k off", options), SpanSet::iota(0, 4));
  EXPECT_EQ(match(lex, "F**K off", options), SpanSet::iota(0, 4));
}

TEST(LexiconProperty, TrieAgreesWithLinearScan) {
  testing::Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> inserted;
    for (std::size_t i = 0, n = rng.below(60); i < n; ++i) inserted.push_back(testing::random_word(rng, 1, 5));
    const auto lex = lexicon_from_words(inserted);
    for (int q = 0; q < 200; ++q) {
      const auto query = testing::random_word(rng, 1, 5);
      const bool naive = std::find(inserted.begin(), inserted.end(), query) != inserted.end();
      ASSERT_EQ(lex.contains(query), naive) << query;
    }
    for (const auto& w : inserted) ASSERT_TRUE(lex.contains(w));
  }
}

TEST(MatchProperty, SubsetOfWordTokensAndMonotone) {
  testing::Rng rng(17);
  std::vector<std::string> vocab;
  for (int i = 0; i < 30; ++i) vocab.push_back(testing::random_word(rng, 1, 4));
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    for (std::size_t i = 0, n = 1 + rng.below(12); i < n; ++i) {
      text += vocab[rng.below(vocab.size())];
      text += rng.chance(0.2) ? ". " : " ";
    }
    std::vector<std::string> small, large;
    for (const auto& w : vocab) {
      if (rng.chance(0.3)) small.push_back(w);
      if (rng.chance(0.3)) large.push_back(w);
    }
    large.insert(large.end(), small.begin(), small.end());
    const auto lex_small = lexicon_from_words(small);
    const auto lex_large = lexicon_from_words(large);
    SpanSet words;
    for (const auto& t : tokenize(text)) {
      if (t.is_word) words = words.set_union(SpanSet::iota(t.start, t.end));
    }
    const auto a = match(lex_small, text);
    ASSERT_TRUE(a.is_subset_of(words));
    ASSERT_TRUE(a.is_subset_of(match(lex_large, text)));
  }
}

TEST(MatchProperty, MinedLexiconRecoversTrainingAnnotations) {
  testing::SyntheticConfig cfg;
  cfg.posts = 300;
  const auto corpus = testing::make_synthetic_corpus(cfg);
  const auto lex = lexicon_from_words(mine_training_lexicon(corpus.posts));
  for (const auto& post : corpus.posts) {
    SpanSet mined_ranges;
    for (const auto& t : tokenize(post.text)) {
      if (t.is_word && post.gold.contains_range(t.range())) {
        mined_ranges = mined_ranges.set_union(SpanSet::iota(t.start, t.end));
      }
    }
    ASSERT_TRUE(mined_ranges.is_subset_of(match(lex, post.text))) << post.text;
  }
}

}  // namespace
}  // namespace toxspan
