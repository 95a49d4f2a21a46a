#include "toxspan/eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "test_support.hpp"

namespace toxspan {
namespace {

TEST(SpanF1, Identity) {
  const auto gold = SpanSet::iota(28, 35);
  EXPECT_EQ(span_f1(gold, gold), (EvalResult{1.0, 1.0, 1.0}));
}

TEST(SpanF1, PartialOverlap) {
  const auto r = span_f1(SpanSet{28, 29, 30}, SpanSet::iota(28, 35));
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.recall, 3.0 / 7.0);
  EXPECT_DOUBLE_EQ(r.f1, 0.6);
}

TEST(SpanF1, BothEmpty) { EXPECT_EQ(span_f1({}, {}), (EvalResult{1.0, 1.0, 1.0})); }

TEST(SpanF1, OneEmpty) {
  EXPECT_EQ(span_f1(SpanSet{0, 1}, {}), (EvalResult{0.0, 0.0, 0.0}));
  EXPECT_EQ(span_f1({}, SpanSet{0, 1}), (EvalResult{0.0, 0.0, 0.0}));
}

TEST(SpanF1, DisjointNonEmpty) { EXPECT_EQ(span_f1(SpanSet{1}, SpanSet{2}).f1, 0.0); }

TEST(SpanF1Property, BoundsSymmetryAndHarmonicMean) {
  testing::Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0, n = rng.below(20); i < n; ++i) a.push_back(rng.below(30));
    for (std::size_t i = 0, n = rng.below(20); i < n; ++i) b.push_back(rng.below(30));
    const SpanSet p(a), g(b);
    const auto r = span_f1(p, g);
    const auto swapped = span_f1(g, p);
    ASSERT_EQ(r.precision, swapped.recall);
    ASSERT_EQ(r.recall, swapped.precision);
    ASSERT_DOUBLE_EQ(r.f1, swapped.f1);
    for (double v : {r.precision, r.recall, r.f1}) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
    ASSERT_LE(r.f1, std::max(r.precision, r.recall) + 1e-15);
    if (r.precision > 0 && r.recall > 0) {
      ASSERT_NEAR(r.f1, 2.0 / (1.0 / r.precision + 1.0 / r.recall), 1e-12);
    }
    // A pure set function: shifting every offset by the same amount changes nothing.
    std::vector<std::size_t> a2, b2;
    for (auto x : p) a2.push_back(x + 1000);
    for (auto x : g) b2.push_back(x + 1000);
    ASSERT_EQ(span_f1(SpanSet(a2), SpanSet(b2)), r);
  }
}

TEST(EvaluateCorpus, MeanOfPerPostScores) {
  const std::vector<Post> gold = {{"a", "xxxx", SpanSet{0, 1}}, {"b", "xxxx", SpanSet{0, 1, 2}}};
  // "a": exact. "b": P = 1, R = 1/3, F1 = 0.5.
  const std::vector<PredictionRecord> preds = {{"a", SpanSet{0, 1}}, {"b", SpanSet{0}}};
  const auto report = evaluate_corpus(preds, gold);
  EXPECT_DOUBLE_EQ(report.per_post[1].result.f1, 0.5);
  EXPECT_DOUBLE_EQ(report.mean_f1, 0.75);
  EXPECT_EQ(report.posts_scored, 2u);
}

TEST(EvaluateCorpus, MissingPredictionForEmptyGoldScoresOne) {
  const std::vector<Post> gold = {{"a", "xx", SpanSet{}}};
  EXPECT_EQ(evaluate_corpus({}, gold).mean_f1, 1.0);
}

TEST(EvaluateCorpus, NoPredictionsOverTablePosts) {
  const auto report = evaluate_corpus({}, testing::table_posts());
  EXPECT_DOUBLE_EQ(report.mean_f1, 0.25);
  EXPECT_EQ(report.empty_gold_posts, 1u);
}

TEST(EvaluateCorpus, GoldAgainstItself) {
  std::vector<PredictionRecord> preds;
  for (const auto& p : testing::table_posts()) preds.push_back({p.id, p.gold});
  const auto report = evaluate_corpus(preds, testing::table_posts());
  for (const auto& e : report.per_post) EXPECT_EQ(e.result.f1, 1.0);
  EXPECT_EQ(report.mean_f1, 1.0);
}

TEST(EvaluateCorpus, RejectsDuplicateAndUnknownIds) {
  const std::vector<Post> gold = {{"a", "xx", SpanSet{}}};
  const std::vector<PredictionRecord> dup = {{"a", {}}, {"a", {}}};
  EXPECT_THROW(evaluate_corpus(dup, gold), DataError);
  const std::vector<PredictionRecord> unknown = {{"zz", {}}, {"yy", {}}};
  try {
    evaluate_corpus(unknown, gold);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("yy"), std::string::npos);
  }
}

TEST(EvaluateCorpus, RejectsPredictionOutsideText) {
  const std::vector<Post> gold = {{"a", "short", SpanSet{}}};
  const std::vector<PredictionRecord> preds = {{"a", SpanSet{60}}};
  EXPECT_THROW(evaluate_corpus(preds, gold), DataError);
}

TEST(EvaluateCorpus, OrderInvariant) {
  testing::Rng rng(5);
  std::vector<Post> gold;
  std::vector<PredictionRecord> preds;
  for (int i = 0; i < 40; ++i) {
    std::vector<std::size_t> g, p;
    for (std::size_t k = 0, n = rng.below(6); k < n; ++k) g.push_back(rng.below(20));
    for (std::size_t k = 0, n = rng.below(6); k < n; ++k) p.push_back(rng.below(20));
    gold.push_back({std::to_string(i), std::string(20, 'x'), SpanSet(g)});
    if (rng.chance(0.8)) preds.push_back({std::to_string(i), SpanSet(p)});
  }
  const double base = evaluate_corpus(preds, gold).mean_f1;
  std::reverse(gold.begin(), gold.end());
  std::rotate(preds.begin(), preds.begin() + 7, preds.end());
  EXPECT_NEAR(evaluate_corpus(preds, gold).mean_f1, base, 1e-12);
}

TEST(EvalReport, Format) {
  const std::vector<Post> gold = {{"a", "xxxx", SpanSet{0, 1}}, {"b", "xxxx", SpanSet{0, 1, 2}}};
  const std::vector<PredictionRecord> preds = {{"a", SpanSet{0, 1}}, {"b", SpanSet{0}}};
  std::ostringstream out;
  evaluate_corpus(preds, gold).write(out);
  EXPECT_EQ(out.str(),
            "id\tprecision\trecall\tf1\n"
            "a\t1.0000\t1.0000\t1.0000\n"
            "b\t1.0000\t0.3333\t0.5000\n"
            "mean_f1=0.7500\n");
}

TEST(MajorityVote, WorkedExample) {
  EXPECT_EQ(majority_vote({SpanSet{1, 2, 3}, SpanSet{2, 3, 4}, SpanSet{3, 5}}), (SpanSet{2, 3}));
}

TEST(MajorityVote, Unanimity) {
  const SpanSet s{4, 5, 9};
  EXPECT_EQ(majority_vote({s, s, s, s}), s);
  EXPECT_EQ(majority_vote({s}), s);
}

TEST(MajorityVote, EvenTieExcluded) { EXPECT_TRUE(majority_vote({SpanSet{1}, SpanSet{2}}).empty()); }

TEST(MajorityVote, EmptyInput) { EXPECT_THROW(majority_vote(std::span<const SpanSet>{}), UsageError); }

TEST(MajorityVoteProperty, SubsetOfUnionAndMonotone) {
  testing::Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<SpanSet> sets;
    for (std::size_t s = 0, k = 1 + rng.below(6); s < k; ++s) {
      std::vector<std::size_t> raw;
      for (std::size_t i = 0, n = rng.below(10); i < n; ++i) raw.push_back(rng.below(15));
      sets.emplace_back(raw);
    }
    const auto voted = majority_vote(sets);
    SpanSet all;
    for (const auto& s : sets) all = all.set_union(s);
    ASSERT_TRUE(voted.is_subset_of(all));
    auto more = sets;
    more.push_back(voted.set_union(SpanSet{static_cast<std::size_t>(rng.below(15))}));
    ASSERT_TRUE(voted.is_subset_of(majority_vote(more)));
  }
}

TEST(EnsemblePredictions, AlignsById) {
  const std::vector<std::vector<PredictionRecord>> systems = {
      {{"x", SpanSet{1, 2, 3}}, {"y", SpanSet{0}}},
      {{"y", SpanSet{0}}, {"x", SpanSet{2, 3, 4}}},
      {{"x", SpanSet{3, 5}}, {"z", SpanSet{9}}},
  };
  const auto voted = ensemble_predictions(systems);
  ASSERT_EQ(voted.size(), 3u);
  EXPECT_EQ(voted[0], (PredictionRecord{"x", SpanSet{2, 3}}));
  EXPECT_EQ(voted[1], (PredictionRecord{"y", SpanSet{0}}));
  EXPECT_EQ(voted[2], (PredictionRecord{"z", SpanSet{}}));
}

}  // namespace
}  // namespace toxspan
