#include "toxspan/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

namespace toxspan::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "toxspan");
  std::ostringstream out, err;
  const int status = run(args, out, err);
  return {status, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::make_temp_dir("cli");
    testing::SyntheticConfig cfg;
    cfg.posts = 150;
    corpus_ = testing::make_synthetic_corpus(cfg);
    std::ostringstream data;
    write_dataset(corpus_.posts, data);
    testing::write_text(path("train.csv"), data.str());
    std::string words = "# planted\n";
    for (const auto& w : corpus_.toxic_words) words += w + "\n";
    testing::write_text(path("words.txt"), words);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  testing::SyntheticCorpus corpus_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).status, kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).status, kUsage);
  EXPECT_EQ(invoke({"evaluate", "--pred", "a", "--gold", "b", "--bogus"}).status, kUsage);
  EXPECT_EQ(invoke({"train", "--data", path("train.csv")}).status, kUsage);  // --out missing
  EXPECT_EQ(invoke({"train", "--data", path("train.csv"), "--out", path("m"), "--val-fraction", "1"}).status,
            kUsage);
  EXPECT_EQ(invoke({"predict", "--data", path("train.csv"), "--out", path("p"), "--method", "lexicon"}).status,
            kUsage);
}

TEST_F(CliTest, HelpExitsZero) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.status, kOk);
  EXPECT_NE(r.out.find("lexicon-build"), std::string::npos);
}

TEST_F(CliTest, MissingInputNamesPath) {
  const auto missing = path("nope.csv");
  const auto r = invoke({"evaluate", "--pred", missing, "--gold", path("train.csv")});
  EXPECT_EQ(r.status, kData);
  EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
}

TEST_F(CliTest, LexiconBuildMergesListsAndMinedWords) {
  testing::write_text(path("extra.txt"), "Zzz\n# comment\nzzz\n");
  ASSERT_EQ(invoke({"lexicon-build", "--out", path("lex.txt"), "--from", path("words.txt"), "--from",
                    path("extra.txt"), "--mine", path("train.csv")})
                .status,
            kOk);
  const auto lex = build_lexicon({WordSource{"lex", testing::read_text(path("lex.txt"))}});
  auto expected = corpus_.toxic_words;
  expected.push_back("zzz");
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(lex.words(), expected);
}

TEST_F(CliTest, LexiconPredictThenEvaluateMatchesLibrary) {
  ASSERT_EQ(invoke({"predict", "--method", "lexicon", "--lexicon", path("words.txt"), "--data",
                    path("train.csv"), "--out", path("pred.csv")})
                .status,
            kOk);
  const auto r = invoke({"evaluate", "--pred", path("pred.csv"), "--gold", path("train.csv"), "--out",
                         path("report.tsv")});
  ASSERT_EQ(r.status, kOk) << r.err;

  const LexiconTagger tagger(lexicon_from_words(corpus_.toxic_words));
  const auto records = predict_posts(tagger, corpus_.posts);
  std::ostringstream expected_preds, expected_report;
  write_predictions(records, expected_preds);
  evaluate_corpus(records, corpus_.posts).write(expected_report);
  EXPECT_EQ(testing::read_text(path("pred.csv")), expected_preds.str());
  EXPECT_EQ(r.out, expected_report.str());
  EXPECT_EQ(testing::read_text(path("report.tsv")), expected_report.str());
  EXPECT_NE(r.out.find("mean_f1=1.0000"), std::string::npos);
}

TEST_F(CliTest, TrainPredictCrf) {
  ASSERT_EQ(invoke({"train", "--data", path("train.csv"), "--out", path("model.crf"), "--seed", "7",
                    "--max-epochs", "5", "--quiet"})
                .status,
            kOk);
  const auto r = invoke({"predict", "--model", path("model.crf"), "--data", path("train.csv"), "--out",
                         path("pred.csv"), "--method", "crf"});
  ASSERT_EQ(r.status, kOk) << r.err;
  const auto preds = load_predictions(path("pred.csv"));
  EXPECT_EQ(preds.size(), corpus_.posts.size());
}

TEST_F(CliTest, LexiconFeatureModelNeedsLexicon) {
  ASSERT_EQ(invoke({"train", "--data", path("train.csv"), "--out", path("model.crf"), "--max-epochs", "1",
                    "--lexicon", path("words.txt"), "--quiet"})
                .status,
            kOk);
  EXPECT_EQ(invoke({"predict", "--model", path("model.crf"), "--data", path("train.csv"), "--out",
                    path("pred.csv")})
                .status,
            kUsage);
  EXPECT_EQ(invoke({"predict", "--model", path("model.crf"), "--lexicon", path("words.txt"), "--data",
                    path("train.csv"), "--out", path("pred.csv")})
                .status,
            kOk);
}

TEST_F(CliTest, ConfigFileMergesUnderFlags) {
  testing::write_text(path("train.cfg"), "# training\nseed = 7\nmax-epochs = 3\nquiet = true\n");
  ASSERT_EQ(invoke({"train", "--data", path("train.csv"), "--out", path("a.crf"), "--config", path("train.cfg")})
                .status,
            kOk);
  ASSERT_EQ(invoke({"train", "--data", path("train.csv"), "--out", path("b.crf"), "--seed", "7",
                    "--max-epochs", "3", "--quiet"})
                .status,
            kOk);
  EXPECT_EQ(testing::read_text(path("a.crf")), testing::read_text(path("b.crf")));

  // The flag wins over the file.
  ASSERT_EQ(invoke({"train", "--data", path("train.csv"), "--out", path("c.crf"), "--config", path("train.cfg"),
                    "--seed", "8"})
                .status,
            kOk);
  EXPECT_NE(testing::read_text(path("a.crf")), testing::read_text(path("c.crf")));

  testing::write_text(path("bad.cfg"), "no-such-key = 1\n");
  EXPECT_EQ(invoke({"train", "--data", path("train.csv"), "--out", path("d.crf"), "--config", path("bad.cfg")})
                .status,
            kUsage);
}

TEST_F(CliTest, GapFillFromConfig) {
  std::ostringstream data;
  const std::vector<Post> posts = {{"0", "so fucking stupid", SpanSet::iota(3, 17)}};
  write_dataset(posts, data);
  testing::write_text(path("tiny.csv"), data.str());
  testing::write_text(path("m.crf"),
                      "toxspan-crf\tversion=1\tlambda=0\ttemplates=identity\tintra_word=27,2a\tgap_fill=1\n"
                      "w=fucking\t1\t10\nw=stupid\t1\t10\n");
  ASSERT_EQ(invoke({"predict", "--model", path("m.crf"), "--data", path("tiny.csv"), "--out", path("on.csv")}).status,
            kOk);
  EXPECT_EQ(load_predictions(path("on.csv"))[0].predicted, SpanSet::iota(3, 17));
  testing::write_text(path("p.cfg"), "gap-fill = false\n");
  ASSERT_EQ(invoke({"predict", "--model", path("m.crf"), "--data", path("tiny.csv"), "--out", path("off.csv"),
                    "--config", path("p.cfg")})
                .status,
            kOk);
  EXPECT_EQ(load_predictions(path("off.csv"))[0].predicted,
            ranges_to_offsets({Range{3, 10}, Range{11, 17}}));
}

TEST_F(CliTest, EnsembleVotes) {
  testing::write_text(path("a.csv"), "spans,text_id\n\"[1, 2, 3]\",0\n");
  testing::write_text(path("b.csv"), "spans,text_id\n\"[2, 3, 4]\",0\n");
  testing::write_text(path("c.csv"), "spans,text_id\n\"[3, 5]\",0\n");
  ASSERT_EQ(invoke({"ensemble", "--pred", path("a.csv"), "--pred", path("b.csv"), "--pred", path("c.csv"),
                    "--out", path("v.csv")})
                .status,
            kOk);
  EXPECT_EQ(testing::read_text(path("v.csv")), "spans,text_id\n\"[2, 3]\",0\n");
}

TEST_F(CliTest, DivergentTrainingExitsThree) {
  const auto r = invoke({"train", "--data", path("train.csv"), "--out", path("m.crf"), "--lr", "1e300",
                         "--lambda", "1", "--quiet"});
  EXPECT_EQ(r.status, kNumerical);
  EXPECT_NE(r.err.find("non-finite"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("m.crf")));
}

TEST_F(CliTest, MalformedDataExitsTwo) {
  testing::write_text(path("bad.csv"), "spans,text\n\"[60]\",\"short\"\n");
  const auto r = invoke({"predict", "--method", "lexicon", "--lexicon", path("words.txt"), "--data",
                         path("bad.csv"), "--out", path("p.csv")});
  EXPECT_EQ(r.status, kData);
  EXPECT_NE(r.err.find("offset 60 exceeds text length 5"), std::string::npos);
}

}  // namespace
}  // namespace toxspan::cli
