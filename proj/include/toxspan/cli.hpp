#pragma once

// Command-line front end: lexicon-build | train | predict | evaluate | ensemble.
//
// Every subcommand accepts `--config FILE`, a `key = value` file (one per
// line, `#` comments) whose keys are long option names. Values given on the
// command line win over the file.
//
// Exit status: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "toxspan/corpus.hpp"
#include "toxspan/crf.hpp"
#include "toxspan/error.hpp"
#include "toxspan/eval.hpp"
#include "toxspan/lexicon.hpp"
#include "toxspan/tagger.hpp"
#include "toxspan/unicode.hpp"

namespace toxspan::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct Options {
  std::string config;

  // lexicon-build
  std::vector<std::string> from;
  std::string mine;

  // shared paths
  std::string data;
  std::string out;
  std::string model;
  std::string lexicon;
  std::vector<std::string> pred;
  std::string gold;

  // tokenizer / matching
  std::string intra_word = "'*";
  bool censored = false;
  std::string method = "crf";
  std::optional<bool> gap_fill;

  // training
  crf::TrainConfig train;
  std::string templates = crf::FeatureTemplates{}.to_string();
  bool quiet = false;
};

// `key = value` lines; repeated keys accumulate.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  const std::string content = read_file(path);
  std::vector<std::pair<std::string, std::string>> items;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
    items.emplace_back(std::move(key), std::move(value));
  }
  return items;
}

namespace detail {

inline void add_config_option(CLI::App& sub, Options& o) {
  sub.add_option("--config", o.config, "key = value file; command-line flags take precedence");
}

inline void add_tokenizer_option(CLI::App& sub, Options& o) {
  sub.add_option("--intra-word", o.intra_word,
                 "characters kept inside word tokens (default: apostrophe and asterisk)");
}

inline void build_app(CLI::App& app, Options& o) {
  app.require_subcommand(1, 1);
  app.fallthrough(false);

  auto* lex = app.add_subcommand("lexicon-build", "build a lexicon from word lists and training annotations");
  lex->add_option("--out", o.out, "output lexicon, one word per line")->required();
  lex->add_option("--from", o.from, "word list file (repeatable)");
  lex->add_option("--mine", o.mine, "dataset CSV whose gold-covered words join the lexicon");
  add_tokenizer_option(*lex, o);
  add_config_option(*lex, o);

  auto* train = app.add_subcommand("train", "train a CRF tagger");
  train->add_option("--data", o.data, "training dataset CSV")->required();
  train->add_option("--out", o.out, "model file to write")->required();
  train->add_option("--seed", o.train.seed, "random seed");
  train->add_option("--lr", o.train.learning_rate, "Adam learning rate")->check(CLI::PositiveNumber);
  train->add_option("--batch-size", o.train.batch_size, "mini-batch size")->check(CLI::PositiveNumber);
  train->add_option("--max-epochs", o.train.max_epochs, "maximum epochs")->check(CLI::PositiveNumber);
  train->add_option("--lambda", o.train.l2_lambda, "L2 regularization strength")->check(CLI::NonNegativeNumber);
  train->add_option("--val-fraction", o.train.validation_fraction, "validation share of the training rows")
      ->check(CLI::Range(0.0, 1.0));
  train->add_option("--patience", o.train.early_stop_patience, "epochs without validation improvement before stopping")
      ->check(CLI::PositiveNumber);
  train->add_option("--lexicon", o.lexicon, "lexicon file enabling the lexicon-membership feature");
  train->add_option("--templates", o.templates, "comma-separated feature templates");
  train->add_flag("--gap-fill,!--no-gap-fill", o.gap_fill, "default span gap filling stored in the model");
  train->add_flag("--quiet", o.quiet, "no per-epoch progress on stderr");
  add_tokenizer_option(*train, o);
  add_config_option(*train, o);

  auto* predict = app.add_subcommand("predict", "tag a dataset");
  predict->add_option("--data", o.data, "dataset CSV to tag")->required();
  predict->add_option("--out", o.out, "prediction CSV to write")->required();
  predict->add_option("--method", o.method, "tagger: lexicon or crf")
      ->check(CLI::IsMember({"lexicon", "crf"}));
  predict->add_option("--model", o.model, "CRF model file (method crf)");
  predict->add_option("--lexicon", o.lexicon, "lexicon file (required for method lexicon)");
  predict->add_flag("--censored", o.censored, "let asterisk-censored tokens match lexicon entries");
  predict->add_flag("--gap-fill,!--no-gap-fill", o.gap_fill, "include characters between adjacent toxic tokens");
  add_tokenizer_option(*predict, o);
  add_config_option(*predict, o);

  auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold spans");
  evaluate->add_option("--pred", o.pred, "prediction CSV")->required()->expected(1);
  evaluate->add_option("--gold", o.gold, "gold dataset CSV")->required();
  evaluate->add_option("--out", o.out, "also write the report to this file");
  add_config_option(*evaluate, o);

  auto* ensemble = app.add_subcommand("ensemble", "majority-vote several prediction files");
  ensemble->add_option("--pred", o.pred, "prediction CSV (repeatable)")->required();
  ensemble->add_option("--out", o.out, "voted prediction CSV")->required();
  add_config_option(*ensemble, o);
}

inline std::u32string intra_word_set(const std::string& utf8) {
  return unicode::decode_utf8(utf8, "--intra-word");
}

template <typename Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  fn(out);
  out.flush();
  if (!out) throw DataError("write to '" + path + "' failed");
}

inline void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

inline Lexicon load_lexicon(const std::string& path) {
  return build_lexicon({WordSource{path, read_file(path)}});
}

inline int run_lexicon_build(const Options& o, std::ostream& err) {
  std::vector<WordSource> sources;
  for (const auto& path : o.from) sources.push_back({path, read_file(path)});
  Lexicon lex = build_lexicon(std::span<const WordSource>(sources));
  if (!o.mine.empty()) {
    std::vector<std::string> warnings;
    const auto posts = load_dataset(o.mine, &warnings);
    print_warnings(warnings, err);
    TokenizerConfig tok;
    tok.intra_word = intra_word_set(o.intra_word);
    const auto mined = mine_training_lexicon(posts, tok);
    for (const auto& w : mined) lex.insert(w);
    lex.add_source_note({o.mine + " (mined)", mined.size()});
  }
  for (const auto& note : lex.sources()) err << note.name << ": " << note.words << " words\n";
  err << "lexicon entries: " << lex.size() << '\n';
  write_file(o.out, [&](std::ostream& out) { lex.save(out); });
  return kOk;
}

inline int run_train(const Options& o, std::ostream& err) {
  std::vector<std::string> warnings;
  const auto posts = load_dataset(o.data, &warnings);
  print_warnings(warnings, err);
  crf::TrainConfig config = o.train;
  config.templates = crf::FeatureTemplates::parse(o.templates);
  config.tokenizer.intra_word = intra_word_set(o.intra_word);
  config.gap_fill = o.gap_fill.value_or(true);
  std::optional<Lexicon> lex;
  if (!o.lexicon.empty()) lex = load_lexicon(o.lexicon);
  auto progress = [&](const crf::EpochStats& s) {
    if (o.quiet) return;
    err << "epoch " << s.epoch << " train_loss=" << crf::format_double(s.train_loss)
        << " validation_loss=" << crf::format_double(s.validation_loss) << (s.improved ? " *" : "") << '\n';
  };
  const auto model = crf::train(posts, config, lex ? &*lex : nullptr, progress);
  write_file(o.out, [&](std::ostream& out) { model.save(out); });
  return kOk;
}

inline int run_predict(const Options& o, std::ostream& err) {
  std::vector<std::string> warnings;
  const auto posts = load_dataset(o.data, &warnings);
  print_warnings(warnings, err);
  std::unique_ptr<Tagger> tagger;
  if (o.method == "lexicon") {
    if (o.lexicon.empty()) throw UsageError("predict --method lexicon requires --lexicon");
    MatchOptions options;
    options.censored = o.censored;
    options.tokenizer.intra_word = intra_word_set(o.intra_word);
    tagger = std::make_unique<LexiconTagger>(load_lexicon(o.lexicon), options);
  } else {
    if (o.model.empty()) throw UsageError("predict --method crf requires --model");
    std::ifstream in(o.model, std::ios::binary);
    if (!in) throw DataError("cannot open '" + o.model + "'");
    auto model = crf::CrfModel::load(in);
    std::optional<Lexicon> lex;
    if (!o.lexicon.empty()) lex = load_lexicon(o.lexicon);
    if (model.templates.lexicon && !lex) {
      throw UsageError("model " + o.model + " uses lexicon features; pass --lexicon");
    }
    const bool gap_fill = o.gap_fill.value_or(model.gap_fill);
    tagger = std::make_unique<CrfTagger>(std::move(model), std::move(lex), gap_fill);
  }
  const auto records = predict_posts(*tagger, posts);
  write_file(o.out, [&](std::ostream& out) { write_predictions(records, out); });
  return kOk;
}

inline int run_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  const auto gold = load_dataset(o.gold, &warnings);
  const auto predictions = load_predictions(o.pred.front(), &warnings);
  print_warnings(warnings, err);
  const auto report = evaluate_corpus(predictions, gold);
  report.write(out);
  if (!o.out.empty()) write_file(o.out, [&](std::ostream& f) { report.write(f); });
  return kOk;
}

inline int run_ensemble(const Options& o, std::ostream& err) {
  std::vector<std::vector<PredictionRecord>> systems;
  std::vector<std::string> warnings;
  for (const auto& path : o.pred) systems.push_back(load_predictions(path, &warnings));
  print_warnings(warnings, err);
  const auto voted = ensemble_predictions(systems);
  write_file(o.out, [&](std::ostream& f) { write_predictions(voted, f); });
  return kOk;
}

// Parses `args` (args[0] is the program name) into `o`; returns the chosen
// subcommand. Config-file entries are appended as `--key=value` for options the
// command line left unset, then everything is parsed again.
inline std::string parse(const std::vector<std::string>& args, Options& o, std::ostream& out,
                         std::ostream& err, int& early_exit) {
  early_exit = -1;
  auto parse_once = [&](const std::vector<std::string>& argv, Options& into, CLI::App& app) {
    build_app(app, into);
    std::vector<std::string> rev(argv.rbegin(), argv.rend() - 1);
    app.parse(rev);
  };

  CLI::App first{"Toxic span detection toolkit", "toxspan"};
  Options scratch;
  try {
    parse_once(args, scratch, first);
  } catch (const CLI::ParseError& e) {
    early_exit = first.exit(e, out, err);
    if (early_exit != 0) early_exit = kUsage;
    return {};
  }
  CLI::App* sub = first.get_subcommands().front();
  std::vector<std::string> merged = args;
  if (!scratch.config.empty()) {
    for (const auto& [key, value] : read_config(scratch.config)) {
      CLI::Option* opt = sub->get_option_no_throw("--" + key);
      if (opt == nullptr || key == "config") {
        throw UsageError(scratch.config + ": unknown key '" + key + "' for " + sub->get_name());
      }
      if (opt->count() > 0) continue;
      merged.push_back("--" + key + "=" + value);
    }
  }
  CLI::App second{"Toxic span detection toolkit", "toxspan"};
  try {
    parse_once(merged, o, second);
  } catch (const CLI::ParseError& e) {
    early_exit = second.exit(e, out, err);
    if (early_exit != 0) early_exit = kUsage;
    return {};
  }
  return second.get_subcommands().front()->get_name();
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  try {
    Options o;
    int early_exit = -1;
    const std::string command = detail::parse(args, o, out, err, early_exit);
    if (early_exit >= 0) return early_exit;
    if (command == "lexicon-build") return detail::run_lexicon_build(o, err);
    if (command == "train") return detail::run_train(o, err);
    if (command == "predict") return detail::run_predict(o, err);
    if (command == "evaluate") return detail::run_evaluate(o, out, err);
    if (command == "ensemble") return detail::run_ensemble(o, err);
    err << "unknown subcommand '" << command << "'\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace toxspan::cli
