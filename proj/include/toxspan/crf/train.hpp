#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "toxspan/corpus.hpp"
#include "toxspan/crf/inference.hpp"
#include "toxspan/crf/model.hpp"
#include "toxspan/error.hpp"
#include "toxspan/lexicon.hpp"
#include "toxspan/tokenize.hpp"

namespace toxspan::crf {

struct TrainConfig {
  double learning_rate = 1e-2;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 50;
  double l2_lambda = 1e-4;
  double validation_fraction = 0.2;
  std::size_t early_stop_patience = 10;
  std::uint64_t seed = 0;
  bool gap_fill = true;
  FeatureTemplates templates;
  TokenizerConfig tokenizer;

  void validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw UsageError("learning rate must be > 0");
    }
    if (batch_size == 0) throw UsageError("batch size must be positive");
    if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) throw UsageError("l2 lambda must be >= 0");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
      throw UsageError("validation fraction must lie in (0, 1)");
    }
    if (early_stop_patience == 0) throw UsageError("early-stop patience must be positive");
  }
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;       // regularized batch losses summed, per sequence
  double validation_loss = 0.0;  // mean per-sequence NLL, no regularization
  bool improved = false;
};

// Uniform integer in [0, bound) by rejection, so results do not depend on the
// standard library's distribution implementation.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_below(rng, i)]);
  }
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Seeded shuffle of row indices; the last floor(n * fraction) rows validate.
// At least one row always stays in the training part.
inline Split validation_split(std::size_t n, double fraction, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  seeded_shuffle(order, rng);
  std::size_t n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction));
  if (n_val >= n) n_val = n - 1;
  Split split;
  split.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
  split.validation.assign(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  return split;
}

namespace detail {

inline double mean_nll(const CrfModel& model, std::span<const CompiledSequence> seqs) {
  if (seqs.empty()) return 0.0;
  std::vector<double> scratch(model.num_params(), 0.0);
  double total = 0.0;
  for (const auto& seq : seqs) total += accumulate_sequence(model, seq, scratch);
  return total / static_cast<double>(seqs.size());
}

}  // namespace detail

// Maximum-likelihood training with Adam on mini-batches. Tokens are gold-toxic
// iff wholly covered by the post's gold offsets. Validation loss is checked once
// per epoch; training stops after `early_stop_patience` epochs without
// improvement and the best-validation weights are returned. Fully determined
// by the config and inputs.
inline CrfModel train(std::span<const Post> posts, const TrainConfig& config,
                      const Lexicon* lexicon = nullptr,
                      const std::function<void(const EpochStats&)>& on_epoch = {}) {
  config.validate();
  if (posts.empty()) throw DataError("train: empty training set");

  CrfModel model;
  model.templates = config.templates;
  model.templates.lexicon = config.templates.lexicon && lexicon != nullptr;
  model.tokenizer = config.tokenizer;
  model.l2_lambda = config.l2_lambda;
  model.gap_fill = config.gap_fill;

  std::mt19937_64 rng(config.seed);
  const Split split = validation_split(posts.size(), config.validation_fraction, rng);

  std::vector<CompiledSequence> train_seqs;
  train_seqs.reserve(split.train.size());
  for (std::size_t idx : split.train) {
    const auto tokens = tokenize(posts[idx].text, model.tokenizer);
    if (tokens.empty()) continue;
    CompiledSequence seq;
    seq.labels = labels_from_gold(tokens, posts[idx].gold);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      seq.tokens.push_back(resolve_and_register(model, extract_features(tokens, i, lexicon, model.templates)));
    }
    train_seqs.push_back(std::move(seq));
  }
  std::vector<CompiledSequence> val_seqs;
  for (std::size_t idx : split.validation) {
    const auto tokens = tokenize(posts[idx].text, model.tokenizer);
    if (tokens.empty()) continue;
    val_seqs.push_back(compile(model, tokens, lexicon, labels_from_gold(tokens, posts[idx].gold)));
  }
  if (config.max_epochs == 0 || train_seqs.empty()) return model;

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  const std::size_t dim = model.num_params();
  std::vector<double> m(dim, 0.0), v(dim, 0.0);
  std::vector<double> best(model.parameters().begin(), model.parameters().end());
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t stale = 0;
  std::size_t step = 0;
  std::size_t epoch = 0;

  std::vector<std::size_t> order(train_seqs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> gradient(dim, 0.0);

  while (epoch < config.max_epochs) {
    ++epoch;
    seeded_shuffle(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      std::fill(gradient.begin(), gradient.end(), 0.0);
      double loss = 0.0;
      for (std::size_t k = start; k < stop; ++k) loss += accumulate_sequence(model, train_seqs[order[k]], gradient);
      loss += add_l2_penalty(model, gradient);
      if (!std::isfinite(loss)) {
        throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) +
                             ", batch starting at " + std::to_string(start) +
                             " (learning rate " + format_double(config.learning_rate) + ")");
      }
      epoch_loss += loss;
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      auto params = model.parameters();
      for (std::size_t k = 0; k < dim; ++k) {
        const double g = gradient[k];
        m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g;
        v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g * g;
        params[k] -= config.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + kEps);
      }
    }
    if (!model.all_finite()) {
      throw NumericalError("train: non-finite weights after epoch " + std::to_string(epoch));
    }
    const double val_loss = val_seqs.empty() ? detail::mean_nll(model, train_seqs)
                                             : detail::mean_nll(model, val_seqs);
    if (!std::isfinite(val_loss)) {
      throw NumericalError("train: non-finite validation loss at epoch " + std::to_string(epoch));
    }
    EpochStats stats{epoch, epoch_loss / static_cast<double>(train_seqs.size()), val_loss, false};
    if (val_loss < best_loss) {
      best_loss = val_loss;
      best_epoch = epoch;
      best.assign(model.parameters().begin(), model.parameters().end());
      stale = 0;
      stats.improved = true;
    } else {
      ++stale;
    }
    if (on_epoch) on_epoch(stats);
    if (stale >= config.early_stop_patience) break;
  }

  std::copy(best.begin(), best.end(), model.parameters().begin());
  model.info.epochs_run = epoch;
  model.info.best_epoch = best_epoch;
  model.info.best_validation_loss = best_loss;
  return model;
}

// Tokenize, decode and map toxic tokens back to character offsets.
inline SpanSet predict(const CrfModel& model, std::string_view text, const Lexicon* lexicon,
                       bool gap_fill) {
  const auto tokens = tokenize(text, model.tokenizer);
  if (tokens.empty()) return {};
  const auto decoding = viterbi(build_lattice(model, tokens, lexicon));
  return token_labels_to_offsets(tokens, decoding.labels, gap_fill);
}

inline SpanSet predict(const CrfModel& model, std::string_view text, const Lexicon* lexicon = nullptr) {
  return predict(model, text, lexicon, model.gap_fill);
}

}  // namespace toxspan::crf
