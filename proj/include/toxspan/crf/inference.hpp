#pragma once

// Exact inference on a two-label chain: Viterbi decoding and log-space
// forward-backward, plus the regularized negative log-likelihood and its
// gradient.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "toxspan/crf/features.hpp"
#include "toxspan/crf/model.hpp"
#include "toxspan/error.hpp"
#include "toxspan/lexicon.hpp"
#include "toxspan/token.hpp"

namespace toxspan::crf {

using LabelScores = std::array<double, kNumLabels>;

// Per-position emission scores and the shared transition matrix, all in log
// space. Path score of y = sum_i e[i][y_i] + sum_i T[y_i][y_{i+1}].
struct Lattice {
  std::vector<LabelScores> emissions;
  TransitionMatrix transitions{};

  std::size_t size() const { return emissions.size(); }

  double path_score(std::span<const Label> labels) const {
    double score = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      score += emissions[i][labels[i]];
      if (i > 0) score += transitions[labels[i - 1]][labels[i]];
    }
    return score;
  }
};

inline double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

// Feature ids and values of one token, resolved against a model. Features the
// model has never seen are dropped.
using CompiledToken = std::vector<std::pair<std::uint32_t, double>>;

struct CompiledSequence {
  std::vector<CompiledToken> tokens;
  std::vector<Label> labels;  // empty when unlabelled
};

inline CompiledToken resolve(const CrfModel& model, const FeatureVector& fv) {
  CompiledToken out;
  out.reserve(fv.size());
  for (const auto& [name, value] : fv) {
    if (auto id = model.feature_id(name)) out.emplace_back(*id, value);
  }
  return out;
}

// Like resolve, but registers unseen features with zero weight.
inline CompiledToken resolve_and_register(CrfModel& model, const FeatureVector& fv) {
  CompiledToken out;
  out.reserve(fv.size());
  for (const auto& [name, value] : fv) out.emplace_back(model.add_feature(name), value);
  return out;
}

inline CompiledSequence compile(const CrfModel& model, std::span<const Token> tokens,
                                const Lexicon* lexicon, std::span<const Label> labels = {}) {
  if (!labels.empty() && labels.size() != tokens.size()) {
    throw UsageError("compile: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(tokens.size()) + " tokens");
  }
  CompiledSequence seq;
  seq.tokens.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    seq.tokens.push_back(resolve(model, extract_features(tokens, i, lexicon, model.templates)));
  }
  seq.labels.assign(labels.begin(), labels.end());
  return seq;
}

inline Lattice build_lattice(const CrfModel& model, const CompiledSequence& seq) {
  if (seq.tokens.empty()) throw UsageError("build_lattice: empty token sequence");
  Lattice lattice;
  lattice.transitions = model.transitions();
  lattice.emissions.reserve(seq.tokens.size());
  for (const auto& token : seq.tokens) {
    LabelScores e{};
    for (const auto& [id, value] : token) {
      for (Label y = 0; y < kNumLabels; ++y) e[y] += model.weight(id, y) * value;
    }
    lattice.emissions.push_back(e);
  }
  return lattice;
}

inline Lattice build_lattice(const CrfModel& model, std::span<const Token> tokens,
                             const Lexicon* lexicon = nullptr) {
  if (tokens.empty()) throw UsageError("build_lattice: empty token sequence");
  return build_lattice(model, compile(model, tokens, lexicon));
}

struct Decoding {
  std::vector<Label> labels;
  double score = 0.0;
};

// Highest-scoring labelling. Ties go to the non-toxic label.
inline Decoding viterbi(const Lattice& lattice) {
  const std::size_t n = lattice.size();
  Decoding out;
  if (n == 0) return out;
  std::vector<std::array<Label, kNumLabels>> back(n);
  LabelScores best = lattice.emissions[0];
  for (std::size_t i = 1; i < n; ++i) {
    LabelScores next{};
    for (Label y = 0; y < kNumLabels; ++y) {
      Label arg = 0;
      double top = best[0] + lattice.transitions[0][y];
      for (Label prev = 1; prev < kNumLabels; ++prev) {
        const double s = best[prev] + lattice.transitions[prev][y];
        if (s > top) top = s, arg = prev;
      }
      next[y] = top + lattice.emissions[i][y];
      back[i][y] = arg;
    }
    best = next;
  }
  Label last = 0;
  for (Label y = 1; y < kNumLabels; ++y) {
    if (best[y] > best[last]) last = y;
  }
  out.score = best[last];
  out.labels.assign(n, kNotToxic);
  out.labels[n - 1] = last;
  for (std::size_t i = n - 1; i > 0; --i) out.labels[i - 1] = back[i][out.labels[i]];
  return out;
}

using PairScores = std::array<std::array<double, kNumLabels>, kNumLabels>;

struct Marginals {
  double log_partition = 0.0;           // from the forward pass
  double log_partition_backward = 0.0;  // same quantity from the backward pass
  std::vector<LabelScores> unary;       // P(y_i = y)
  std::vector<PairScores> pairwise;     // P(y_i = a, y_{i+1} = b), n - 1 entries
};

inline Marginals forward_backward(const Lattice& lattice) {
  const std::size_t n = lattice.size();
  Marginals m;
  if (n == 0) return m;
  const auto& T = lattice.transitions;
  const auto& e = lattice.emissions;
  std::vector<LabelScores> alpha(n), beta(n);
  alpha[0] = e[0];
  for (std::size_t i = 1; i < n; ++i) {
    for (Label y = 0; y < kNumLabels; ++y) {
      double acc = -std::numeric_limits<double>::infinity();
      for (Label prev = 0; prev < kNumLabels; ++prev) acc = log_sum_exp(acc, alpha[i - 1][prev] + T[prev][y]);
      alpha[i][y] = acc + e[i][y];
    }
  }
  beta[n - 1] = {0.0, 0.0};
  for (std::size_t i = n - 1; i > 0; --i) {
    for (Label y = 0; y < kNumLabels; ++y) {
      double acc = -std::numeric_limits<double>::infinity();
      for (Label next = 0; next < kNumLabels; ++next) {
        acc = log_sum_exp(acc, T[y][next] + e[i][next] + beta[i][next]);
      }
      beta[i - 1][y] = acc;
    }
  }
  m.log_partition = log_sum_exp(alpha[n - 1][0], alpha[n - 1][1]);
  m.log_partition_backward = log_sum_exp(e[0][0] + beta[0][0], e[0][1] + beta[0][1]);
  const double log_z = m.log_partition;
  m.unary.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (Label y = 0; y < kNumLabels; ++y) m.unary[i][y] = std::exp(alpha[i][y] + beta[i][y] - log_z);
  }
  m.pairwise.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (Label a = 0; a < kNumLabels; ++a) {
      for (Label b = 0; b < kNumLabels; ++b) {
        m.pairwise[i][a][b] = std::exp(alpha[i][a] + T[a][b] + e[i + 1][b] + beta[i + 1][b] - log_z);
      }
    }
  }
  return m;
}

// Adds log Z - score(gold) for one sequence to the return value and the
// corresponding (expected - empirical) counts into `gradient`. No
// regularization.
inline double accumulate_sequence(const CrfModel& model, const CompiledSequence& seq,
                                  std::span<double> gradient) {
  if (seq.tokens.empty()) return 0.0;
  if (seq.labels.size() != seq.tokens.size()) {
    throw UsageError("neg_log_likelihood: " + std::to_string(seq.labels.size()) +
                     " labels for " + std::to_string(seq.tokens.size()) + " tokens");
  }
  const Lattice lattice = build_lattice(model, seq);
  const Marginals m = forward_backward(lattice);
  const std::size_t n = seq.tokens.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [id, value] : seq.tokens[i]) {
      for (Label y = 0; y < kNumLabels; ++y) {
        gradient[CrfModel::emission_index(id, y)] += m.unary[i][y] * value;
      }
      gradient[CrfModel::emission_index(id, seq.labels[i])] -= value;
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (Label a = 0; a < kNumLabels; ++a) {
      for (Label b = 0; b < kNumLabels; ++b) gradient[CrfModel::transition_index(a, b)] += m.pairwise[i][a][b];
    }
    gradient[CrfModel::transition_index(seq.labels[i], seq.labels[i + 1])] -= 1.0;
  }
  return m.log_partition - lattice.path_score(seq.labels);
}

// Adds lambda * w to `gradient` and returns (lambda / 2) * ||w||^2.
inline double add_l2_penalty(const CrfModel& model, std::span<double> gradient) {
  const auto params = model.parameters();
  double sq = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    sq += params[k] * params[k];
    gradient[k] += model.l2_lambda * params[k];
  }
  return 0.5 * model.l2_lambda * sq;
}

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // same layout as CrfModel::parameters()
};

// Sum over the batch of (log Z - gold path score) plus (lambda / 2) * ||w||^2
// over all parameters, emission and transition alike.
inline LossAndGradient neg_log_likelihood_and_gradient(const CrfModel& model,
                                                       std::span<const CompiledSequence> batch) {
  LossAndGradient out;
  out.gradient.assign(model.num_params(), 0.0);
  for (const auto& seq : batch) out.loss += accumulate_sequence(model, seq, out.gradient);
  out.loss += add_l2_penalty(model, out.gradient);
  return out;
}

struct LabelledTokens {
  std::vector<Token> tokens;
  std::vector<Label> labels;
};

inline LossAndGradient neg_log_likelihood_and_gradient(const CrfModel& model,
                                                       std::span<const LabelledTokens> batch,
                                                       const Lexicon* lexicon) {
  std::vector<CompiledSequence> compiled;
  compiled.reserve(batch.size());
  for (const auto& item : batch) {
    if (item.tokens.size() != item.labels.size()) {
      throw UsageError("neg_log_likelihood: " + std::to_string(item.labels.size()) +
                       " labels for " + std::to_string(item.tokens.size()) + " tokens");
    }
    compiled.push_back(compile(model, item.tokens, lexicon, item.labels));
  }
  return neg_log_likelihood_and_gradient(model, std::span<const CompiledSequence>(compiled));
}

}  // namespace toxspan::crf
