#pragma once

// Span-level scoring and majority-vote ensembling over character offsets.

#include <cstddef>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "toxspan/corpus.hpp"
#include "toxspan/error.hpp"
#include "toxspan/spans.hpp"

namespace toxspan {

struct EvalResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

// Precision, recall and F1 of a predicted offset set against gold.
//
// The ratios are undefined when a set is empty. Following the shared-task
// scorer, two empty sets agree perfectly (1, 1, 1) and exactly one empty set
// scores (0, 0, 0). This function is the only place that convention lives.
inline EvalResult span_f1(const SpanSet& predicted, const SpanSet& gold) {
  if (predicted.empty() && gold.empty()) return {1.0, 1.0, 1.0};
  if (predicted.empty() || gold.empty()) return {0.0, 0.0, 0.0};
  const auto hits = static_cast<double>(predicted.intersection_size(gold));
  EvalResult r;
  r.precision = hits / static_cast<double>(predicted.size());
  r.recall = hits / static_cast<double>(gold.size());
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

struct EvalReport {
  struct Entry {
    std::string id;
    EvalResult result;
  };
  std::vector<Entry> per_post;  // in gold order
  double mean_f1 = 0.0;
  std::size_t posts_scored = 0;
  std::size_t empty_gold_posts = 0;

  // Per-post TSV (id, precision, recall, f1) and a closing `mean_f1=` line.
  void write(std::ostream& out) const {
    char buf[128];
    out << "id\tprecision\trecall\tf1\n";
    for (const auto& e : per_post) {
      std::snprintf(buf, sizeof(buf), "\t%.4f\t%.4f\t%.4f\n", e.result.precision, e.result.recall,
                    e.result.f1);
      out << e.id << buf;
    }
    std::snprintf(buf, sizeof(buf), "mean_f1=%.4f\n", mean_f1);
    out << buf;
  }
};

// Scores every gold post; posts without a prediction record count as
// predicting nothing. Predicted offsets must fall inside the post's text. The system score is the unweighted mean of per-post F1.
inline EvalReport evaluate_corpus(std::span<const PredictionRecord> predictions,
                                  std::span<const Post> gold_posts) {
  std::unordered_map<std::string, const Post*> gold_by_id;
  for (const Post& post : gold_posts) {
    if (!gold_by_id.emplace(post.id, &post).second) {
      throw DataError("evaluate: duplicate gold post id '" + post.id + "'");
    }
  }
  std::unordered_map<std::string, const SpanSet*> predicted_by_id;
  std::vector<std::string> unknown;
  for (const auto& record : predictions) {
    if (!gold_by_id.contains(record.post_id)) {
      unknown.push_back(record.post_id);
      continue;
    }
    if (!predicted_by_id.emplace(record.post_id, &record.predicted).second) {
      throw DataError("evaluate: duplicate prediction for post id '" + record.post_id + "'");
    }
  }
  if (!unknown.empty()) {
    std::string list;
    for (std::size_t i = 0; i < unknown.size() && i < 20; ++i) list += (i ? ", " : "") + unknown[i];
    if (unknown.size() > 20) list += ", ...";
    throw DataError("evaluate: " + std::to_string(unknown.size()) +
                    " prediction id(s) not in gold: " + list);
  }

  static const SpanSet kNothing;
  EvalReport report;
  double sum = 0.0;
  for (const Post& post : gold_posts) {
    const auto it = predicted_by_id.find(post.id);
    const SpanSet& predicted = it == predicted_by_id.end() ? kNothing : *it->second;
    check_offsets(predicted, post.text, post.id);
    const EvalResult r = span_f1(predicted, post.gold);
    report.per_post.push_back({post.id, r});
    sum += r.f1;
    if (post.gold.empty()) ++report.empty_gold_posts;
  }
  report.posts_scored = gold_posts.size();
  report.mean_f1 = gold_posts.empty() ? 0.0 : sum / static_cast<double>(gold_posts.size());
  return report;
}

// Offsets predicted by strictly more than half of the systems.
inline SpanSet majority_vote(std::span<const SpanSet> prediction_sets) {
  if (prediction_sets.empty()) throw UsageError("majority_vote: no prediction sets");
  std::map<std::size_t, std::size_t> votes;
  for (const SpanSet& set : prediction_sets) {
    for (std::size_t offset : set) ++votes[offset];
  }
  std::vector<std::size_t> out;
  for (const auto& [offset, count] : votes) {
    if (2 * count > prediction_sets.size()) out.push_back(offset);
  }
  return SpanSet(std::move(out));
}

inline SpanSet majority_vote(std::initializer_list<SpanSet> prediction_sets) {
  return majority_vote(std::span<const SpanSet>(prediction_sets.begin(), prediction_sets.size()));
}

// Votes post by post across several prediction files. Output follows the
// first file's order, then ids first seen in later files. A system with no
// record for a post votes for nothing.
inline std::vector<PredictionRecord> ensemble_predictions(
    std::span<const std::vector<PredictionRecord>> systems) {
  if (systems.empty()) throw UsageError("ensemble: no prediction files");
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  std::vector<std::unordered_map<std::string, const SpanSet*>> lookup(systems.size());
  for (std::size_t s = 0; s < systems.size(); ++s) {
    for (const auto& record : systems[s]) {
      if (!lookup[s].emplace(record.post_id, &record.predicted).second) {
        throw DataError("ensemble: duplicate post id '" + record.post_id + "' in input " +
                        std::to_string(s + 1));
      }
      if (seen.insert(record.post_id).second) ids.push_back(record.post_id);
    }
  }
  std::vector<PredictionRecord> out;
  out.reserve(ids.size());
  std::vector<SpanSet> votes(systems.size());
  for (const auto& id : ids) {
    for (std::size_t s = 0; s < systems.size(); ++s) {
      const auto it = lookup[s].find(id);
      votes[s] = it == lookup[s].end() ? SpanSet{} : *it->second;
    }
    out.push_back({id, majority_vote(std::span<const SpanSet>(votes))});
  }
  return out;
}

}  // namespace toxspan
