#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "toxspan/crf/features.hpp"
#include "toxspan/error.hpp"
#include "toxspan/tokenize.hpp"

namespace toxspan::crf {

using TransitionMatrix = std::array<std::array<double, kNumLabels>, kNumLabels>;

struct TrainingInfo {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_validation_loss = std::numeric_limits<double>::quiet_NaN();

  friend bool operator==(const TrainingInfo& a, const TrainingInfo& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.epochs_run == b.epochs_run && a.best_epoch == b.best_epoch &&
           same(a.best_validation_loss, b.best_validation_loss);
  }
};

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError("model: bad number '" + std::string(text) + "' for " + std::string(what));
  }
  return value;
}

// Linear-chain CRF over the binary labels {not toxic, toxic}.
//
// Parameters live in one flat vector: the four transition weights T[prev][next]
// first, then two emission weights per feature, (feature, label) at
// 4 + 2 * feature + label.
class CrfModel {
 public:
  static constexpr std::size_t kTransitionParams = kNumLabels * kNumLabels;
  static constexpr int kFormatVersion = 1;

  FeatureTemplates templates;
  TokenizerConfig tokenizer;
  double l2_lambda = 1e-4;
  bool gap_fill = true;
  TrainingInfo info;

  CrfModel() : params_(kTransitionParams, 0.0) {}

  std::size_t num_features() const { return names_.size(); }
  std::size_t num_params() const { return params_.size(); }

  std::optional<std::uint32_t> feature_id(std::string_view name) const {
    const auto it = ids_.find(std::string(name));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  const std::string& feature_name(std::uint32_t id) const { return names_[id]; }

  // Returns the id of `name`, registering it with zero weights if new.
  std::uint32_t add_feature(const std::string& name) {
    const auto [it, inserted] = ids_.emplace(name, static_cast<std::uint32_t>(names_.size()));
    if (inserted) {
      names_.push_back(name);
      params_.push_back(0.0);
      params_.push_back(0.0);
    }
    return it->second;
  }

  static std::size_t emission_index(std::uint32_t feature, Label label) {
    return kTransitionParams + 2 * static_cast<std::size_t>(feature) + label;
  }
  static std::size_t transition_index(Label prev, Label next) {
    return static_cast<std::size_t>(prev) * kNumLabels + next;
  }

  double weight(std::uint32_t feature, Label label) const { return params_[emission_index(feature, label)]; }
  void set_weight(std::uint32_t feature, Label label, double w) { params_[emission_index(feature, label)] = w; }
  // Weight of a feature by name; unknown features weigh zero.
  double weight(std::string_view name, Label label) const {
    const auto id = feature_id(name);
    return id ? weight(*id, label) : 0.0;
  }

  double transition(Label prev, Label next) const { return params_[transition_index(prev, next)]; }
  void set_transition(Label prev, Label next, double w) { params_[transition_index(prev, next)] = w; }
  TransitionMatrix transitions() const {
    TransitionMatrix t{};
    for (Label a = 0; a < kNumLabels; ++a) {
      for (Label b = 0; b < kNumLabels; ++b) t[a][b] = transition(a, b);
    }
    return t;
  }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  bool all_finite() const {
    for (double p : params_) {
      if (!std::isfinite(p)) return false;
    }
    return true;
  }

  // Plain-text model file:
  //   toxspan-crf<TAB>version=1<TAB>lambda=..<TAB>templates=..<TAB>intra_word=..<TAB>gap_fill=..<TAB>epochs=..<TAB>best_epoch=..<TAB>best_validation_loss=..
  //   T<TAB>prev<TAB>next<TAB>weight      (four lines)
  //   feature<TAB>label<TAB>weight        (sorted by feature, then label)
  void save(std::ostream& out) const {
    std::string intra;
    for (char32_t c : tokenizer.intra_word) {
      if (!intra.empty()) intra += ',';
      std::ostringstream hex;
      hex << std::hex << static_cast<std::uint32_t>(c);
      intra += hex.str();
    }
    out << "toxspan-crf\tversion=" << kFormatVersion << "\tlambda=" << format_double(l2_lambda)
        << "\ttemplates=" << templates.to_string() << "\tintra_word=" << (intra.empty() ? "-" : intra)
        << "\tgap_fill=" << (gap_fill ? 1 : 0) << "\tepochs=" << info.epochs_run
        << "\tbest_epoch=" << info.best_epoch
        << "\tbest_validation_loss=" << format_double(info.best_validation_loss) << '\n';
    for (Label a = 0; a < kNumLabels; ++a) {
      for (Label b = 0; b < kNumLabels; ++b) {
        out << "T\t" << int{a} << '\t' << int{b} << '\t' << format_double(transition(a, b)) << '\n';
      }
    }
    std::vector<std::uint32_t> order(names_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return names_[x] < names_[y]; });
    for (auto id : order) {
      for (Label y = 0; y < kNumLabels; ++y) {
        out << names_[id] << '\t' << int{y} << '\t' << format_double(weight(id, y)) << '\n';
      }
    }
    if (!out) throw DataError("model write failed");
  }

  static CrfModel load(std::istream& in) {
    CrfModel model;
    std::string line;
    if (!std::getline(in, line)) throw DataError("model: empty file");
    auto fields = split_tabs(line);
    if (fields.empty() || fields[0] != "toxspan-crf") throw DataError("model: missing toxspan-crf header");
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto eq = fields[i].find('=');
      if (eq == std::string_view::npos) throw DataError("model: bad header field '" + std::string(fields[i]) + "'");
      const auto key = fields[i].substr(0, eq);
      const auto value = fields[i].substr(eq + 1);
      if (key == "version") {
        if (value != std::to_string(kFormatVersion)) {
          throw DataError("model: unsupported format version " + std::string(value));
        }
      } else if (key == "lambda") {
        model.l2_lambda = parse_double(value, key);
      } else if (key == "templates") {
        model.templates = FeatureTemplates::parse(value);
      } else if (key == "intra_word") {
        model.tokenizer.intra_word = parse_intra_word(value);
      } else if (key == "gap_fill") {
        model.gap_fill = value == "1";
      } else if (key == "epochs") {
        model.info.epochs_run = static_cast<std::size_t>(parse_double(value, key));
      } else if (key == "best_epoch") {
        model.info.best_epoch = static_cast<std::size_t>(parse_double(value, key));
      } else if (key == "best_validation_loss") {
        model.info.best_validation_loss = parse_double(value, key);
      }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      fields = split_tabs(line);
      const auto where = "line " + std::to_string(line_no);
      if (fields.size() == 4 && fields[0] == "T") {
        model.set_transition(parse_label(fields[1], where), parse_label(fields[2], where),
                             parse_double(fields[3], where));
      } else if (fields.size() == 3) {
        const auto id = model.add_feature(std::string(fields[0]));
        model.set_weight(id, parse_label(fields[1], where), parse_double(fields[2], where));
      } else {
        throw DataError("model: malformed " + where);
      }
    }
    if (!model.all_finite()) throw DataError("model: non-finite weight");
    return model;
  }

 private:
  static std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    for (;;) {
      const auto tab = line.find('\t');
      out.push_back(line.substr(0, tab));
      if (tab == std::string_view::npos) return out;
      line.remove_prefix(tab + 1);
    }
  }
  static Label parse_label(std::string_view text, const std::string& where) {
    if (text == "0") return kNotToxic;
    if (text == "1") return kToxic;
    throw DataError("model: bad label '" + std::string(text) + "' at " + where);
  }
  static std::u32string parse_intra_word(std::string_view value) {
    std::u32string out;
    if (value == "-") return out;
    while (!value.empty()) {
      const auto comma = value.find(',');
      const auto item = value.substr(0, comma);
      std::uint32_t cp = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), cp, 16);
      if (ec != std::errc{} || ptr != item.data() + item.size()) {
        throw DataError("model: bad intra_word entry '" + std::string(item) + "'");
      }
      out.push_back(static_cast<char32_t>(cp));
      if (comma == std::string_view::npos) break;
      value.remove_prefix(comma + 1);
    }
    return out;
  }

  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> names_;
  std::vector<double> params_;
};

}  // namespace toxspan::crf
