#include "textdiar/features.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "textdiar/errors.h"
#include "textdiar/text.h"

namespace textdiar {

double FeatureVector::value_at(std::uint32_t index) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

std::vector<double> FeatureVector::to_dense() const {
  std::vector<double> out(dimension, 0.0);
  for (std::size_t i = 0; i < indices.size(); ++i) out[indices[i]] = values[i];
  return out;
}

double FeatureVector::dot(std::span<const double> weights) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    acc += values[i] * weights[indices[i]];
  }
  return acc;
}

void FeatureVector::add_to(std::span<double> out, double scale) const {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out[indices[i]] += scale * values[i];
  }
}

namespace {

bool ends_with_char(const std::string& text, char c) {
  auto t = trim(text);
  while (!t.empty() && (t.back() == '"' || t.back() == '\'' ||
                        t.back() == ')' || t.back() == ']')) {
    t.remove_suffix(1);
  }
  return !t.empty() && t.back() == c;
}

// Accumulates features in a sorted map so duplicate hash buckets merge
// deterministically.
class Builder {
 public:
  explicit Builder(const FeaturizerConfig& cfg) : cfg_(cfg) {
    if (cfg.hash_bits < 5 || cfg.hash_bits > 26) {
      throw_config("hash_bits must be in [5, 26]");
    }
  }

  void dense(DenseSlot slot, double value) {
    if (value != 0.0) acc_[slot] += value;
  }

  void hashed(const std::string& key, double value) {
    const std::uint64_t h = fnv1a64(key);
    const std::uint64_t buckets = cfg_.dimension() - kNumDenseSlots;
    const auto index =
        static_cast<std::uint32_t>(kNumDenseSlots + (h % buckets));
    const double sign = ((h >> 63) & 1U) != 0 ? -1.0 : 1.0;
    acc_[index] += sign * value;
  }

  void bag(const char* prefix, const std::vector<std::string>& tokens) {
    if (tokens.empty()) return;
    const double unit = 1.0 / std::sqrt(static_cast<double>(tokens.size()));
    for (const auto& t : tokens) hashed(std::string(prefix) + "1:" + t, unit);
    if (!cfg_.bigrams) return;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      hashed(std::string(prefix) + "2:" + tokens[i] + " " + tokens[i + 1],
             unit);
    }
  }

  FeatureVector finish() {
    FeatureVector out;
    out.dimension = cfg_.dimension();
    out.indices.reserve(acc_.size());
    out.values.reserve(acc_.size());
    for (const auto& [index, value] : acc_) {
      if (value == 0.0) continue;
      out.indices.push_back(index);
      out.values.push_back(value);
    }
    return out;
  }

 private:
  const FeaturizerConfig& cfg_;
  std::map<std::uint32_t, double> acc_;
};

double jaccard(const std::vector<std::string>& a,
               const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end());
  std::set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

void add_pair(Builder& b, const Sentence& left, const Sentence& right,
              std::span<const Sentence> context, std::size_t boundary_offset) {
  const auto lt = normalized_tokens(left.text);
  const auto rt = normalized_tokens(right.text);

  b.dense(kBias, 1.0);
  b.dense(kLeftTokens, std::log1p(static_cast<double>(lt.size())) / 2.0);
  b.dense(kRightTokens, std::log1p(static_cast<double>(rt.size())) / 2.0);
  b.dense(kLeftChars, std::log1p(static_cast<double>(left.text.size())) / 4.0);
  b.dense(kRightChars,
          std::log1p(static_cast<double>(right.text.size())) / 4.0);
  const bool lq = ends_with_char(left.text, '?');
  const bool rq = ends_with_char(right.text, '?');
  b.dense(kLeftQuestion, lq ? 1.0 : 0.0);
  b.dense(kRightQuestion, rq ? 1.0 : 0.0);
  b.dense(kLeftExclaim, ends_with_char(left.text, '!') ? 1.0 : 0.0);
  b.dense(kRightExclaim, ends_with_char(right.text, '!') ? 1.0 : 0.0);
  b.dense(kOverlap, jaccard(lt, rt));
  b.dense(kQuestionThenStatement, lq && !rq ? 1.0 : 0.0);

  if (!context.empty()) {
    std::size_t questions = 0;
    for (const auto& s : context) questions += ends_with_char(s.text, '?');
    b.dense(kContextQuestionRatio, static_cast<double>(questions) /
                                       static_cast<double>(context.size()));
    b.dense(kContextSize,
            std::log1p(static_cast<double>(context.size())) / 2.0);
    if (context.size() > 2) {
      b.dense(kBoundaryPosition, static_cast<double>(boundary_offset) /
                                     static_cast<double>(context.size() - 2));
    }
  }

  b.bag("l", lt);
  b.bag("r", rt);
  if (!lt.empty()) b.hashed("ll:" + lt.back(), 1.0);
  if (!rt.empty()) b.hashed("rf:" + rt.front(), 1.0);
}

}  // namespace

double token_jaccard(const std::string& a, const std::string& b) {
  return jaccard(normalized_tokens(a), normalized_tokens(b));
}

FeatureVector featurize(const FeaturizerConfig& cfg, const Sentence& left,
                        const Sentence& right,
                        std::span<const Sentence> context,
                        std::size_t boundary_offset) {
  Builder b(cfg);
  add_pair(b, left, right, context, boundary_offset);
  return b.finish();
}

FeatureVector featurize_position(const FeaturizerConfig& cfg,
                                 std::span<const Sentence> window,
                                 std::size_t position) {
  if (position >= window.size()) {
    throw_validation("featurize_position: position outside window");
  }
  Builder b(cfg);
  add_pair(b, window.front(), window[position], window, position);
  b.hashed("pos:" + std::to_string(position), 1.0);
  if (position > 0) {
    b.dense(kPreviousOverlap, token_jaccard(window[position - 1].text,
                                            window[position].text));
  }
  return b.finish();
}

}  // namespace textdiar
