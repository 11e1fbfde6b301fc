#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "textdiar/transcript.h"

namespace textdiar {

struct FeaturizerConfig {
  // Dimension is 2^hash_bits, including the fixed dense slots.
  std::uint32_t hash_bits = 18;
  bool bigrams = true;

  std::size_t dimension() const { return std::size_t{1} << hash_bits; }
  bool operator==(const FeaturizerConfig&) const = default;
};

// Fixed slots at the start of every feature vector; hashed features are
// placed in [kNumDenseSlots, dimension).
enum DenseSlot : std::uint32_t {
  kBias = 0,
  kLeftTokens,
  kRightTokens,
  kLeftChars,
  kRightChars,
  kLeftQuestion,
  kRightQuestion,
  kLeftExclaim,
  kRightExclaim,
  kOverlap,
  kQuestionThenStatement,
  kContextQuestionRatio,
  kContextSize,
  kBoundaryPosition,
  kPreviousOverlap,
  kNumDenseSlots = 16,
};

// Sparse view of a fixed-dimension vector: indices strictly increasing,
// values finite.
struct FeatureVector {
  std::size_t dimension = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  double value_at(std::uint32_t index) const;
  std::vector<double> to_dense() const;
  double dot(std::span<const double> weights) const;
  // out += scale * this
  void add_to(std::span<double> out, double scale) const;

  bool operator==(const FeatureVector&) const = default;
};

// Jaccard similarity over lowercased normalized token sets; 0 when both
// sets are empty.
double token_jaccard(const std::string& a, const std::string& b);

// Features for the boundary between `left` and `right` with `context` the
// sentences visible to the predictor. `boundary_offset` is the position of
// `left` inside the context.
FeatureVector featurize(const FeaturizerConfig& cfg, const Sentence& left,
                        const Sentence& right,
                        std::span<const Sentence> context,
                        std::size_t boundary_offset = 0);

// Features for sentence `position` of a window, used by the multi-speaker
// head: the pair (window[0], window[position]) plus a position indicator
// and the overlap with the preceding sentence.
FeatureVector featurize_position(const FeaturizerConfig& cfg,
                                 std::span<const Sentence> window,
                                 std::size_t position);

}  // namespace textdiar
