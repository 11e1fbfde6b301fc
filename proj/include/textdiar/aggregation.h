#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "textdiar/predictor.h"
#include "textdiar/transcript.h"
#include "textdiar/windowing.h"

namespace textdiar {

struct Vote {
  std::size_t window = 0;
  double probability = 0.0;

  bool operator==(const Vote&) const = default;
};

// All window predictions for one change point.
struct VoteSet {
  std::size_t change_point = 0;
  std::vector<Vote> contributions;
};

enum class AggregationKind { kMajority, kWeightedMean };

std::string to_string(AggregationKind kind);
AggregationKind aggregation_kind_from_string(const std::string& s);

struct AggregationPolicy {
  AggregationKind kind = AggregationKind::kMajority;
  // A vote is 1 iff probability >= threshold. Must lie in (0, 1).
  double threshold = 0.5;
};

void validate(const AggregationPolicy& policy);

// Majority: one vote per contribution; an exact tie falls back to the mean
// probability against the threshold, and a mean exactly at the threshold
// resolves to 0. Weighted mean: 1 iff mean probability >= threshold.
std::uint8_t aggregate(const VoteSet& votes, const AggregationPolicy& policy);

struct MpmRun {
  ChangeSequence changes;        // probabilities hold the mean vote
  std::vector<VoteSet> votes;    // one per change point
};

// One prediction per change point, thresholded at policy.threshold.
ChangeSequence run_spm(const Conversation& conv, const Predictor& predictor,
                       std::size_t front, std::size_t back,
                       double threshold = 0.5);

MpmRun run_mpm(const Conversation& conv, const Predictor& predictor,
               std::size_t window_len, std::size_t stride,
               const AggregationPolicy& policy);

// Same as run_mpm but with window predictions already computed.
MpmRun aggregate_windows(const WindowSet& windows,
                         const std::vector<WindowPrediction>& predictions,
                         const AggregationPolicy& policy);

enum class EfficacyCategory {
  kPartialToCorrect,
  kPartialToIncorrect,
  kConsistentlyIncorrect,
};

struct EfficacyReport {
  // Indexed by EfficacyCategory.
  std::array<std::size_t, 3> counts{};
  // Change points examined (all of them, not only the incorrect ones).
  std::size_t points = 0;

  std::size_t total() const { return counts[0] + counts[1] + counts[2]; }
  double percent(EfficacyCategory c) const;
  EfficacyReport& operator+=(const EfficacyReport& other);
};

// Category of a change point with at least one incorrect vote; nullopt
// when every vote agrees with gold.
std::optional<EfficacyCategory> classify_point(const VoteSet& votes,
                                               std::uint8_t gold,
                                               std::uint8_t aggregated,
                                               double threshold = 0.5);

EfficacyReport efficacy_analysis(const std::vector<VoteSet>& votes,
                                 const ChangeSequence& aggregated,
                                 const ChangeSequence& gold,
                                 double threshold = 0.5);

// Plain-text table with the three category rows and their percentages.
std::string format_efficacy_table(const EfficacyReport& report);

const char* category_label(EfficacyCategory c);

}  // namespace textdiar
