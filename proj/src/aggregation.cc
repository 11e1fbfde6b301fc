#include "textdiar/aggregation.h"

#include <cstdio>
#include <sstream>

#include "textdiar/errors.h"

namespace textdiar {

std::string to_string(AggregationKind kind) {
  return kind == AggregationKind::kMajority ? "majority" : "weighted-mean";
}

AggregationKind aggregation_kind_from_string(const std::string& s) {
  if (s == "majority") return AggregationKind::kMajority;
  if (s == "weighted-mean") return AggregationKind::kWeightedMean;
  throw_config("unknown aggregation '" + s +
               "' (expected majority or weighted-mean)");
}

void validate(const AggregationPolicy& policy) {
  if (!(policy.threshold > 0.0 && policy.threshold < 1.0)) {
    throw_config("aggregation threshold must lie in (0, 1)");
  }
}

std::uint8_t aggregate(const VoteSet& votes, const AggregationPolicy& policy) {
  if (votes.contributions.empty()) {
    throw_validation("change point " + std::to_string(votes.change_point) +
                     " has no votes");
  }
  double sum = 0.0;
  std::size_t ones = 0;
  for (const auto& v : votes.contributions) {
    sum += v.probability;
    ones += v.probability >= policy.threshold ? 1 : 0;
  }
  const std::size_t n = votes.contributions.size();
  const double mean = sum / static_cast<double>(n);
  if (policy.kind == AggregationKind::kWeightedMean) {
    return mean >= policy.threshold ? 1 : 0;
  }
  const std::size_t zeros = n - ones;
  if (ones != zeros) return ones > zeros ? 1 : 0;
  return mean > policy.threshold ? 1 : 0;
}

ChangeSequence run_spm(const Conversation& conv, const Predictor& predictor,
                       std::size_t front, std::size_t back, double threshold) {
  if (predictor.mode() != PredictorMode::kSpm) {
    throw_config("run_spm needs a predictor in spm mode");
  }
  ChangeSequence out;
  const auto contexts = build_spm_contexts(conv, front, back);
  if (contexts.empty()) return out;
  out.probabilities = predictor.predict_spm_all(conv, contexts);
  validate_probabilities(out.probabilities, contexts.size(),
                         "conversation '" + conv.id() + "'");
  out.decisions.reserve(contexts.size());
  for (double p : out.probabilities) {
    out.decisions.push_back(p >= threshold ? 1 : 0);
  }
  return out;
}

MpmRun aggregate_windows(const WindowSet& windows,
                         const std::vector<WindowPrediction>& predictions,
                         const AggregationPolicy& policy) {
  validate(policy);
  if (predictions.size() != windows.size()) {
    throw_protocol("expected " + std::to_string(windows.size()) +
                   " window predictions, got " +
                   std::to_string(predictions.size()));
  }
  MpmRun out;
  const std::size_t points = windows.num_change_points();
  out.votes.resize(points);
  for (std::size_t p = 0; p < points; ++p) out.votes[p].change_point = p;
  for (std::size_t j = 0; j < windows.size(); ++j) {
    const auto& w = windows[j];
    const auto& pred = predictions[j];
    validate_probabilities(pred.probabilities, w.num_boundaries(),
                           "window " + std::to_string(j));
    for (std::size_t i = 0; i < w.num_boundaries(); ++i) {
      out.votes[w.first + i].contributions.push_back({j, pred.probabilities[i]});
    }
  }
  out.changes.decisions.reserve(points);
  out.changes.probabilities.reserve(points);
  for (const auto& vs : out.votes) {
    double sum = 0.0;
    for (const auto& v : vs.contributions) sum += v.probability;
    out.changes.decisions.push_back(aggregate(vs, policy));
    out.changes.probabilities.push_back(
        sum / static_cast<double>(vs.contributions.size()));
  }
  return out;
}

MpmRun run_mpm(const Conversation& conv, const Predictor& predictor,
               std::size_t window_len, std::size_t stride,
               const AggregationPolicy& policy) {
  if (predictor.mode() != PredictorMode::kMpm) {
    throw_config("run_mpm needs a predictor in mpm mode");
  }
  validate(policy);
  if (conv.size() < 2) return {};
  const auto windows = build_mpm_windows(conv, window_len, stride);
  return aggregate_windows(windows, predictor.predict_mpm_all(conv, windows),
                           policy);
}

double EfficacyReport::percent(EfficacyCategory c) const {
  const std::size_t t = total();
  if (t == 0) return 0.0;
  return 100.0 * static_cast<double>(counts[static_cast<std::size_t>(c)]) /
         static_cast<double>(t);
}

EfficacyReport& EfficacyReport::operator+=(const EfficacyReport& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  points += other.points;
  return *this;
}

std::optional<EfficacyCategory> classify_point(const VoteSet& votes,
                                               std::uint8_t gold,
                                               std::uint8_t aggregated,
                                               double threshold) {
  std::size_t wrong = 0;
  for (const auto& v : votes.contributions) {
    const std::uint8_t vote = v.probability >= threshold ? 1 : 0;
    wrong += vote != gold;
  }
  if (wrong == 0) return std::nullopt;
  if (wrong == votes.contributions.size()) {
    return EfficacyCategory::kConsistentlyIncorrect;
  }
  return aggregated == gold ? EfficacyCategory::kPartialToCorrect
                            : EfficacyCategory::kPartialToIncorrect;
}

EfficacyReport efficacy_analysis(const std::vector<VoteSet>& votes,
                                 const ChangeSequence& aggregated,
                                 const ChangeSequence& gold,
                                 double threshold) {
  if (votes.size() != gold.size() || aggregated.size() != gold.size()) {
    throw_validation("efficacy analysis: " + std::to_string(votes.size()) +
                     " vote sets and " + std::to_string(aggregated.size()) +
                     " decisions for " + std::to_string(gold.size()) +
                     " gold change points");
  }
  EfficacyReport out;
  out.points = gold.size();
  for (std::size_t p = 0; p < votes.size(); ++p) {
    auto c = classify_point(votes[p], gold.decisions[p],
                            aggregated.decisions[p], threshold);
    if (c) ++out.counts[static_cast<std::size_t>(*c)];
  }
  return out;
}

const char* category_label(EfficacyCategory c) {
  switch (c) {
    case EfficacyCategory::kPartialToCorrect:
      return "Partially Incorrect, Aggregated to Correct";
    case EfficacyCategory::kPartialToIncorrect:
      return "Partially Incorrect, Aggregated to Incorrect";
    case EfficacyCategory::kConsistentlyIncorrect:
      return "Consistently Incorrect";
  }
  return "";
}

std::string format_efficacy_table(const EfficacyReport& report) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-46s | %8s | %6s\n", "Types of Prediction",
                "Count", "%");
  os << buf << std::string(66, '-') << '\n';
  for (auto c : {EfficacyCategory::kPartialToCorrect,
                 EfficacyCategory::kPartialToIncorrect,
                 EfficacyCategory::kConsistentlyIncorrect}) {
    std::snprintf(buf, sizeof(buf), "%-46s | %8zu | %6.1f\n", category_label(c),
                  report.counts[static_cast<std::size_t>(c)],
                  report.percent(c));
    os << buf;
  }
  return os.str();
}

}  // namespace textdiar
