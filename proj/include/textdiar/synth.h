#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "textdiar/multispeaker.h"
#include "textdiar/predictor.h"
#include "textdiar/transcript.h"

namespace textdiar {

struct SynthConfig {
  std::size_t sentences = 40;
  // Probability of a speaker change at each boundary.
  double change_probability = 0.4;
  std::size_t vocabulary = 400;
  std::uint64_t seed = 0;
  std::size_t speakers = 2;
  // Share of each sentence's words drawn from the speaker's own vocabulary
  // slice rather than the shared pool.
  double speaker_affinity = 0.6;
  double question_rate = 0.25;
  double seconds_per_word = 0.35;
  double pause_seconds = 0.3;
  std::string id = "synth-0";
};

void validate(const SynthConfig& cfg);

// Deterministic given cfg.seed. Speakers are labeled "A", "B", ...
Conversation generate(const SynthConfig& cfg);

struct CorpusConfig {
  SynthConfig base;
  std::size_t conversations = 20;
  // Sentence count per conversation is drawn uniformly from
  // [min_sentences, max_sentences].
  std::size_t min_sentences = 10;
  std::size_t max_sentences = 60;
};

// Conversation c uses seed derive_seed(base.seed, c) and id "synth-NNNN".
std::vector<Conversation> generate_corpus(const CorpusConfig& cfg);

// SplitMix64 step; used to derive independent per-item seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Uniform [0, 1) value for the given key; counter-based, so results do not
// depend on call order.
double keyed_uniform(std::uint64_t seed, const std::string& key);

// sum_{j > v/2} C(v, j) eps^j (1 - eps)^(v - j); v must be odd.
double expected_majority_error(double epsilon, std::size_t votes);

struct NoiseConfig {
  double epsilon = 0.0;
  // Share of change points that are wrong in every window.
  double rho = 0.0;
  std::uint64_t seed = 0;
  double confident = 0.9;  // probability emitted for the believed label
};

// Votes 0.9 for the gold label (0.1 against), flipped independently per
// (window, boundary) with probability epsilon. In correlated mode a share
// rho of change points is flipped in every window. Gold comes from the
// conversation's own speakers.
class NoisyOraclePredictor final : public Predictor {
 public:
  NoisyOraclePredictor(PredictorMode mode, NoiseConfig noise);

  PredictorKind kind() const override { return PredictorKind::kSynthetic; }
  PredictorMode mode() const override { return mode_; }
  double predict_spm(const Conversation& conv,
                     const SpmContext& ctx) const override;
  WindowPrediction predict_mpm(const Conversation& conv,
                               const MpmWindow& w) const override;

  // True if change point p of the conversation is corrupted in every
  // window (correlated mode).
  bool consistently_flipped(const Conversation& conv, std::size_t p) const;

 private:
  double vote(const Conversation& conv, std::size_t window_key,
              std::size_t p) const;

  PredictorMode mode_;
  NoiseConfig noise_;
};

// Multi-speaker oracle: one-hot gold labels per window, renamed by a
// random per-window permutation of the label space.
class PermutedOracleLabeler final : public Predictor {
 public:
  PermutedOracleLabeler(SpeakerLabelSet labels, std::uint64_t seed);

  PredictorKind kind() const override { return PredictorKind::kSynthetic; }
  PredictorMode mode() const override { return PredictorMode::kMultispeaker; }
  WindowLabelScores predict_labels(const Conversation& conv,
                                   const MpmWindow& w) const override;
  std::size_t num_speakers() const override { return labels_.size(); }

 private:
  SpeakerLabelSet labels_;
  std::uint64_t seed_;
};

}  // namespace textdiar
