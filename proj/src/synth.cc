#include "textdiar/synth.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "textdiar/errors.h"
#include "textdiar/text.h"

namespace textdiar {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double keyed_uniform(std::uint64_t seed, const std::string& key) {
  const std::uint64_t h = derive_seed(seed, fnv1a64(key));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void validate(const SynthConfig& cfg) {
  if (cfg.sentences < 1) throw_config("synthetic conversation needs >= 1 sentence");
  if (!(cfg.change_probability >= 0.0 && cfg.change_probability <= 1.0)) {
    throw_config("change probability must lie in [0, 1]");
  }
  if (cfg.speakers < 1) throw_config("need at least one speaker");
  if (cfg.speakers > 26) throw_config("at most 26 synthetic speakers");
  if (cfg.vocabulary < 2 * cfg.speakers) {
    throw_config("vocabulary too small for the number of speakers");
  }
  if (!(cfg.speaker_affinity >= 0.0 && cfg.speaker_affinity <= 1.0)) {
    throw_config("speaker affinity must lie in [0, 1]");
  }
  if (!(cfg.question_rate >= 0.0 && cfg.question_rate <= 1.0)) {
    throw_config("question rate must lie in [0, 1]");
  }
}

namespace {

// Pronounceable pseudo-word for a vocabulary index.
std::string make_word(std::size_t index) {
  static const char* const kOnsets[] = {"b", "d", "f", "g", "k", "l", "m",
                                        "n", "p", "r", "s", "t", "v", "z"};
  static const char* const kVowels[] = {"a", "e", "i", "o", "u"};
  std::string out;
  std::size_t x = index;
  do {
    out += kOnsets[x % 14];
    x /= 14;
    out += kVowels[x % 5];
    x /= 5;
  } while (x > 0);
  return out;
}

// Returns a uniform integer in [0, n) from raw engine output.
std::size_t below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Conversation generate(const SynthConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  const std::size_t p = cfg.speakers;
  const std::size_t shared = cfg.vocabulary / 2;
  const std::size_t per_speaker = (cfg.vocabulary - shared) / p;

  std::vector<Sentence> sentences;
  sentences.reserve(cfg.sentences);
  std::size_t speaker = 0;
  double clock = 0.0;
  for (std::size_t i = 0; i < cfg.sentences; ++i) {
    if (i > 0 && p > 1 && unit(rng) < cfg.change_probability) {
      speaker = (speaker + 1 + below(rng, p - 1)) % p;
    }
    const std::size_t len = 3 + below(rng, 7);
    std::string text;
    for (std::size_t w = 0; w < len; ++w) {
      std::size_t word;
      if (per_speaker > 0 && unit(rng) < cfg.speaker_affinity) {
        word = shared + speaker * per_speaker + below(rng, per_speaker);
      } else {
        word = below(rng, shared);
      }
      if (w > 0) text += ' ';
      text += make_word(word);
    }
    text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    text += unit(rng) < cfg.question_rate ? '?' : '.';

    Sentence s;
    s.index = i;
    s.text = std::move(text);
    s.speaker = std::string(1, static_cast<char>('A' + speaker));
    s.start_time = clock;
    clock += cfg.seconds_per_word * static_cast<double>(len);
    s.end_time = clock;
    clock += cfg.pause_seconds;
    sentences.push_back(std::move(s));
  }
  return Conversation(cfg.id, std::move(sentences));
}

std::vector<Conversation> generate_corpus(const CorpusConfig& cfg) {
  if (cfg.min_sentences < 1 || cfg.min_sentences > cfg.max_sentences) {
    throw_config("sentence range must satisfy 1 <= min <= max");
  }
  std::vector<Conversation> out;
  out.reserve(cfg.conversations);
  for (std::size_t c = 0; c < cfg.conversations; ++c) {
    SynthConfig sc = cfg.base;
    sc.seed = derive_seed(cfg.base.seed, c);
    std::mt19937_64 len_rng(derive_seed(sc.seed, 0x6c656e));
    sc.sentences = cfg.min_sentences +
                   below(len_rng, cfg.max_sentences - cfg.min_sentences + 1);
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%04zu", c);
    sc.id = id;
    out.push_back(generate(sc));
  }
  return out;
}

double expected_majority_error(double epsilon, std::size_t votes) {
  if (votes % 2 == 0) {
    throw_validation("expected_majority_error needs an odd vote count");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw_validation("epsilon must lie in [0, 1]");
  }
  double total = 0.0;
  double binom = 1.0;  // C(v, j), built incrementally
  for (std::size_t j = 0; j <= votes; ++j) {
    if (j > 0) {
      binom = binom * static_cast<double>(votes - j + 1) / static_cast<double>(j);
    }
    if (2 * j > votes) {
      total += binom * std::pow(epsilon, static_cast<double>(j)) *
               std::pow(1.0 - epsilon, static_cast<double>(votes - j));
    }
  }
  return total;
}

NoisyOraclePredictor::NoisyOraclePredictor(PredictorMode mode, NoiseConfig noise)
    : mode_(mode), noise_(noise) {
  if (mode == PredictorMode::kMultispeaker) {
    throw_config("noisy oracle supports spm and mpm modes");
  }
  if (!(noise.epsilon >= 0.0 && noise.epsilon < 0.5)) {
    throw_config("epsilon must lie in [0, 0.5)");
  }
  if (!(noise.rho >= 0.0 && noise.rho <= 1.0)) {
    throw_config("rho must lie in [0, 1]");
  }
  if (!(noise.confident > 0.5 && noise.confident <= 1.0)) {
    throw_config("confident probability must lie in (0.5, 1]");
  }
}

bool NoisyOraclePredictor::consistently_flipped(const Conversation& conv,
                                                std::size_t p) const {
  if (noise_.rho <= 0.0) return false;
  return keyed_uniform(noise_.seed,
                       conv.id() + "|rho|" + std::to_string(p)) < noise_.rho;
}

namespace {

std::uint8_t gold_change(const Conversation& conv, std::size_t p) {
  const auto& a = conv[p].speaker;
  const auto& b = conv[p + 1].speaker;
  if (!a || !b) {
    throw_validation("conversation '" + conv.id() +
                     "': noisy oracle needs gold speakers");
  }
  return *a != *b ? 1 : 0;
}

}  // namespace

double NoisyOraclePredictor::vote(const Conversation& conv,
                                  std::size_t window_key, std::size_t p) const {
  bool flip;
  if (consistently_flipped(conv, p)) {
    flip = true;
  } else {
    const std::string key = conv.id() + "|" + std::to_string(window_key) + "|" +
                            std::to_string(p);
    flip = keyed_uniform(noise_.seed, key) < noise_.epsilon;
  }
  const std::uint8_t gold = gold_change(conv, p);
  const std::uint8_t believed = flip ? 1 - gold : gold;
  return believed ? noise_.confident : 1.0 - noise_.confident;
}

double NoisyOraclePredictor::predict_spm(const Conversation& conv,
                                         const SpmContext& ctx) const {
  if (mode_ != PredictorMode::kSpm) return Predictor::predict_spm(conv, ctx);
  return vote(conv, ctx.first, ctx.change_index);
}

WindowPrediction NoisyOraclePredictor::predict_mpm(const Conversation& conv,
                                                   const MpmWindow& w) const {
  if (mode_ != PredictorMode::kMpm) return Predictor::predict_mpm(conv, w);
  WindowPrediction out;
  out.window_index = w.index;
  for (std::size_t p = w.first; p < w.last; ++p) {
    // Keyed by window start so identical spans share noise regardless of
    // how they were enumerated.
    out.probabilities.push_back(vote(conv, w.first, p));
  }
  return out;
}

PermutedOracleLabeler::PermutedOracleLabeler(SpeakerLabelSet labels,
                                             std::uint64_t seed)
    : labels_(std::move(labels)), seed_(seed) {}

WindowLabelScores PermutedOracleLabeler::predict_labels(
    const Conversation& conv, const MpmWindow& w) const {
  const std::size_t p = labels_.size();
  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed_, fnv1a64(conv.id() + "|" +
                                                 std::to_string(w.first))));
  for (std::size_t i = p; i > 1; --i) {
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng() % i)]);
  }
  WindowLabelScores out;
  out.rows = w.size();
  out.cols = p;
  out.values.assign(out.rows * p, 0.0);
  for (std::size_t r = 0; r < w.size(); ++r) {
    const auto& spk = conv[w.first + r].speaker;
    if (!spk) throw_validation("oracle labeler needs gold speakers");
    const auto& all = labels_.labels();
    auto it = std::find(all.begin(), all.end(), *spk);
    if (it == all.end()) {
      throw_validation("speaker '" + *spk + "' not in the label set");
    }
    out.values[r * p + perm[static_cast<std::size_t>(it - all.begin())]] = 1.0;
  }
  return out;
}

}  // namespace textdiar
