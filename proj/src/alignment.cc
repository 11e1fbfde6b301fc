#include "textdiar/alignment.h"

#include <algorithm>
#include <limits>
#include <map>

#include "textdiar/errors.h"

namespace textdiar {

TokenStream make_token_stream(const Conversation& conv) {
  TokenStream out;
  for (const auto& s : conv.sentences()) {
    for (const auto& w : split_words(s.text)) {
      auto n = normalize_token(w);
      if (n.empty()) continue;
      out.words.push_back(std::move(n));
      out.sentence.push_back(s.index);
      out.speaker.push_back(s.speaker);
    }
  }
  return out;
}

TokenStream make_token_stream(const std::vector<std::string>& words) {
  TokenStream out;
  for (const auto& w : words) {
    auto n = normalize_token(w);
    if (n.empty()) continue;
    out.words.push_back(std::move(n));
    out.sentence.push_back(0);
    out.speaker.emplace_back();
  }
  return out;
}

long long alignment_score(const std::vector<AlignmentColumn>& columns,
                          const AlignmentScores& scores) {
  long long s = 0;
  for (const auto& c : columns) {
    switch (c.kind) {
      case ColumnKind::kMatch:
        s += scores.match;
        break;
      case ColumnKind::kSubstitution:
        s += scores.substitution;
        break;
      case ColumnKind::kRefGap:
      case ColumnKind::kHypGap:
        s += scores.gap;
        break;
    }
  }
  return s;
}

namespace {

// Traceback flags: which predecessors attain the optimum at a cell.
constexpr std::uint8_t kDiag = 1;
constexpr std::uint8_t kUp = 2;    // consume ref word (hyp gap)
constexpr std::uint8_t kLeft = 4;  // consume hyp word (ref gap)

}  // namespace

WordAlignment align_words(const std::vector<std::string>& ref,
                          const std::vector<std::string>& hyp,
                          const AlignmentScores& scores) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  WordAlignment out;
  if (n == 0 && m == 0) return out;

  constexpr long long kNegInf = std::numeric_limits<long long>::min() / 4;
  // Band half-width around the scaled diagonal j = i * m / n.
  std::size_t band = scores.band;
  if (band != 0 && n > 0) {
    band = std::max(band, (m + n - 1) / n + 1);
  }
  auto in_band = [&](std::size_t i, std::size_t j) {
    if (band == 0 || n == 0) return true;
    const long long center = static_cast<long long>(i * m / n);
    const long long d = static_cast<long long>(j) - center;
    return d <= static_cast<long long>(band) &&
           -d <= static_cast<long long>(band);
  };

  std::vector<std::uint8_t> trace((n + 1) * (m + 1), 0);
  std::vector<long long> prev(m + 1, kNegInf), cur(m + 1, kNegInf);
  prev[0] = 0;
  for (std::size_t j = 1; j <= m; ++j) {
    if (!in_band(0, j)) break;
    prev[j] = prev[j - 1] + scores.gap;
    trace[j] = kLeft;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    std::fill(cur.begin(), cur.end(), kNegInf);
    if (in_band(i, 0) && prev[0] != kNegInf) {
      cur[0] = prev[0] + scores.gap;
      trace[i * (m + 1)] = kUp;
    }
    for (std::size_t j = 1; j <= m; ++j) {
      if (!in_band(i, j)) continue;
      long long best = kNegInf;
      long long diag = kNegInf, up = kNegInf, left = kNegInf;
      if (prev[j - 1] != kNegInf) {
        diag = prev[j - 1] +
               (ref[i - 1] == hyp[j - 1] ? scores.match : scores.substitution);
      }
      if (prev[j] != kNegInf) up = prev[j] + scores.gap;
      if (cur[j - 1] != kNegInf) left = cur[j - 1] + scores.gap;
      best = std::max({diag, up, left});
      if (best == kNegInf) continue;
      std::uint8_t flags = 0;
      if (diag == best) flags |= kDiag;
      if (up == best) flags |= kUp;
      if (left == best) flags |= kLeft;
      cur[j] = best;
      trace[i * (m + 1) + j] = flags;
    }
    std::swap(prev, cur);
  }
  if (prev[m] == kNegInf) {
    throw_config("alignment band too narrow to connect both stream ends");
  }
  out.score = prev[m];

  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::uint8_t f = trace[i * (m + 1) + j];
    if ((f & kDiag) && i > 0 && j > 0) {
      out.columns.push_back({ref[i - 1] == hyp[j - 1] ? ColumnKind::kMatch
                                                      : ColumnKind::kSubstitution,
                             i - 1, j - 1});
      --i;
      --j;
    } else if ((f & kUp) && i > 0) {
      out.columns.push_back({ColumnKind::kHypGap, i - 1, kNoWord});
      --i;
    } else {
      out.columns.push_back({ColumnKind::kRefGap, kNoWord, j - 1});
      --j;
    }
  }
  std::reverse(out.columns.begin(), out.columns.end());
  return out;
}

WordAlignment align_words(const TokenStream& ref, const TokenStream& hyp,
                          const AlignmentScores& scores) {
  return align_words(ref.words, hyp.words, scores);
}

std::vector<SpeakerLabel> transfer_speakers(const WordAlignment& alignment,
                                            const TokenStream& ref,
                                            std::size_t hyp_size) {
  std::vector<std::optional<SpeakerLabel>> direct(hyp_size);
  for (const auto& c : alignment.columns) {
    if (c.kind != ColumnKind::kMatch && c.kind != ColumnKind::kSubstitution) {
      continue;
    }
    if (c.ref >= ref.size() || c.hyp >= hyp_size) {
      throw_validation("alignment column outside the token streams");
    }
    if (!ref.speaker[c.ref]) {
      throw_validation("reference word " + std::to_string(c.ref) +
                       " has no speaker");
    }
    direct[c.hyp] = ref.speaker[c.ref];
  }

  std::vector<SpeakerLabel> out(hyp_size);
  std::optional<SpeakerLabel> left;
  std::vector<std::size_t> pending;  // unlabeled words before any label
  for (std::size_t j = 0; j < hyp_size; ++j) {
    if (direct[j]) {
      left = direct[j];
      out[j] = *direct[j];
      for (std::size_t k : pending) out[k] = *direct[j];
      pending.clear();
    } else if (left) {
      out[j] = *left;
    } else {
      pending.push_back(j);
    }
  }
  if (!pending.empty()) {
    throw_validation("no hypothesis word aligned to the reference");
  }
  return out;
}

SpeakerAssignment label_sentences(
    std::size_t num_sentences, const std::vector<std::size_t>& word_sentence,
    const std::vector<SpeakerLabel>& word_labels) {
  if (word_sentence.size() != word_labels.size()) {
    throw_validation("label_sentences: word/label count mismatch");
  }
  std::vector<std::map<SpeakerLabel, std::size_t>> counts(num_sentences);
  for (std::size_t w = 0; w < word_sentence.size(); ++w) {
    if (word_sentence[w] >= num_sentences) {
      throw_validation("label_sentences: word maps outside the sentences");
    }
    ++counts[word_sentence[w]][word_labels[w]];
  }
  std::optional<SpeakerLabel> lowest;
  for (const auto& l : word_labels) {
    if (!lowest || l < *lowest) lowest = l;
  }
  if (!lowest) throw_validation("label_sentences: no labeled words");

  SpeakerAssignment out;
  out.labels.reserve(num_sentences);
  for (std::size_t s = 0; s < num_sentences; ++s) {
    const auto& c = counts[s];
    if (c.empty()) {
      out.labels.push_back(s == 0 ? *lowest : out.labels.back());
      continue;
    }
    std::size_t best = 0;
    for (const auto& [label, n] : c) best = std::max(best, n);
    std::vector<SpeakerLabel> tied;  // lexicographic order from std::map
    for (const auto& [label, n] : c) {
      if (n == best) tied.push_back(label);
    }
    if (tied.size() > 1 && s > 0 &&
        std::find(tied.begin(), tied.end(), out.labels.back()) != tied.end()) {
      out.labels.push_back(out.labels.back());
    } else {
      out.labels.push_back(tied.front());
    }
  }
  return out;
}

Conversation align_conversation(const Conversation& ref,
                                const Conversation& hyp,
                                const AlignmentScores& scores) {
  if (!ref.has_speakers()) {
    throw_validation("reference conversation '" + ref.id() +
                     "' lacks speaker labels");
  }
  const auto rs = make_token_stream(ref);
  const auto hs = make_token_stream(hyp);
  if (rs.size() == 0 || hs.size() == 0) {
    throw_validation("conversation '" + hyp.id() +
                     "': nothing to align (no words after normalization)");
  }
  const auto al = align_words(rs, hs, scores);
  const auto word_labels = transfer_speakers(al, rs, hs.size());
  const auto sentence_labels =
      label_sentences(hyp.size(), hs.sentence, word_labels);
  return hyp.with_speakers(sentence_labels.labels);
}

}  // namespace textdiar
