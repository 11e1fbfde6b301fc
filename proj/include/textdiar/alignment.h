#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "textdiar/text.h"
#include "textdiar/transcript.h"

namespace textdiar {

// Words of a transcript after normalization; tokens that normalize to ""
// are dropped.
struct TokenStream {
  std::vector<std::string> words;       // normalized
  std::vector<std::size_t> sentence;    // source sentence index per word
  std::vector<std::optional<SpeakerLabel>> speaker;

  std::size_t size() const { return words.size(); }
};

TokenStream make_token_stream(const Conversation& conv);
TokenStream make_token_stream(const std::vector<std::string>& words);

enum class ColumnKind {
  kMatch,
  kSubstitution,
  kRefGap,  // hypothesis word with no reference counterpart (insertion)
  kHypGap,  // reference word with no hypothesis counterpart (deletion)
};

inline constexpr std::size_t kNoWord = static_cast<std::size_t>(-1);

struct AlignmentColumn {
  ColumnKind kind;
  std::size_t ref = kNoWord;
  std::size_t hyp = kNoWord;

  bool operator==(const AlignmentColumn&) const = default;
};

struct WordAlignment {
  std::vector<AlignmentColumn> columns;
  long long score = 0;
};

struct AlignmentScores {
  int match = 2;
  int substitution = -1;
  int gap = -1;
  // Half-width of the diagonal band; 0 means full DP (exact).
  std::size_t band = 0;
};

// Score of an explicit column sequence under the given scores.
long long alignment_score(const std::vector<AlignmentColumn>& columns,
                          const AlignmentScores& scores);

// Global alignment maximizing the score. Ties prefer match/substitution,
// then hyp_gap, then ref_gap, decided from the end of both streams.
WordAlignment align_words(const std::vector<std::string>& ref,
                          const std::vector<std::string>& hyp,
                          const AlignmentScores& scores = {});
WordAlignment align_words(const TokenStream& ref, const TokenStream& hyp,
                          const AlignmentScores& scores = {});

// Speaker per hypothesis word: aligned words copy the reference speaker;
// inserted words take the nearest aligned word to their left, or to their
// right when none exists.
std::vector<SpeakerLabel> transfer_speakers(const WordAlignment& alignment,
                                            const TokenStream& ref,
                                            std::size_t hyp_size);

// Majority label per sentence. Ties keep the previous sentence's label
// when it is among the tied labels, else the lexicographically lowest tied
// label. Sentences without labeled words inherit the previous label (the
// lowest known label for the first sentence).
SpeakerAssignment label_sentences(std::size_t num_sentences,
                                  const std::vector<std::size_t>& word_sentence,
                                  const std::vector<SpeakerLabel>& word_labels);

// Full pipeline: tokenize, align, transfer, label sentences. The reference
// must carry speakers on every sentence.
Conversation align_conversation(const Conversation& ref,
                                const Conversation& hyp,
                                const AlignmentScores& scores = {});

}  // namespace textdiar
