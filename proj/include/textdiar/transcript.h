#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace textdiar {

using SpeakerLabel = std::string;

struct Sentence {
  std::size_t index = 0;
  std::string text;
  std::optional<SpeakerLabel> speaker;
  std::optional<double> start_time;
  std::optional<double> end_time;
};

// Ordered sentences s_0..s_{n-1}. Construction validates the invariants
// (n >= 1, indices 0..n-1, non-blank text, 0 <= start <= end).
class Conversation {
 public:
  Conversation(std::string id, std::vector<Sentence> sentences,
               std::optional<double> duration = std::nullopt);

  const std::string& id() const { return id_; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  const Sentence& operator[](std::size_t i) const { return sentences_[i]; }
  std::size_t size() const { return sentences_.size(); }
  std::optional<double> duration() const { return duration_; }

  bool has_speakers() const;
  // Explicit duration if present, else max end_time - min start_time.
  std::optional<double> duration_seconds() const;

  // Copy with speakers replaced; labels.size() must equal size().
  Conversation with_speakers(const std::vector<SpeakerLabel>& labels) const;

 private:
  std::string id_;
  std::vector<Sentence> sentences_;
  std::optional<double> duration_;
};

struct SpeakerAssignment {
  std::vector<SpeakerLabel> labels;

  bool operator==(const SpeakerAssignment&) const = default;
};

struct ChangeSequence {
  std::vector<std::uint8_t> decisions;
  // Empty or the same length as decisions.
  std::vector<double> probabilities;

  std::size_t size() const { return decisions.size(); }
  bool operator==(const ChangeSequence&) const = default;
};

// Gold speakers of a fully labeled conversation; throws a validation error
// naming the first unlabeled sentence otherwise.
SpeakerAssignment gold_assignment(const Conversation& conv);

// decisions[i] = 1 iff labels[i] != labels[i+1].
ChangeSequence derive_change_sequence(const SpeakerAssignment& assignment);

// Two-speaker decoding: labels[0] = initial, flipping between initial and
// other at every decision equal to 1.
SpeakerAssignment decode_speakers(const ChangeSequence& changes,
                                  const SpeakerLabel& initial = "A",
                                  const SpeakerLabel& other = "");

// The partner label used when decode_speakers is given no explicit other
// label: "A" <-> "B", anything else pairs with "B" (or "A" for "B").
SpeakerLabel default_partner(const SpeakerLabel& label);

// Rule-based segmentation: a sentence ends at '.', '!' or '?' (possibly
// followed by closing quotes/brackets) that is followed by whitespace or
// end of input.
std::vector<std::string> segment_sentences(const std::string& raw_text);

// Newline-delimited transcript records:
// {"id", "sentences": [{"index","text","speaker","start_time","end_time"}]}
// plus an optional "duration". Unknown fields are ignored.
std::vector<Conversation> parse_transcripts(std::istream& in);
std::vector<Conversation> read_transcripts(const std::string& path);

void write_transcripts(std::ostream& out,
                       const std::vector<Conversation>& conversations);
void write_transcripts(const std::string& path,
                       const std::vector<Conversation>& conversations);

// Words per sentence as counted by WDER (whitespace tokens).
std::vector<std::size_t> sentence_word_counts(const Conversation& conv);

}  // namespace textdiar
