#pragma once

#include <cstddef>
#include <vector>

#include "textdiar/assignment.h"
#include "textdiar/predictor.h"
#include "textdiar/transcript.h"
#include "textdiar/windowing.h"

namespace textdiar {

class SpeakerLabelSet {
 public:
  explicit SpeakerLabelSet(std::vector<SpeakerLabel> labels);
  // "A", "B", ... for the first p labels.
  static SpeakerLabelSet letters(std::size_t p);

  std::size_t size() const { return labels_.size(); }
  const SpeakerLabel& operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<SpeakerLabel>& labels() const { return labels_; }

 private:
  std::vector<SpeakerLabel> labels_;
};

// Per-sentence label distribution for one window, in that window's own
// label space until unified.
struct WindowLabeling {
  std::size_t window_index = 0;
  std::size_t first = 0;  // sentence index of row 0
  WindowLabelScores scores;
  std::vector<std::size_t> argmax;

  std::size_t last() const { return first + scores.rows - 1; }
  std::size_t num_labels() const { return scores.cols; }
};

// Builds a labeling from raw scores; rows must sum to 1 within 1e-9.
// argmax ties resolve to the lowest label index.
WindowLabeling make_labeling(const MpmWindow& w, WindowLabelScores scores);

// mapping[label in b's space] = label in a's space.
struct LabelMatching {
  std::vector<std::size_t> mapping;

  static LabelMatching identity(std::size_t p);
  // (this o inner)[x] = this[inner[x]]
  LabelMatching compose(const LabelMatching& inner) const;
  bool operator==(const LabelMatching&) const = default;
};

enum class AgreementMode {
  kArgmax,       // count overlap sentences with a = row and b = column
  kProbability,  // sum of P_a(row) * P_b(column) over overlap sentences
};

// rows: a's labels, columns: b's labels, over the shared sentences.
ScoreMatrix agreement_matrix(const WindowLabeling& a, const WindowLabeling& b,
                             AgreementMode mode = AgreementMode::kArgmax);

// Maximum-agreement bijection from an agreement matrix (rows a, cols b).
LabelMatching match_from_agreement(const ScoreMatrix& agreement);

// Throws a validation error when the windows share no sentence.
LabelMatching match_labels(const WindowLabeling& a, const WindowLabeling& b,
                           AgreementMode mode = AgreementMode::kArgmax);

// Applies a matching to a labeling (distribution columns and argmax).
WindowLabeling relabel(const WindowLabeling& labeling,
                       const LabelMatching& matching);

// Matches every consecutive pair and composes the matchings left to right
// so all windows share window 0's label space.
std::vector<WindowLabeling> unify_labels(
    const std::vector<WindowLabeling>& labelings,
    AgreementMode mode = AgreementMode::kArgmax);

// Per-sentence majority over covering windows' argmax labels; ties go to
// the highest summed probability, then the lowest label index.
std::vector<std::size_t> aggregate_multispeaker(
    const WindowSet& windows, const std::vector<WindowLabeling>& unified);

struct MultispeakerRun {
  SpeakerAssignment assignment;
  std::vector<std::size_t> label_indices;
  std::vector<WindowLabeling> unified;
};

MultispeakerRun run_multispeaker(const Conversation& conv,
                                 const Predictor& predictor,
                                 std::size_t window_len, std::size_t stride,
                                 const SpeakerLabelSet& labels,
                                 AgreementMode mode = AgreementMode::kArgmax);

}  // namespace textdiar
