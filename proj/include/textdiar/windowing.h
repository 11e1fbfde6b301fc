#pragma once

#include <cstddef>
#include <vector>

#include "textdiar/transcript.h"

namespace textdiar {

// Context for the change decision between sentences change_index and
// change_index + 1 (0-based): up to `front` sentences ending at the left
// member and up to `back` sentences after the right member.
struct SpmContext {
  std::size_t change_index = 0;
  std::size_t first = 0;  // first sentence index of the context
  std::size_t last = 0;   // last sentence index, inclusive
  std::size_t front = 0;
  std::size_t back = 0;

  std::size_t size() const { return last - first + 1; }
  // Position of the left pair member inside the context.
  std::size_t boundary_offset() const { return change_index - first; }
};

struct MpmWindow {
  std::size_t index = 0;
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive

  std::size_t size() const { return last - first + 1; }
  std::size_t num_boundaries() const { return size() - 1; }
  // Change points p with both s_p and s_{p+1} inside the window.
  bool covers(std::size_t p) const { return p >= first && p + 1 <= last; }
};

class WindowSet {
 public:
  WindowSet(std::size_t num_sentences, std::vector<MpmWindow> windows);

  const std::vector<MpmWindow>& windows() const { return windows_; }
  std::size_t size() const { return windows_.size(); }
  const MpmWindow& operator[](std::size_t j) const { return windows_[j]; }
  std::size_t num_sentences() const { return num_sentences_; }
  std::size_t num_change_points() const { return num_sentences_ - 1; }

  // Ordered indices of windows containing both s_p and s_{p+1}. Throws a
  // validation error when p is not a change point.
  const std::vector<std::size_t>& coverage(std::size_t p) const;

  // Windows containing sentence i (for per-sentence aggregation).
  std::vector<std::size_t> sentence_coverage(std::size_t i) const;

 private:
  std::size_t num_sentences_;
  std::vector<MpmWindow> windows_;
  std::vector<std::vector<std::size_t>> coverage_;
};

// Exactly n-1 contexts; empty when n < 2. front >= 1.
std::vector<SpmContext> build_spm_contexts(const Conversation& conv,
                                           std::size_t front,
                                           std::size_t back);
std::vector<SpmContext> build_spm_contexts(std::size_t num_sentences,
                                           std::size_t front,
                                           std::size_t back);

// Windows start at 0 and advance by stride; a final window anchored at
// n-1 is appended when the stride would leave trailing change points
// uncovered. n <= window_len gives one window spanning the conversation.
// Requires n >= 2, window_len >= 2, stride >= 1 (config error otherwise).
WindowSet build_mpm_windows(const Conversation& conv, std::size_t window_len,
                            std::size_t stride = 1);
WindowSet build_mpm_windows(std::size_t num_sentences, std::size_t window_len,
                            std::size_t stride = 1);

// Near-symmetric split of a total context length into (front, back) with
// front + back + 1 == total, e.g. 8 -> (4, 3).
struct ContextSplit {
  std::size_t front;
  std::size_t back;
};
ContextSplit split_context_length(std::size_t total);

}  // namespace textdiar
