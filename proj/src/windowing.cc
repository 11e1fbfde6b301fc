#include "textdiar/windowing.h"

#include <algorithm>

#include "textdiar/errors.h"

namespace textdiar {

WindowSet::WindowSet(std::size_t num_sentences, std::vector<MpmWindow> windows)
    : num_sentences_(num_sentences), windows_(std::move(windows)) {
  if (num_sentences_ < 2) {
    throw_validation("window set needs at least 2 sentences");
  }
  coverage_.resize(num_sentences_ - 1);
  for (const auto& w : windows_) {
    if (w.last >= num_sentences_ || w.first >= w.last) {
      throw_validation("window " + std::to_string(w.index) +
                       " has an invalid span");
    }
    for (std::size_t p = w.first; p < w.last; ++p) {
      coverage_[p].push_back(w.index);
    }
  }
  for (std::size_t p = 0; p < coverage_.size(); ++p) {
    if (coverage_[p].empty()) {
      throw_validation("change point " + std::to_string(p) +
                       " is not covered by any window");
    }
  }
}

const std::vector<std::size_t>& WindowSet::coverage(std::size_t p) const {
  if (p >= coverage_.size()) {
    throw_validation("change point " + std::to_string(p) +
                     " out of range [0, " + std::to_string(coverage_.size()) +
                     ")");
  }
  return coverage_[p];
}

std::vector<std::size_t> WindowSet::sentence_coverage(std::size_t i) const {
  std::vector<std::size_t> out;
  for (const auto& w : windows_) {
    if (i >= w.first && i <= w.last) out.push_back(w.index);
  }
  return out;
}

std::vector<SpmContext> build_spm_contexts(std::size_t n, std::size_t front,
                                           std::size_t back) {
  if (front < 1) throw_config("SPM front context must be at least 1");
  std::vector<SpmContext> out;
  if (n < 2) return out;
  out.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    SpmContext c;
    c.change_index = i;
    c.front = front;
    c.back = back;
    c.first = i + 1 >= front ? i + 1 - front : 0;
    c.last = std::min(n - 1, i + 1 + back);
    out.push_back(c);
  }
  return out;
}

std::vector<SpmContext> build_spm_contexts(const Conversation& conv,
                                           std::size_t front,
                                           std::size_t back) {
  return build_spm_contexts(conv.size(), front, back);
}

WindowSet build_mpm_windows(std::size_t n, std::size_t window_len,
                            std::size_t stride) {
  if (window_len < 2) throw_config("window_len must be at least 2");
  if (stride < 1) throw_config("stride must be at least 1");
  if (stride > window_len - 1) {
    throw_config("stride " + std::to_string(stride) +
                 " leaves change points uncovered; use at most window_len - 1");
  }
  if (n < 2) throw_validation("MPM windows need at least 2 sentences");

  std::vector<MpmWindow> windows;
  if (n <= window_len) {
    windows.push_back({0, 0, n - 1});
    return WindowSet(n, std::move(windows));
  }
  std::size_t start = 0;
  while (start + window_len <= n) {
    windows.push_back({windows.size(), start, start + window_len - 1});
    start += stride;
  }
  if (windows.back().last != n - 1) {
    windows.push_back({windows.size(), n - window_len, n - 1});
  }
  return WindowSet(n, std::move(windows));
}

WindowSet build_mpm_windows(const Conversation& conv, std::size_t window_len,
                            std::size_t stride) {
  return build_mpm_windows(conv.size(), window_len, stride);
}

ContextSplit split_context_length(std::size_t total) {
  if (total < 2) throw_config("context length must be at least 2");
  const std::size_t front = total / 2;
  return {front, total - front - 1};
}

}  // namespace textdiar
