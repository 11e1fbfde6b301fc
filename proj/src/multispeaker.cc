#include "textdiar/multispeaker.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "textdiar/errors.h"

namespace textdiar {

SpeakerLabelSet::SpeakerLabelSet(std::vector<SpeakerLabel> labels)
    : labels_(std::move(labels)) {
  if (labels_.size() < 2) throw_config("speaker label set needs >= 2 labels");
  std::set<SpeakerLabel> unique(labels_.begin(), labels_.end());
  if (unique.size() != labels_.size()) {
    throw_config("speaker labels must be distinct");
  }
}

SpeakerLabelSet SpeakerLabelSet::letters(std::size_t p) {
  std::vector<SpeakerLabel> out;
  for (std::size_t i = 0; i < p; ++i) {
    out.push_back(i < 26 ? std::string(1, static_cast<char>('A' + i))
                         : "S" + std::to_string(i));
  }
  return SpeakerLabelSet(std::move(out));
}

WindowLabeling make_labeling(const MpmWindow& w, WindowLabelScores scores) {
  if (scores.rows != w.size() || scores.values.size() != scores.rows * scores.cols) {
    throw_protocol("window " + std::to_string(w.index) + ": expected " +
                   std::to_string(w.size()) + " label rows");
  }
  if (scores.cols < 2) {
    throw_protocol("window " + std::to_string(w.index) +
                   ": label distribution needs >= 2 columns");
  }
  WindowLabeling out;
  out.window_index = w.index;
  out.first = w.first;
  out.argmax.reserve(scores.rows);
  for (std::size_t r = 0; r < scores.rows; ++r) {
    double sum = 0.0;
    std::size_t best = 0;
    for (std::size_t c = 0; c < scores.cols; ++c) {
      const double v = scores.at(r, c);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw_protocol("window " + std::to_string(w.index) +
                       ": label probability outside [0, 1]");
      }
      sum += v;
      if (v > scores.at(r, best)) best = c;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw_protocol("window " + std::to_string(w.index) +
                     ": label distribution row does not sum to 1");
    }
    out.argmax.push_back(best);
  }
  out.scores = std::move(scores);
  return out;
}

LabelMatching LabelMatching::identity(std::size_t p) {
  LabelMatching m;
  m.mapping.resize(p);
  for (std::size_t i = 0; i < p; ++i) m.mapping[i] = i;
  return m;
}

LabelMatching LabelMatching::compose(const LabelMatching& inner) const {
  LabelMatching out;
  out.mapping.reserve(inner.mapping.size());
  for (std::size_t x : inner.mapping) out.mapping.push_back(mapping.at(x));
  return out;
}

ScoreMatrix agreement_matrix(const WindowLabeling& a, const WindowLabeling& b,
                             AgreementMode mode) {
  if (a.num_labels() != b.num_labels()) {
    throw_validation("windows disagree on the number of speaker labels");
  }
  const std::size_t lo = std::max(a.first, b.first);
  const std::size_t hi = std::min(a.last(), b.last());
  if (lo > hi) {
    throw_validation("windows " + std::to_string(a.window_index) + " and " +
                     std::to_string(b.window_index) +
                     " share no sentence; reduce the stride");
  }
  const std::size_t p = a.num_labels();
  ScoreMatrix m(p);
  for (std::size_t s = lo; s <= hi; ++s) {
    const std::size_t ra = s - a.first;
    const std::size_t rb = s - b.first;
    if (mode == AgreementMode::kArgmax) {
      m(a.argmax[ra], b.argmax[rb]) += 1.0;
    } else {
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
          m(i, j) += a.scores.at(ra, i) * b.scores.at(rb, j);
        }
      }
    }
  }
  return m;
}

LabelMatching match_from_agreement(const ScoreMatrix& agreement) {
  const Assignment rows_to_cols = max_assignment(agreement);
  LabelMatching out;
  out.mapping.resize(agreement.n);
  for (std::size_t r = 0; r < rows_to_cols.size(); ++r) {
    out.mapping[rows_to_cols[r]] = r;
  }
  return out;
}

LabelMatching match_labels(const WindowLabeling& a, const WindowLabeling& b,
                           AgreementMode mode) {
  return match_from_agreement(agreement_matrix(a, b, mode));
}

WindowLabeling relabel(const WindowLabeling& labeling,
                       const LabelMatching& matching) {
  const std::size_t p = labeling.num_labels();
  if (matching.mapping.size() != p) {
    throw_validation("label matching size does not match the label count");
  }
  WindowLabeling out = labeling;
  for (std::size_t r = 0; r < labeling.scores.rows; ++r) {
    for (std::size_t c = 0; c < p; ++c) {
      out.scores.values[r * p + matching.mapping[c]] = labeling.scores.at(r, c);
    }
    out.argmax[r] = matching.mapping[labeling.argmax[r]];
  }
  return out;
}

std::vector<WindowLabeling> unify_labels(
    const std::vector<WindowLabeling>& labelings, AgreementMode mode) {
  std::vector<WindowLabeling> out;
  if (labelings.empty()) return out;
  const std::size_t p = labelings.front().num_labels();
  std::vector<LabelMatching> pairwise(labelings.size(),
                                      LabelMatching::identity(p));
  for (std::size_t j = 1; j < labelings.size(); ++j) {
    pairwise[j] = match_labels(labelings[j - 1], labelings[j], mode);
  }
  out.reserve(labelings.size());
  LabelMatching to_first = LabelMatching::identity(p);
  for (std::size_t j = 0; j < labelings.size(); ++j) {
    to_first = to_first.compose(pairwise[j]);
    out.push_back(relabel(labelings[j], to_first));
  }
  return out;
}

std::vector<std::size_t> aggregate_multispeaker(
    const WindowSet& windows, const std::vector<WindowLabeling>& unified) {
  if (unified.size() != windows.size()) {
    throw_validation("expected one labeling per window");
  }
  const std::size_t p = unified.empty() ? 0 : unified.front().num_labels();
  std::vector<std::size_t> out;
  out.reserve(windows.num_sentences());
  for (std::size_t s = 0; s < windows.num_sentences(); ++s) {
    std::vector<std::size_t> votes(p, 0);
    std::vector<double> mass(p, 0.0);
    for (std::size_t j : windows.sentence_coverage(s)) {
      const auto& l = unified[j];
      const std::size_t r = s - l.first;
      ++votes[l.argmax[r]];
      for (std::size_t c = 0; c < p; ++c) mass[c] += l.scores.at(r, c);
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < p; ++c) {
      if (votes[c] > votes[best] ||
          (votes[c] == votes[best] && mass[c] > mass[best])) {
        best = c;
      }
    }
    out.push_back(best);
  }
  return out;
}

MultispeakerRun run_multispeaker(const Conversation& conv,
                                 const Predictor& predictor,
                                 std::size_t window_len, std::size_t stride,
                                 const SpeakerLabelSet& labels,
                                 AgreementMode mode) {
  if (predictor.mode() != PredictorMode::kMultispeaker) {
    throw_config("run_multispeaker needs a predictor in multispeaker mode");
  }
  if (predictor.num_speakers() != labels.size()) {
    throw_config("predictor has " + std::to_string(predictor.num_speakers()) +
                 " speaker labels but the run is configured for " +
                 std::to_string(labels.size()));
  }
  MultispeakerRun out;
  if (conv.size() < 2) {
    out.label_indices = {0};
    out.assignment.labels = {labels[0]};
    return out;
  }
  const auto windows = build_mpm_windows(conv, window_len, stride);
  std::vector<WindowLabeling> raw;
  raw.reserve(windows.size());
  for (const auto& w : windows.windows()) {
    raw.push_back(make_labeling(w, predictor.predict_labels(conv, w)));
  }
  out.unified = unify_labels(raw, mode);
  out.label_indices = aggregate_multispeaker(windows, out.unified);
  for (std::size_t i : out.label_indices) {
    out.assignment.labels.push_back(labels[i]);
  }
  return out;
}

}  // namespace textdiar
