#pragma once

// Reference implementations used by the unit and acceptance suites. They
// are deliberately naive and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace oracles {

// Largest relative disagreement between an analytic gradient and central
// differences of `loss`. Coordinates where both values are below
// `abs_floor` are compared on the absolute scale of `abs_floor`.
inline double gradient_check(const std::function<double(const std::vector<double>&)>& loss,
                             const std::vector<double>& analytic,
                             std::vector<double> w, double step = 1e-5,
                             double abs_floor = 1e-7) {
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double orig = w[i];
    w[i] = orig + step;
    const double up = loss(w);
    w[i] = orig - step;
    const double down = loss(w);
    w[i] = orig;
    const double fd = (up - down) / (2 * step);
    const double scale = std::max({std::fabs(fd), std::fabs(analytic[i]), abs_floor});
    worst = std::max(worst, std::fabs(fd - analytic[i]) / scale);
  }
  return worst;
}

// Minimum mismatches over all injective relabelings of hyp onto ref labels
// (hyp labels beyond the ref label count map to fresh labels).
inline std::size_t brute_force_mismatches(const std::vector<std::string>& ref,
                                          const std::vector<std::string>& hyp) {
  std::vector<std::string> r_labels(ref.begin(), ref.end());
  std::sort(r_labels.begin(), r_labels.end());
  r_labels.erase(std::unique(r_labels.begin(), r_labels.end()), r_labels.end());
  std::vector<std::string> h_labels(hyp.begin(), hyp.end());
  std::sort(h_labels.begin(), h_labels.end());
  h_labels.erase(std::unique(h_labels.begin(), h_labels.end()), h_labels.end());
  std::size_t k = std::max(r_labels.size(), h_labels.size());
  while (r_labels.size() < k) r_labels.push_back("\x01fresh" + std::to_string(r_labels.size()));
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = ref.size();
  do {
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < h_labels.size(); ++i) m[h_labels[i]] = r_labels[perm[i]];
    std::size_t errs = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) errs += m[hyp[i]] != ref[i];
    best = std::min(best, errs);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Best total score over all permutations of an n x n row-major matrix.
inline double brute_force_assignment(const std::vector<double>& m, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -INFINITY;
  do {
    double s = 0;
    for (std::size_t r = 0; r < n; ++r) s += m[r * n + perm[r]];
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Best global alignment score by enumerating every alignment path.
inline long long exhaustive_alignment_score(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b,
                                            std::size_t i, std::size_t j,
                                            int match, int sub, int gap) {
  if (i == a.size() && j == b.size()) return 0;
  long long best = -(1LL << 60);
  if (i < a.size() && j < b.size()) {
    best = std::max(best, (a[i] == b[j] ? match : sub) +
                              exhaustive_alignment_score(a, b, i + 1, j + 1, match, sub, gap));
  }
  if (i < a.size()) {
    best = std::max(best, gap + exhaustive_alignment_score(a, b, i + 1, j, match, sub, gap));
  }
  if (j < b.size()) {
    best = std::max(best, gap + exhaustive_alignment_score(a, b, i, j + 1, match, sub, gap));
  }
  return best;
}

inline double binomial_majority_error(double eps, std::size_t v) {
  double total = 0;
  for (std::size_t j = v / 2 + 1; j <= v; ++j) {
    double c = 1;
    for (std::size_t t = 0; t < j; ++t) c = c * double(v - t) / double(t + 1);
    total += c * std::pow(eps, double(j)) * std::pow(1 - eps, double(v - j));
  }
  return total;
}

}  // namespace oracles

namespace oracles {

// True when consecutive-window label matching can recover the speaker
// bijection: every window either introduces no speaker outside its overlap
// with the previous window, or that overlap shows at least p - 1 speakers.
inline bool overlaps_identify_labels(const std::vector<std::string>& speakers,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& windows,
                                     std::size_t p) {
  for (std::size_t j = 1; j < windows.size(); ++j) {
    auto [a0, a1] = windows[j - 1];
    auto [b0, b1] = windows[j];
    std::vector<std::string> shared, fresh;
    for (std::size_t s = std::max(a0, b0); s <= std::min(a1, b1); ++s) shared.push_back(speakers[s]);
    std::sort(shared.begin(), shared.end());
    shared.erase(std::unique(shared.begin(), shared.end()), shared.end());
    for (std::size_t s = b0; s <= b1; ++s) {
      if (!std::binary_search(shared.begin(), shared.end(), speakers[s])) fresh.push_back(speakers[s]);
    }
    if (!fresh.empty() && shared.size() + 1 < p) return false;
  }
  return true;
}

}  // namespace oracles
