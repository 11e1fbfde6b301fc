#include "textdiar/assignment.h"

#include <algorithm>
#include <limits>
#include <numeric>

namespace textdiar {

double assignment_score(const ScoreMatrix& m, const Assignment& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) s += m(r, a[r]);
  return s;
}

Assignment max_assignment_exhaustive(const ScoreMatrix& m) {
  Assignment perm(m.n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Assignment best = perm;
  double best_score = assignment_score(m, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double s = assignment_score(m, perm);
    if (s > best_score) {
      best_score = s;
      best = perm;
    }
  }
  return best;
}

Assignment max_assignment_hungarian(const ScoreMatrix& m) {
  const std::size_t n = m.n;
  if (n == 0) return {};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Minimize cost = -score. 1-based arrays with column 0 as the virtual
  // source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r = match[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = -m(r - 1, c - 1) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  Assignment out(n);
  for (std::size_t c = 1; c <= n; ++c) out[match[c] - 1] = c - 1;
  return out;
}

Assignment max_assignment(const ScoreMatrix& m) {
  if (m.n <= kExhaustiveLimit) return max_assignment_exhaustive(m);
  return max_assignment_hungarian(m);
}

}  // namespace textdiar
