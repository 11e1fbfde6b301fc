#pragma once

#include <cstddef>
#include <vector>

namespace textdiar {

// Square score matrix, row-major.
struct ScoreMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  explicit ScoreMatrix(std::size_t size = 0) : n(size), values(size * size) {}
  double& operator()(std::size_t r, std::size_t c) { return values[r * n + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return values[r * n + c];
  }
};

// assignment[r] = column matched to row r.
using Assignment = std::vector<std::size_t>;

double assignment_score(const ScoreMatrix& m, const Assignment& a);

// Maximum-total-score perfect matching. Sizes up to kExhaustiveLimit are
// solved by enumerating permutations in lexicographic order and keeping the
// first optimum; larger sizes use the Hungarian method.
inline constexpr std::size_t kExhaustiveLimit = 6;
Assignment max_assignment(const ScoreMatrix& m);

Assignment max_assignment_exhaustive(const ScoreMatrix& m);
// O(n^3) shortest augmenting path (Kuhn-Munkres with potentials).
Assignment max_assignment_hungarian(const ScoreMatrix& m);

}  // namespace textdiar
