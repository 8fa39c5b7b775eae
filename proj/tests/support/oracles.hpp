#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace speedup::oracles {

// Exact transport cost between two integer mass vectors of equal small total,
// by expanding both into unit items and trying every pairing. cost(i, j) is
// an integer; returns the minimum total cost.
inline int64_t BruteForceTransport(const std::vector<int64_t>& a, const std::vector<int64_t>& b,
                                   const std::function<int64_t(int, int)>& cost) {
  std::vector<int> left, right;
  for (size_t i = 0; i < a.size(); ++i)
    for (int64_t k = 0; k < a[i]; ++k) left.push_back(static_cast<int>(i));
  for (size_t j = 0; j < b.size(); ++j)
    for (int64_t k = 0; k < b[j]; ++k) right.push_back(static_cast<int>(j));
  std::vector<int> perm(right.size());
  std::iota(perm.begin(), perm.end(), 0);
  int64_t best = std::numeric_limits<int64_t>::max();
  do {
    int64_t c = 0;
    for (size_t u = 0; u < left.size(); ++u) c += cost(left[u], right[perm[u]]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace speedup::oracles
