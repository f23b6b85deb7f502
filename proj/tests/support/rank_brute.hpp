#pragma once

// Independent exact two-sided rank-sum tail for tie-free samples: recursively
// choose which ranks of the merged order belong to the first sample and count
// splits at least as extreme as the observed doubled U. The library enumerates
// bitmasks; this walks combinations, so the two share no code path.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <span>
#include <vector>

namespace coopeq::testing {

namespace detail {

struct TailCount {
  long long hits = 0;
  long long splits = 0;
};

inline void walk_rank_splits(int next_rank, int total, int remaining,
                             long long rank_sum, int na, long long target_doubled,
                             TailCount& out) {
  if (remaining == 0) {
    ++out.splits;
    const long long u2 = 2 * rank_sum - static_cast<long long>(na) * (na + 1);
    if (std::llabs(u2 - static_cast<long long>(na) * (total - na)) >= target_doubled)
      ++out.hits;
    return;
  }
  if (total - next_rank + 1 < remaining) return;
  walk_rank_splits(next_rank + 1, total, remaining - 1, rank_sum + next_rank, na,
                   target_doubled, out);
  walk_rank_splits(next_rank + 1, total, remaining, rank_sum, na, target_doubled, out);
}

}  // namespace detail

inline double brute_force_two_sided(std::span<const double> a,
                                    std::span<const double> b) {
  std::vector<double> merged(a.begin(), a.end());
  merged.insert(merged.end(), b.begin(), b.end());
  std::sort(merged.begin(), merged.end());
  long long rank_sum_a = 0;
  for (double x : a)
    rank_sum_a +=
        1 + (std::lower_bound(merged.begin(), merged.end(), x) - merged.begin());
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  const long long u2 = 2 * rank_sum_a - static_cast<long long>(na) * (na + 1);
  const long long target = std::llabs(u2 - static_cast<long long>(na) * nb);

  detail::TailCount tail;
  detail::walk_rank_splits(1, na + nb, na, 0, na, target, tail);
  return static_cast<double>(tail.hits) / static_cast<double>(tail.splits);
}

}  // namespace coopeq::testing
