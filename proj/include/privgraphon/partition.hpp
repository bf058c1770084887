#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "privgraphon/rng.hpp"
#include "privgraphon/types.hpp"

namespace privgraphon {

/// Number of equipartitions of [n] into k classes (as a double; may be huge).
double count_equipartitions(int n, int k);

/// Uniformly random equipartition of [n] into k classes.
Equipartition random_equipartition(int n, int k, Rng& rng);

/// Visits every equipartition of [n] into k classes in lexicographic order of
/// the assignment vector. The visitor receives the assignment, the block sums
/// e(s,t) = sum_{x in s, y in t} a(x,y) (diagonal of `a` included) and the
/// class sizes. Block sums are maintained incrementally along the search tree.
template <class Visitor>
void for_each_equipartition(const Matrix& a, int k, Visitor&& visit) {
  const int n = static_cast<int>(a.rows());
  require(a.rows() == a.cols(), "matrix must be square");
  require(k >= 1 && k <= n, "need 1 <= k <= n");
  const int floor_size = n / k;
  const int big_classes = n % k;
  const int cap = floor_size + (big_classes > 0 ? 1 : 0);

  std::vector<int> assignment(static_cast<std::size_t>(n), 0);
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  std::vector<Matrix> sums(static_cast<std::size_t>(n) + 1, Matrix::Zero(k, k));
  int at_cap = 0;
  std::vector<double> row(static_cast<std::size_t>(k));

  auto recurse = [&](auto&& self, int v) -> void {
    if (v == n) {
      visit(static_cast<const std::vector<int>&>(assignment), static_cast<const Matrix&>(sums[n]),
            static_cast<const std::vector<int>&>(sizes));
      return;
    }
    const int remaining = n - v - 1;
    for (int c = 0; c < k; ++c) {
      if (sizes[c] >= cap) continue;
      const bool reaches_cap = big_classes > 0 && sizes[c] + 1 == cap;
      if (reaches_cap && at_cap >= big_classes) continue;
      ++sizes[c];
      at_cap += reaches_cap ? 1 : 0;
      int deficit = 0;
      for (int s = 0; s < k; ++s) deficit += std::max(0, floor_size - sizes[s]);
      if (deficit <= remaining) {
        assignment[v] = c;
        Matrix& next = sums[v + 1];
        next = sums[v];
        std::fill(row.begin(), row.end(), 0.0);
        for (int u = 0; u < v; ++u) row[assignment[u]] += a(v, u);
        for (int s = 0; s < k; ++s) {
          next(c, s) += row[s];
          next(s, c) += row[s];
        }
        next(c, c) += a(v, v);
        self(self, v + 1);
      }
      at_cap -= reaches_cap ? 1 : 0;
      --sizes[c];
    }
  };
  recurse(recurse, 0);
}

/// Best-improvement pairwise-swap local search maximizing
/// F(pi) = sum_{x,y} a(x,y) b(pi(x), pi(y)) over equipartitions with the class
/// sizes of the starting point. `a` must be symmetric. Returns the number of
/// swaps applied.
int swap_local_search(const Matrix& a, const Matrix& b, std::vector<int>& assignment);

/// sum_{x,y} a(x,y) b(pi(x), pi(y)).
double block_inner_product(const Matrix& a, const Matrix& b, const std::vector<int>& assignment);

}  // namespace privgraphon
