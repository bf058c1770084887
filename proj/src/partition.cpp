#include "privgraphon/partition.hpp"

#include <cmath>
#include <numeric>

namespace privgraphon {

double count_equipartitions(int n, int k) {
  require(k >= 1 && k <= n, "need 1 <= k <= n");
  const int f = n / k;
  const int r = n % k;
  // C(k, r) * n! / ((f+1)!^r f!^(k-r)), in log space.
  const double log_count = std::lgamma(k + 1.0) - std::lgamma(r + 1.0) - std::lgamma(k - r + 1.0) +
                           std::lgamma(n + 1.0) - r * std::lgamma(f + 2.0) -
                           (k - r) * std::lgamma(f + 1.0);
  return std::round(std::exp(log_count));
}

Equipartition random_equipartition(int n, int k, Rng& rng) {
  auto labels = Equipartition::standard(n, k).assignment();
  std::vector<int> relabel(static_cast<std::size_t>(k));
  std::iota(relabel.begin(), relabel.end(), 0);
  for (int i = k - 1; i > 0; --i) std::swap(relabel[i], relabel[rng.below(i + 1)]);
  for (auto& c : labels) c = relabel[c];
  for (int i = n - 1; i > 0; --i) std::swap(labels[i], labels[rng.below(i + 1)]);
  return Equipartition(k, std::move(labels));
}

double block_inner_product(const Matrix& a, const Matrix& b, const std::vector<int>& assignment) {
  const int n = static_cast<int>(a.rows());
  double total = 0.0;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) total += a(x, y) * b(assignment[x], assignment[y]);
  return total;
}

int swap_local_search(const Matrix& a, const Matrix& b, std::vector<int>& pi) {
  const int n = static_cast<int>(a.rows());
  const int k = static_cast<int>(b.rows());
  // m(x, c) = sum_{y != x, pi(y) = c} a(x, y)
  Matrix m = Matrix::Zero(n, k);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (y != x) m(x, pi[y]) += a(x, y);

  // gain(x, t): change in F when x alone moves to class t.
  Matrix gain(n, k);
  auto refresh_gain = [&](int x) {
    const int s = pi[x];
    for (int t = 0; t < k; ++t) {
      double g = 0.0;
      for (int c = 0; c < k; ++c) g += m(x, c) * (b(t, c) - b(s, c));
      gain(x, t) = 2.0 * g + a(x, x) * (b(t, t) - b(s, s));
    }
  };
  for (int x = 0; x < n; ++x) refresh_gain(x);

  const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff());
  int swaps = 0;
  for (;;) {
    double best = tol;
    int bx = -1;
    int by = -1;
    for (int x = 0; x < n; ++x) {
      const int s = pi[x];
      for (int y = x + 1; y < n; ++y) {
        const int t = pi[y];
        if (s == t) continue;
        const double delta =
            gain(x, t) + gain(y, s) - 2.0 * a(x, y) * (b(t, t) + b(s, s) - 2.0 * b(s, t));
        if (delta > best) {
          best = delta;
          bx = x;
          by = y;
        }
      }
    }
    if (bx < 0) break;
    const int s = pi[bx];
    const int t = pi[by];
    for (int z = 0; z < n; ++z) {
      if (z != bx) {
        m(z, s) -= a(z, bx);
        m(z, t) += a(z, bx);
      }
      if (z != by) {
        m(z, t) -= a(z, by);
        m(z, s) += a(z, by);
      }
    }
    pi[bx] = t;
    pi[by] = s;
    for (int x = 0; x < n; ++x) refresh_gain(x);
    ++swaps;
  }
  return swaps;
}

}  // namespace privgraphon
