#include "privgraphon/metrics.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>

#include "privgraphon/graphon.hpp"
#include "privgraphon/partition.hpp"
#include "privgraphon/quadrature.hpp"
#include "privgraphon/rng.hpp"

namespace privgraphon {

std::string to_string(AlignmentMethod m) {
  return m == AlignmentMethod::exact ? "exact" : "alternating";
}

void check_exact_limits(int n, int k, const ExactLimits& limits) {
  if (n > limits.max_n)
    throw LimitExceeded("exact search needs n <= " + std::to_string(limits.max_n) + " (got " +
                        std::to_string(n) + "); use the heuristic");
  if (k > limits.max_k)
    throw LimitExceeded("exact search needs k <= " + std::to_string(limits.max_k) + " (got " +
                        std::to_string(k) + "); use the heuristic");
}

double alignment_distance(const BlockModel& b, const Matrix& a, const Equipartition& pi) {
  return l2_norm_matrix(lift_block_model(b, pi) - a);
}

namespace {

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

// sum_{s,t} b_st^2 n_s n_t
double lifted_square_sum(const Matrix& b, const std::vector<int>& sizes) {
  double total = 0.0;
  for (int t = 0; t < b.cols(); ++t)
    for (int s = 0; s < b.rows(); ++s) total += b(s, t) * b(s, t) * sizes[s] * sizes[t];
  return total;
}

}  // namespace

AlignmentResult hat_delta2_exact(const BlockModel& b, const Matrix& a, const ExactLimits& limits) {
  const int n = static_cast<int>(a.rows());
  const int k = b.k();
  require(a.rows() == a.cols(), "matrix must be square");
  require(k <= n, "need k <= n");
  check_exact_limits(n, k, limits);

  const Matrix sym = symmetrized(a);
  const double a_sq = a.squaredNorm();
  const double tol = 1e-12 * std::max(1.0, a_sq);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_assignment;
  for_each_equipartition(sym, k, [&](const std::vector<int>& assign, const Matrix& e,
                                     const std::vector<int>& sizes) {
    const double value = a_sq - 2.0 * b.b.cwiseProduct(e).sum() + lifted_square_sum(b.b, sizes);
    if (value < best - tol) {
      best = value;
      best_assignment = assign;
    }
  });
  AlignmentResult out;
  out.pi = Equipartition(k, std::move(best_assignment));
  out.distance = alignment_distance(b, a, out.pi);
  out.method = AlignmentMethod::exact;
  out.restarts_used = 0;
  return out;
}

AlignmentResult hat_delta2_heuristic(const BlockModel& b, const Matrix& a, int restarts,
                                     std::uint64_t seed) {
  require(restarts >= 1, "restarts must be at least 1");
  const int n = static_cast<int>(a.rows());
  require(a.rows() == a.cols(), "matrix must be square");
  require(b.k() <= n, "need k <= n");
  const Matrix sym = symmetrized(a);
  AlignmentResult out;
  out.method = AlignmentMethod::alternating;
  out.restarts_used = restarts;
  out.distance = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    auto assign = random_equipartition(n, b.k(), rng).assignment();
    swap_local_search(sym, b.b, assign);
    Equipartition pi(b.k(), std::move(assign));
    const double d = alignment_distance(b, a, pi);
    if (d < out.distance) {
      out.distance = d;
      out.pi = std::move(pi);
    }
  }
  return out;
}

double hat_delta2_relabel_exact(const Matrix& a, const Matrix& b) {
  const int n = static_cast<int>(a.rows());
  require(a.rows() == a.cols() && b.rows() == a.rows() && b.cols() == a.cols(),
          "relabel distance needs equal square matrices");
  if (n > 8) throw LimitExceeded("relabel enumeration needs n <= 8");
  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const double d = a(sigma[x], sigma[y]) - b(x, y);
        total += d * d;
      }
    best = std::min(best, total);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return n == 0 ? 0.0 : std::sqrt(best) / n;
}

double l2_distance_step(const StepGraphon& u, const StepGraphon& w) {
  std::vector<double> merged = u.boundaries;
  merged.insert(merged.end(), w.boundaries.begin(), w.boundaries.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end(),
                           [](double x, double y) { return std::abs(x - y) <= 1e-15; }),
               merged.end());
  const int cells = static_cast<int>(merged.size()) - 1;
  std::vector<double> len(static_cast<std::size_t>(cells));
  std::vector<int> ub(static_cast<std::size_t>(cells));
  std::vector<int> wb(static_cast<std::size_t>(cells));
  for (int c = 0; c < cells; ++c) {
    len[c] = merged[c + 1] - merged[c];
    const double mid = 0.5 * (merged[c] + merged[c + 1]);
    ub[c] = u.block_of(mid);
    wb[c] = w.block_of(mid);
  }
  double total = 0.0;
  for (int j = 0; j < cells; ++j)
    for (int i = 0; i < cells; ++i) {
      const double d = u.values(ub[i], ub[j]) - w.values(wb[i], wb[j]);
      total += len[i] * len[j] * d * d;
    }
  return std::sqrt(total);
}

namespace {

// Smallest denominator D <= max_den with x*D integral, or 0.
long rational_denominator(double x, long max_den) {
  for (long d = 1; d <= max_den; ++d)
    if (std::abs(x * d - std::round(x * d)) <= 1e-9) return d;
  return 0;
}

std::vector<int> cell_counts(const StepGraphon& s, long cells) {
  std::vector<int> counts;
  for (double m : s.measures()) counts.push_back(static_cast<int>(std::lround(m * cells)));
  return counts;
}

// Visits every nonnegative integer matrix with the given row and column sums.
template <class Visitor>
bool for_each_contingency_table(const std::vector<int>& rows, const std::vector<int>& cols,
                                long limit, Visitor&& visit) {
  const int kr = static_cast<int>(rows.size());
  const int kc = static_cast<int>(cols.size());
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(kr, kc);
  std::vector<int> col_left = cols;
  long visited = 0;
  bool aborted = false;
  auto fill = [&](auto&& self, int r, int c, int row_left) -> void {
    if (aborted) return;
    if (r == kr) {
      if (++visited > limit) {
        aborted = true;
        return;
      }
      visit(static_cast<const Eigen::MatrixXi&>(table));
      return;
    }
    if (c == kc - 1) {
      if (row_left > col_left[c]) return;
      table(r, c) = row_left;
      col_left[c] -= row_left;
      self(self, r + 1, 0, r + 1 < kr ? rows[r + 1] : 0);
      col_left[c] += row_left;
      return;
    }
    const int hi = std::min(row_left, col_left[c]);
    for (int v = 0; v <= hi; ++v) {
      table(r, c) = v;
      col_left[c] -= v;
      self(self, r, c + 1, row_left - v);
      col_left[c] += v;
    }
  };
  fill(fill, 0, 0, kr > 0 ? rows[0] : 0);
  return !aborted;
}

}  // namespace

namespace {

// sum over (p, r), (q, s) of N_pr N_qs (U_pq - W_rs)^2, without cancellation.
double table_error_sq(const Matrix& u, const Matrix& w, const Matrix& table) {
  double total = 0.0;
  for (Eigen::Index p = 0; p < u.rows(); ++p)
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      if (table(p, r) == 0.0) continue;
      for (Eigen::Index q = 0; q < u.rows(); ++q)
        for (Eigen::Index s = 0; s < w.rows(); ++s) {
          const double d = u(p, q) - w(r, s);
          total += table(p, r) * table(q, s) * d * d;
        }
    }
  return total;
}

}  // namespace

Delta2Result delta2_step_graphons(const StepGraphon& u, const StepGraphon& w,
                                  const Delta2Options& options) {
  require(options.refine >= 1, "refine must be positive");
  long lcm = 1;
  bool rational = true;
  for (const auto* s : {&u, &w})
    for (double b : s->boundaries) {
      const long d = rational_denominator(b, 1000);
      if (d == 0) {
        rational = false;
        break;
      }
      lcm = std::lcm(lcm, d);
    }
  if (!rational || lcm > options.max_cells) {
    if (!options.allow_upper_bound)
      throw ValidationError(rational ? "common refinement exceeds max_cells"
                                     : "boundaries are not rational; exact delta_2 unavailable");
    return {l2_distance_step(u, w), false, 0};
  }
  const long cells = lcm * options.refine;
  const auto cu = cell_counts(u, cells);
  const auto cw = cell_counts(w, cells);

  double constant = 0.0;
  for (std::size_t q = 0; q < cu.size(); ++q)
    for (std::size_t p = 0; p < cu.size(); ++p)
      constant += double(cu[p]) * cu[q] * u.values(p, q) * u.values(p, q);
  for (std::size_t s = 0; s < cw.size(); ++s)
    for (std::size_t r = 0; r < cw.size(); ++r)
      constant += double(cw[r]) * cw[s] * w.values(r, s) * w.values(r, s);

  double best = std::numeric_limits<double>::infinity();
  Matrix best_table;
  const bool complete = for_each_contingency_table(cu, cw, 5'000'000, [&](const Eigen::MatrixXi& t) {
    const Matrix n = t.cast<double>();
    const double value = constant - 2.0 * (n.transpose() * u.values * n).cwiseProduct(w.values).sum();
    if (value < best) {
      best = value;
      best_table = n;
    }
  });
  const double scale = 1.0 / static_cast<double>(cells);
  if (complete) return {std::sqrt(table_error_sq(u.values, w.values, best_table)) * scale, true, static_cast<int>(cells)};

  // Fallback: swap search over which U-block each W-cell receives.
  Matrix w_cells(cells, cells);
  std::vector<int> w_label;
  for (std::size_t r = 0; r < cw.size(); ++r) w_label.insert(w_label.end(), cw[r], static_cast<int>(r));
  for (long j = 0; j < cells; ++j)
    for (long i = 0; i < cells; ++i) w_cells(i, j) = w.values(w_label[i], w_label[j]);
  std::vector<int> assign;
  for (std::size_t p = 0; p < cu.size(); ++p) assign.insert(assign.end(), cu[p], static_cast<int>(p));
  swap_local_search(w_cells, u.values, assign);
  const double value = constant - 2.0 * block_inner_product(w_cells, u.values, assign);
  return {std::sqrt(std::max(0.0, std::min(best, value))) * scale, false, static_cast<int>(cells)};
}

double eps_k_oracle(const Graphon& w, int k) {
  const BlockModel avg = average_graphon_over_uniform_partition(w, k);
  if (w.is_step()) return l2_distance_step(w.step(), StepGraphon::uniform(avg.b));
  const auto& f = w.holder().evaluator;
  double total = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const double c = avg.b(i, j);
      const double cell = quadrature::integrate2(
          [&](double x, double y) {
            const double d = f(x, y) - c;
            return d * d;
          },
          static_cast<double>(i) / k, static_cast<double>(i + 1) / k, static_cast<double>(j) / k,
          static_cast<double>(j + 1) / k, 1e-13);
      total += (i == j ? 1.0 : 2.0) * cell;
    }
  return std::sqrt(total);
}

namespace {

// Overlap of [l/n, (l+1)/n) with each block, n x k.
Matrix interval_block_overlaps(int n, const StepGraphon& s) {
  const int k = s.blocks();
  Matrix o = Matrix::Zero(n, k);
  for (int l = 0; l < n; ++l) {
    const double lo = static_cast<double>(l) / n;
    const double hi = static_cast<double>(l + 1) / n;
    for (int t = 0; t < k; ++t)
      o(l, t) = std::max(0.0, std::min(hi, s.boundaries[t + 1]) - std::max(lo, s.boundaries[t]));
  }
  return o;
}

// ||W[H] - W||_2^2 where interval l carries a point from block label[l].
double arrangement_error_sq(const StepGraphon& s, const Matrix& overlaps, const std::vector<int>& label) {
  const int k = s.blocks();
  Matrix p = Matrix::Zero(k, k);  // p(a, t): mass of block t covered by intervals labelled a
  for (std::size_t l = 0; l < label.size(); ++l) p.row(label[l]) += overlaps.row(static_cast<Eigen::Index>(l));
  double total = 0.0;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int t = 0; t < k; ++t)
        for (int u = 0; u < k; ++u) {
          const double d = s.values(a, b) - s.values(t, u);
          total += p(a, t) * p(b, u) * d * d;
        }
  return total;
}

std::vector<int> sorted_order(const LatentSample& latents) {
  std::vector<int> order(static_cast<std::size_t>(latents.n()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return latents.positions[i] < latents.positions[j];
  });
  return order;
}

}  // namespace

EpsNResult eps_n_with_latents(const Graphon& w, const LatentSample& latents) {
  require(w.is_step(), "eps_n_with_latents needs a step graphon; use eps_n_grid");
  const auto& s = w.step();
  const int n = latents.n();
  const Matrix overlaps = interval_block_overlaps(n, s);
  std::vector<int> label(static_cast<std::size_t>(n));
  const auto order = sorted_order(latents);
  EpsNResult out;
  for (int l = 0; l < n; ++l) {
    label[l] = s.block_of(latents.positions[order[l]]);
    if (overlaps(l, label[l]) < 1.0 / n - 1e-12) ++out.misaligned;
  }
  out.constructive = std::sqrt(std::max(0.0, arrangement_error_sq(s, overlaps, label)));
  if (n <= 8) {
    std::vector<int> perm = label;
    std::sort(perm.begin(), perm.end());
    double best = std::numeric_limits<double>::infinity();
    do {
      best = std::min(best, arrangement_error_sq(s, overlaps, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.exact = std::sqrt(std::max(0.0, best));
  }
  return out;
}

double eps_n_grid(const Graphon& w, const LatentSample& latents) {
  const int n = latents.n();
  const auto order = sorted_order(latents);
  Matrix diff(n, n);
  for (int m = 0; m < n; ++m)
    for (int l = 0; l < n; ++l) {
      const double gx = (l + 0.5) / n;
      const double gy = (m + 0.5) / n;
      diff(l, m) = w(gx, gy) - w(latents.positions[order[l]], latents.positions[order[m]]);
    }
  return l2_norm_matrix(diff);
}

double eps_k_hat_exact(const Matrix& h, int k, const ExactLimits& limits) {
  const int n = static_cast<int>(h.rows());
  require(h.rows() == h.cols(), "matrix must be square");
  check_exact_limits(n, k, limits);
  const Matrix sym = symmetrized(h);
  const double h_sq = h.squaredNorm();
  double best = std::numeric_limits<double>::infinity();
  for_each_equipartition(sym, k, [&](const std::vector<int>&, const Matrix& e, const std::vector<int>& sizes) {
    double explained = 0.0;
    for (int t = 0; t < k; ++t)
      for (int s = 0; s < k; ++s) explained += e(s, t) * e(s, t) / (double(sizes[s]) * sizes[t]);
    best = std::min(best, h_sq - explained);
  });
  return std::sqrt(std::max(0.0, best)) / n;
}

OracleErrors oracle_errors(const Graphon& w, const LatentSample& latents, int k,
                           const ExactLimits& limits) {
  OracleErrors out;
  out.eps_k_oracle = eps_k_oracle(w, k);
  out.eps_n = w.is_step() ? eps_n_with_latents(w, latents).constructive : eps_n_grid(w, latents);
  out.eps_k_hat = eps_k_hat_exact(latent_matrix(w, latents), k, limits);
  return out;
}

double cut_norm_exact(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  require(m.rows() == m.cols(), "cut norm needs a square matrix");
  if (n > 22) throw LimitExceeded("cut_norm_exact needs n <= 22");
  if (n == 0) return 0.0;
  std::vector<double> col(static_cast<std::size_t>(n), 0.0);
  std::vector<char> in_s(static_cast<std::size_t>(n), 0);
  double best = 0.0;
  const std::uint32_t total = 1u << n;
  for (std::uint32_t i = 1; i < total; ++i) {
    const int bit = std::countr_zero(i);
    const double sign = in_s[bit] ? -1.0 : 1.0;
    in_s[bit] = !in_s[bit];
    double pos = 0.0;
    double neg = 0.0;
    for (int j = 0; j < n; ++j) {
      col[j] += sign * m(bit, j);
      if (col[j] > 0) pos += col[j];
      else neg -= col[j];
    }
    best = std::max(best, std::max(pos, neg));
  }
  return best / (static_cast<double>(n) * n);
}

double hat_cut_distance_exact(const Matrix& a, const Matrix& b) {
  const int n = static_cast<int>(a.rows());
  require(a.rows() == a.cols() && b.rows() == a.rows() && b.cols() == a.cols(),
          "cut distance needs equal square matrices");
  if (n > 8) throw LimitExceeded("relabel enumeration needs n <= 8");
  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  Matrix diff(n, n);
  do {
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) diff(x, y) = a(sigma[x], sigma[y]) - b(x, y);
    best = std::min(best, cut_norm_exact(diff));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return best;
}

}  // namespace privgraphon
