#include "privgraphon/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

namespace privgraphon {

namespace {

constexpr double kMaxEnumeration = 1e7;

std::vector<double> flatten(const Quotient& x) {
  std::vector<double> out(x.alpha.data(), x.alpha.data() + x.alpha.size());
  for (int i = 0; i < x.q; ++i)
    for (int j = 0; j < x.q; ++j) out.push_back(x.beta(i, j));
  return out;
}

bool less_with_tolerance(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-12) return true;
    if (a[i] > b[i] + 1e-12) return false;
  }
  return false;
}

Quotient relabel(const Quotient& x, const std::vector<int>& sigma) {
  Quotient y;
  y.q = x.q;
  y.alpha.resize(x.q);
  y.beta.resize(x.q, x.q);
  for (int i = 0; i < x.q; ++i) {
    y.alpha(i) = x.alpha(sigma[i]);
    for (int j = 0; j < x.q; ++j) y.beta(i, j) = x.beta(sigma[i], sigma[j]);
  }
  return y;
}

std::vector<std::vector<int>> permutations(int q) {
  std::vector<int> sigma(static_cast<std::size_t>(q));
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(sigma);
  while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

void dedup(std::vector<Quotient>& members) {
  std::vector<std::pair<std::vector<double>, std::size_t>> keyed;
  keyed.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) keyed.emplace_back(flatten(members[i]), i);
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return less_with_tolerance(a.first, b.first); });
  std::vector<Quotient> out;
  const std::vector<double>* last = nullptr;
  for (const auto& [key, index] : keyed) {
    if (last && !less_with_tolerance(*last, key)) continue;
    out.push_back(members[index]);
    last = &key;
  }
  members = std::move(out);
}

// Visits every labelling of [n] with labels < q in restricted-growth form.
template <class Visitor>
void for_each_restricted_growth(int n, int q, Visitor&& visit) {
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  auto recurse = [&](auto&& self, int v, int used) -> void {
    if (v == n) {
      visit(static_cast<const std::vector<int>&>(labels));
      return;
    }
    const int top = std::min(used + 1, q);
    for (int c = 0; c < top; ++c) {
      labels[v] = c;
      self(self, v + 1, std::max(used, c + 1));
    }
  };
  recurse(recurse, 0, 0);
}

QuotientSet enumerate_quotients(const Matrix& w, int q) {
  const int n = static_cast<int>(w.rows());
  require(q >= 1, "q must be positive");
  require(n >= 1, "need at least one vertex");
  require(std::pow(static_cast<double>(q), n) <= kMaxEnumeration, "q^n exceeds the enumeration bound 1e7");
  QuotientSet out;
  out.q = q;
  out.provenance = QuotientProvenance::integer;
  for_each_restricted_growth(n, q, [&](const std::vector<int>& labels) {
    out.members.push_back(canonical_form(quotient_of_weighted(w, labels, q)));
  });
  dedup(out.members);
  return out;
}

// Every vector of q multiples of 1/m summing to 1.
std::vector<std::vector<int>> simplex_grid(int q, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> parts(static_cast<std::size_t>(q), 0);
  auto recurse = [&](auto&& self, int i, int left) -> void {
    if (i == q - 1) {
      parts[i] = left;
      out.push_back(parts);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      parts[i] = v;
      self(self, i + 1, left - v);
    }
  };
  recurse(recurse, 0, m);
  return out;
}

}  // namespace

Quotient quotient_of_weighted(const Matrix& w, const std::vector<int>& partition, int q) {
  const int n = static_cast<int>(w.rows());
  require(w.rows() == w.cols(), "weight matrix must be square");
  require(static_cast<int>(partition.size()) == n, "partition and graph sizes differ");
  require(q >= 1, "q must be positive");
  const double total = w.sum();
  require(total > 0.0, "quotients need at least one edge");
  Quotient out;
  out.q = q;
  out.alpha = Vector::Zero(q);
  out.beta = Matrix::Zero(q, q);
  for (int x = 0; x < n; ++x) {
    require(partition[x] >= 0 && partition[x] < q, "partition label out of range");
    out.alpha(partition[x]) += 1.0;
  }
  out.alpha /= n;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) out.beta(partition[x], partition[y]) += w(x, y);
  out.beta /= total;
  return out;
}

Quotient quotient_of_graph(const SimpleGraph& g, const std::vector<int>& partition, int q) {
  require(g.num_edges() > 0, "quotients need at least one edge");
  return quotient_of_weighted(g.adjacency(), partition, q);
}

Quotient canonical_form(const Quotient& x) {
  Quotient best = x;
  auto best_key = flatten(x);
  for (const auto& sigma : permutations(x.q)) {
    Quotient y = relabel(x, sigma);
    auto key = flatten(y);
    if (key < best_key) {
      best_key = std::move(key);
      best = std::move(y);
    }
  }
  return best;
}

double quotient_distance(const Quotient& x, const Quotient& y) {
  require(x.q == y.q, "quotients have different q");
  return std::max((x.alpha - y.alpha).cwiseAbs().maxCoeff(), (x.beta - y.beta).cwiseAbs().maxCoeff());
}

QuotientSet all_quotients(const SimpleGraph& g, int q) {
  require(g.num_edges() > 0, "quotients need at least one edge");
  return enumerate_quotients(g.adjacency(), q);
}

QuotientSet all_quotients_weighted(const Matrix& w, int q) {
  require(w.minCoeff() >= 0.0, "weights must be nonnegative");
  require(w.isApprox(w.transpose()), "weights must be symmetric");
  return enumerate_quotients(w, q);
}

QuotientSet fractional_quotients_of_block_model(const BlockModel& b, const std::vector<double>& block_measures,
                                                int q, double resolution) {
  const int k = b.k();
  require(static_cast<int>(block_measures.size()) == k, "need one measure per block");
  require(q >= 1, "q must be positive");
  require(resolution > 0.0 && resolution <= 1.0, "resolution must lie in (0,1]");
  const int m = static_cast<int>(std::lround(1.0 / resolution));
  require(std::abs(m * resolution - 1.0) <= 1e-9, "resolution must be 1/m for an integer m");
  require(std::pow(static_cast<double>(m), k * (q - 1)) <= kMaxEnumeration, "fractional grid exceeds 1e7 points");
  const Vector p = Eigen::Map<const Vector>(block_measures.data(), k);
  require(std::abs(p.sum() - 1.0) <= 1e-9 && p.minCoeff() >= 0.0, "block measures must form a distribution");
  const double norm = p.dot(b.b * p);
  require(norm > 0.0, "graphon must have positive mass");

  const auto splits = simplex_grid(q, m);
  QuotientSet out;
  out.q = q;
  out.provenance = QuotientProvenance::fractional_grid;
  out.grid_resolution = resolution;
  const double delta = static_cast<double>(q - 1) / m;
  out.mesh_bound = std::max(delta, 2.0 * delta * b.b.maxCoeff() / norm);

  // mass(s, i): measure of block s sent to part i.
  Matrix mass(k, q);
  auto recurse = [&](auto&& self, int s) -> void {
    if (s == k) {
      Quotient x;
      x.q = q;
      x.alpha = mass.colwise().sum().transpose();
      x.beta = mass.transpose() * b.b * mass / norm;
      out.members.push_back(canonical_form(x));
      return;
    }
    for (std::size_t c = 0; c < splits.size(); ++c) {
      for (int i = 0; i < q; ++i) mass(s, i) = p(s) * splits[c][i] / m;
      self(self, s + 1);
    }
  };
  recurse(recurse, 0);
  dedup(out.members);
  return out;
}

double directed_hausdorff(const QuotientSet& from, const QuotientSet& to) {
  require(from.q == to.q, "quotient sets have different q");
  require(!from.members.empty() && !to.members.empty(), "quotient sets must be nonempty");
  std::vector<Quotient> targets;
  if (to.relabel_closed) {
    const auto perms = permutations(to.q);
    for (const auto& y : to.members)
      for (const auto& sigma : perms) targets.push_back(relabel(y, sigma));
  } else {
    targets = to.members;
  }
  double worst = 0.0;
  for (const auto& x : from.members) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& y : targets) {
      nearest = std::min(nearest, quotient_distance(x, y));
      if (nearest <= worst) break;
    }
    worst = std::max(worst, nearest);
  }
  return worst;
}

double hausdorff_distance(const QuotientSet& a, const QuotientSet& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

void write_quotient_csv(std::ostream& out, const QuotientSet& set) {
  out << "q,member_index";
  for (int i = 1; i <= set.q; ++i) out << ",alpha_" << i;
  for (int i = 1; i <= set.q; ++i)
    for (int j = 1; j <= set.q; ++j) out << ",beta_" << i << j;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t m = 0; m < set.members.size(); ++m) {
    const auto& x = set.members[m];
    out << set.q << ',' << m;
    for (int i = 0; i < set.q; ++i) out << ',' << x.alpha(i);
    for (int i = 0; i < set.q; ++i)
      for (int j = 0; j < set.q; ++j) out << ',' << x.beta(i, j);
    out << '\n';
  }
}

}  // namespace privgraphon
