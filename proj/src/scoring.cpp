#include "privgraphon/scoring.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "privgraphon/graphon.hpp"
#include "privgraphon/partition.hpp"
#include "privgraphon/rng.hpp"

namespace privgraphon {

double score_sensitivity(double degree_cap, double mu, int n) {
  require(n >= 1, "n must be positive");
  return 4.0 * degree_cap * mu / (static_cast<double>(n) * n);
}

ScoreContext::ScoreContext(BlockModel b_, Equipartition pi_, double degree_cap_, double mu_)
    : b(std::move(b_)), pi(std::move(pi_)), degree_cap(degree_cap_), mu(mu_) {
  require(b.k() == pi.k(), "block model and partition disagree on k");
  require(degree_cap >= 0.0, "degree cap must be nonnegative");
  require(mu >= 0.0, "mu must be nonnegative");
  require(b.b.maxCoeff() <= mu + 1e-12, "block model entries exceed mu");
  sensitivity = score_sensitivity(degree_cap, mu, pi.n());
}

double score_from_block_sums(const Matrix& b, const Matrix& block_sums, const std::vector<int>& sizes,
                             int n) {
  double linear = 0.0;
  double square = 0.0;
  for (int t = 0; t < b.cols(); ++t)
    for (int s = 0; s < b.rows(); ++s) {
      linear += b(s, t) * block_sums(s, t);
      square += b(s, t) * b(s, t) * sizes[s] * sizes[t];
    }
  return (2.0 * linear - square) / (static_cast<double>(n) * n);
}

double score(const BlockModel& b, const Equipartition& pi, const SimpleGraph& g) {
  require(pi.n() == g.n(), "partition and graph sizes differ");
  require(pi.k() == b.k(), "block model and partition disagree on k");
  const int k = b.k();
  Matrix sums = Matrix::Zero(k, k);
  for (const auto& [i, j] : g.edges()) {
    sums(pi[i], pi[j]) += 1.0;
    sums(pi[j], pi[i]) += 1.0;
  }
  return score_from_block_sums(b.b, sums, pi.class_sizes(), g.n());
}

ScoreMax max_score_exact(const BlockModel& b, const SimpleGraph& g, const ExactLimits& limits) {
  const int n = g.n();
  const int k = b.k();
  require(k <= n, "need k <= n");
  check_exact_limits(n, k, limits);
  ScoreMax out;
  out.value = -std::numeric_limits<double>::infinity();
  std::vector<int> best;
  for_each_equipartition(g.adjacency(), k, [&](const std::vector<int>& assign, const Matrix& e,
                                               const std::vector<int>& sizes) {
    const double v = score_from_block_sums(b.b, e, sizes, n);
    if (v > out.value + 1e-14) {
      out.value = v;
      best = assign;
    }
  });
  out.pi = Equipartition(k, std::move(best));
  return out;
}

namespace {

struct Arc {
  int to;
  int rev;
  double cap;
  double cost;
};

class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes) : arcs_(static_cast<std::size_t>(nodes)) {}

  int add_arc(int from, int to, double cap, double cost) {
    arcs_[from].push_back({to, static_cast<int>(arcs_[to].size()), cap, cost});
    arcs_[to].push_back({from, static_cast<int>(arcs_[from].size()) - 1, 0.0, -cost});
    return static_cast<int>(arcs_[from].size()) - 1;
  }

  const Arc& arc(int node, int index) const { return arcs_[node][index]; }

  // Successive shortest paths until no path of negative cost remains.
  void min_cost_flow(int source, int sink, double tol) {
    const int nodes = static_cast<int>(arcs_.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr double cap_eps = 1e-12;
    std::vector<double> dist(static_cast<std::size_t>(nodes));
    std::vector<int> prev_node(static_cast<std::size_t>(nodes));
    std::vector<int> prev_arc(static_cast<std::size_t>(nodes));
    std::vector<char> queued(static_cast<std::size_t>(nodes));
    for (;;) {
      std::fill(dist.begin(), dist.end(), inf);
      std::fill(queued.begin(), queued.end(), 0);
      dist[source] = 0.0;
      std::deque<int> queue{source};
      queued[source] = 1;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        queued[u] = 0;
        for (int a = 0; a < static_cast<int>(arcs_[u].size()); ++a) {
          const Arc& e = arcs_[u][a];
          if (e.cap <= cap_eps) continue;
          const double nd = dist[u] + e.cost;
          if (nd < dist[e.to] - 1e-13) {
            dist[e.to] = nd;
            prev_node[e.to] = u;
            prev_arc[e.to] = a;
            if (!queued[e.to]) {
              queued[e.to] = 1;
              queue.push_back(e.to);
            }
          }
        }
      }
      if (!(dist[sink] < -tol)) break;
      double push = inf;
      for (int v = sink; v != source; v = prev_node[v])
        push = std::min(push, arcs_[prev_node[v]][prev_arc[v]].cap);
      for (int v = sink; v != source; v = prev_node[v]) {
        Arc& e = arcs_[prev_node[v]][prev_arc[v]];
        e.cap -= push;
        arcs_[v][e.rev].cap += push;
      }
    }
  }

 private:
  std::vector<std::vector<Arc>> arcs_;
};

}  // namespace

FractionalSubgraph solve_degree_capped_subgraph(const Matrix& weights, const SimpleGraph& g, double d) {
  const int n = g.n();
  require(weights.rows() == n && weights.cols() == n, "weights and graph sizes differ");
  require(d >= 0.0, "degree cap must be nonnegative");
  require(weights.minCoeff() >= 0.0, "weights must be nonnegative");
  FractionalSubgraph out;
  out.c = Matrix::Zero(n, n);
  if (n == 0 || d == 0.0) return out;

  const int source = 0;
  const int sink = 2 * n + 1;
  FlowNetwork net(2 * n + 2);
  for (int i = 0; i < n; ++i) {
    net.add_arc(source, 1 + i, d, 0.0);
    net.add_arc(1 + n + i, sink, d, 0.0);
  }
  struct Link {
    int i, j, arc;
  };
  std::vector<Link> links;
  for (int i = 0; i < n; ++i)
    for (int j : g.neighbors(i))
      if (weights(i, j) > 0.0) links.push_back({i, j, net.add_arc(1 + i, 1 + n + j, 1.0, -weights(i, j))});
  net.min_cost_flow(source, sink, 1e-9);

  Matrix f = Matrix::Zero(n, n);
  for (const auto& l : links) f(l.i, l.j) = std::clamp(1.0 - net.arc(1 + l.i, l.arc).cap, 0.0, 1.0);
  out.c = 0.5 * (f + f.transpose());
  out.objective = out.c.cwiseProduct(weights).sum();
  return out;
}

double lipschitz_extended_score(const ScoreContext& ctx, const SimpleGraph& g) {
  require(ctx.pi.n() == g.n(), "partition and graph sizes differ");
  if (g.max_degree() <= ctx.degree_cap) return score(ctx.b, ctx.pi, g);
  const Matrix lifted = lift_block_model(ctx.b, ctx.pi);
  const double n2 = static_cast<double>(g.n()) * g.n();
  const FractionalSubgraph sub = solve_degree_capped_subgraph(lifted, g, ctx.degree_cap);
  return 2.0 * sub.objective / n2 - lifted.squaredNorm() / n2;
}

PartitionTable::PartitionTable(const SimpleGraph& g, int k, const ExactLimits& limits)
    : graph_(g), n_(g.n()), k_(k), max_degree_(g.max_degree()) {
  require(k >= 1 && k <= n_, "need 1 <= k <= n");
  check_exact_limits(n_, k, limits);
  for_each_equipartition(g.adjacency(), k, [&](const std::vector<int>& assign, const Matrix& e,
                                               const std::vector<int>& sizes) {
    assignments_.push_back(assign);
    block_sums_.push_back(e);
    sizes_.push_back(sizes);
  });
}

double PartitionTable::plain_score(const Matrix& b, std::size_t i) const {
  return score_from_block_sums(b, block_sums_[i], sizes_[i], n_);
}

ScoreMax PartitionTable::max_extended_score(const BlockModel& b, double degree_cap) const {
  require(b.k() == k_, "block model and table disagree on k");
  const std::size_t count = size();
  std::vector<double> plain(count);
  for (std::size_t i = 0; i < count; ++i) plain[i] = plain_score(b.b, i);

  ScoreMax out;
  if (max_degree_ <= degree_cap) {
    const auto best = std::max_element(plain.begin(), plain.end()) - plain.begin();
    out.value = plain[best];
    out.pi = Equipartition(k_, assignments_[best]);
    return out;
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return plain[x] > plain[y]; });
  out.value = -std::numeric_limits<double>::infinity();
  std::size_t best = order.front();
  for (std::size_t idx : order) {
    if (plain[idx] <= out.value) break;
    ScoreContext ctx;
    ctx.b = b;
    ctx.pi = Equipartition(k_, assignments_[idx]);
    ctx.degree_cap = degree_cap;
    const double v = lipschitz_extended_score(ctx, graph_);
    if (v > out.value) {
      out.value = v;
      best = idx;
    }
  }
  out.pi = Equipartition(k_, assignments_[best]);
  return out;
}

ScoreMax max_extended_score(const BlockModel& b, double degree_cap, double mu, const SimpleGraph& g,
                            const ExtendedScoreOptions& options) {
  require(degree_cap >= 0.0 && mu >= 0.0, "caps must be nonnegative");
  require(b.b.maxCoeff() <= mu + 1e-12, "block model entries exceed mu");
  if (options.mode == SearchMode::exact)
    return PartitionTable(g, b.k(), options.limits).max_extended_score(b, degree_cap);

  require(options.restarts >= 1, "restarts must be at least 1");
  require(b.k() <= g.n(), "need k <= n");
  const Matrix a = g.adjacency();
  ScoreMax out;
  out.value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    auto assign = random_equipartition(g.n(), b.k(), rng).assignment();
    swap_local_search(a, b.b, assign);
    ScoreContext ctx(b, Equipartition(b.k(), std::move(assign)), degree_cap, mu);
    const double v = lipschitz_extended_score(ctx, g);
    if (v > out.value) {
      out.value = v;
      out.pi = ctx.pi;
    }
  }
  return out;
}

}  // namespace privgraphon
