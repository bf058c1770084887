#include "privgraphon/graphon.hpp"

#include <algorithm>
#include <cmath>

#include "privgraphon/quadrature.hpp"
#include "privgraphon/rng.hpp"

namespace privgraphon {

namespace {

// Overlap lengths |[i/k,(i+1)/k) ∩ [b_a, b_{a+1})| as a k x K matrix.
Matrix uniform_overlaps(int k, const std::vector<double>& boundaries) {
  const int blocks = static_cast<int>(boundaries.size()) - 1;
  Matrix o = Matrix::Zero(k, blocks);
  for (int i = 0; i < k; ++i) {
    const double lo = static_cast<double>(i) / k;
    const double hi = static_cast<double>(i + 1) / k;
    for (int a = 0; a < blocks; ++a)
      o(i, a) = std::max(0.0, std::min(hi, boundaries[a + 1]) - std::max(lo, boundaries[a]));
  }
  return o;
}

}  // namespace

double graphon_integral(const Graphon& w) {
  if (w.is_step()) return w.step().integral();
  const auto& f = w.holder().evaluator;
  return quadrature::integrate2(f, 0.0, 1.0, 0.0, 1.0, 1e-11);
}

LatentSample sample_latents(int n, std::uint64_t seed) {
  require(n >= 1, "need at least one latent position");
  Rng rng(seed);
  LatentSample out;
  out.seed = seed;
  out.positions.resize(static_cast<std::size_t>(n));
  for (auto& x : out.positions) x = rng.uniform();
  return out;
}

Matrix latent_matrix(const Graphon& w, const LatentSample& latents) {
  const int n = latents.n();
  Matrix h(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      const double v = w(latents.positions[i], latents.positions[j]);
      h(i, j) = v;
      h(j, i) = v;
    }
  return h;
}

EdgeProbabilityMatrix edge_probability_matrix(const Graphon& w, const LatentSample& latents,
                                              double rho) {
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0,1]");
  require(rho * w.sup_norm() <= 1.0 + 1e-12, "rho * sup|W| exceeds 1: probabilities would exceed 1");
  EdgeProbabilityMatrix out;
  out.rho = rho;
  out.q = (rho * latent_matrix(w, latents)).cwiseMin(1.0);
  out.q.diagonal().setZero();
  return out;
}

SimpleGraph sample_graph(const EdgeProbabilityMatrix& q, std::uint64_t seed) {
  const int n = q.n();
  SimpleGraph g(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < q.q(i, j)) g.add_edge(i, j);
  return g;
}

Matrix lift_block_model(const BlockModel& b, const Equipartition& pi) {
  require(b.k() == pi.k(), "block model and partition disagree on k");
  const int n = pi.n();
  Matrix out(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) out(x, y) = b.b(pi[x], pi[y]);
  return out;
}

BlockModel average_graphon_over_uniform_partition(const Graphon& w, int k) {
  require(k >= 1, "k must be positive");
  if (w.is_step()) {
    const auto& s = w.step();
    const Matrix o = uniform_overlaps(k, s.boundaries);
    Matrix b = static_cast<double>(k) * k * (o * s.values * o.transpose());
    b = 0.5 * (b + b.transpose()).eval();
    return BlockModel(std::move(b), Scale::graphon);
  }
  const auto& f = w.holder().evaluator;
  Matrix b(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const double v = quadrature::integrate2(f, static_cast<double>(i) / k,
                                              static_cast<double>(i + 1) / k,
                                              static_cast<double>(j) / k,
                                              static_cast<double>(j + 1) / k, 1e-12) *
                       k * k;
      b(i, j) = v;
      b(j, i) = v;
    }
  return BlockModel(std::move(b), Scale::graphon);
}

Graphon holder_example_graphon(double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0,1]");
  HolderGraphon h;
  h.alpha = alpha;
  h.holder_constant = 0.5 * (alpha + 1.0);
  h.sup_norm = alpha + 1.0;
  h.family = "holder_example";
  const double c = 0.5 * (alpha + 1.0);
  h.evaluator = [alpha, c](double x, double y) { return c * (std::pow(x, alpha) + std::pow(y, alpha)); };
  return Graphon(std::move(h));
}

}  // namespace privgraphon
