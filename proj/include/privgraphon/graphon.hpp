#pragma once

#include <cstdint>

#include "privgraphon/types.hpp"

namespace privgraphon {

/// ∫W over [0,1]^2: exact for step graphons, adaptive quadrature otherwise.
double graphon_integral(const Graphon& w);

/// n i.i.d. Uniform[0,1] positions, reproducible from `seed`.
LatentSample sample_latents(int n, std::uint64_t seed);

/// Q = rho * H_n(W) with zero diagonal. Rejects rho * sup|W| > 1.
EdgeProbabilityMatrix edge_probability_matrix(const Graphon& w, const LatentSample& latents,
                                              double rho);

/// H_n(W): the n x n matrix W(x_i, x_j), diagonal included.
Matrix latent_matrix(const Graphon& w, const LatentSample& latents);

/// A ~ Bern_0(Q): each pair i<j present independently with probability q_ij.
SimpleGraph sample_graph(const EdgeProbabilityMatrix& q, std::uint64_t seed);

/// (B_pi)_{xy} = B_{pi(x) pi(y)}; the diagonal is not zeroed.
Matrix lift_block_model(const BlockModel& b, const Equipartition& pi);

/// Entry (s,t) is the mean of a over pi^{-1}(s) x pi^{-1}(t), diagonal included.
template <class Derived>
BlockModel average_matrix_over_partition(const Eigen::MatrixBase<Derived>& a,
                                         const Equipartition& pi,
                                         Scale scale = Scale::probability) {
  require(a.rows() == a.cols() && a.rows() == pi.n(), "matrix and partition sizes differ");
  const int k = pi.k();
  Matrix sums = Matrix::Zero(k, k);
  for (Eigen::Index y = 0; y < a.cols(); ++y)
    for (Eigen::Index x = 0; x < a.rows(); ++x)
      sums(pi[static_cast<int>(x)], pi[static_cast<int>(y)]) += a(x, y);
  const auto sizes = pi.class_sizes();
  for (int t = 0; t < k; ++t)
    for (int s = 0; s < k; ++s)
      sums(s, t) /= static_cast<double>(sizes[s]) * static_cast<double>(sizes[t]);
  return BlockModel(std::move(sums), scale);
}

/// W/P_k: k^2 ∫_{Y_i x Y_j} W over the uniform k-grid (graphon scale).
BlockModel average_graphon_over_uniform_partition(const Graphon& w, int k);

/// W(x,y) = ((alpha+1)/2)(x^alpha + y^alpha): normalized, sup = alpha+1,
/// Hölder constant (alpha+1)/2 per coordinate.
Graphon holder_example_graphon(double alpha);

}  // namespace privgraphon
