#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "privgraphon/types.hpp"

namespace privgraphon {

/// ||A||_2 = sqrt((1/n^2) sum_{i,j} a_ij^2), diagonal included.
template <class Derived>
double l2_norm_matrix(const Eigen::MatrixBase<Derived>& a) {
  require(a.rows() == a.cols(), "l2_norm_matrix needs a square matrix");
  if (a.rows() == 0) return 0.0;
  return std::sqrt(a.squaredNorm()) / static_cast<double>(a.rows());
}

/// ||A||_1 = (1/n^2) sum_{i,j} |a_ij|.
template <class Derived>
double l1_norm_matrix(const Eigen::MatrixBase<Derived>& a) {
  require(a.rows() == a.cols(), "l1_norm_matrix needs a square matrix");
  if (a.rows() == 0) return 0.0;
  return a.cwiseAbs().sum() / static_cast<double>(a.rows() * a.rows());
}

enum class AlignmentMethod { exact, alternating };

std::string to_string(AlignmentMethod m);

/// Minimizing equipartition for hat-delta_2(B, A).
struct AlignmentResult {
  double distance = 0.0;
  Equipartition pi;
  AlignmentMethod method = AlignmentMethod::exact;
  int restarts_used = 0;
};

/// Size limits for exhaustive searches over equipartitions.
struct ExactLimits {
  int max_n = 12;
  int max_k = 3;
};

/// Checks n and k against the limits; throws LimitExceeded.
void check_exact_limits(int n, int k, const ExactLimits& limits);

/// min over equipartitions pi of ||B_pi - A||_2 by exhaustive enumeration.
/// Ties go to the lexicographically smallest assignment.
AlignmentResult hat_delta2_exact(const BlockModel& b, const Matrix& a, const ExactLimits& limits = {});

/// Upper bound on hat_delta2 from multistart pairwise-swap local search.
/// Restart r draws its starting point from stream (seed, r), so the result is
/// non-increasing in `restarts`.
AlignmentResult hat_delta2_heuristic(const BlockModel& b, const Matrix& a, int restarts,
                                     std::uint64_t seed);

/// ||B_pi - A||_2 for an explicit equipartition.
double alignment_distance(const BlockModel& b, const Matrix& a, const Equipartition& pi);

/// min over all vertex relabelings sigma of ||A^sigma - B||_2 (n <= 8).
double hat_delta2_relabel_exact(const Matrix& a, const Matrix& b);

/// L2 distance between two step functions without any alignment.
double l2_distance_step(const StepGraphon& u, const StepGraphon& w);

struct Delta2Result {
  double distance = 0.0;
  /// True when the minimum over cell arrangements of the common equal-measure
  /// refinement was computed exhaustively.
  bool exact = false;
  int cells = 0;
};

struct Delta2Options {
  int max_cells = 16;
  /// Extra subdivision of each common cell; larger values tighten the bound.
  int refine = 1;
  /// If false, irrational or too-fine boundaries are rejected.
  bool allow_upper_bound = false;
};

/// delta_2(U, W) over measure-preserving rearrangements of the common
/// equal-measure refinement of both step functions.
Delta2Result delta2_step_graphons(const StepGraphon& u, const StepGraphon& w,
                                  const Delta2Options& options = {});

/// ||W - W_{P_k}||_2 for the uniform k-grid P_k.
double eps_k_oracle(const Graphon& w, int k);

struct EpsNResult {
  /// ||W[H^sigma] - W||_2 for the sort-by-position alignment sigma.
  double constructive = 0.0;
  /// Points whose 1/n-interval is not contained in their own block.
  int misaligned = 0;
  /// Minimum over all relabelings (n <= 8 only).
  std::optional<double> exact;
};

/// Sampling error epsilon_n = hat-delta_2(H_n(W), W) for a step graphon.
EpsNResult eps_n_with_latents(const Graphon& w, const LatentSample& latents);

/// ||W_grid - H_sorted||_2 on the n-grid (midpoint evaluation) after sorting the
/// latents; the discretized sampling error used for non-step graphons.
double eps_n_grid(const Graphon& w, const LatentSample& latents);

/// hat-epsilon_k(H) = min_B hat-delta_2(B, H) by enumeration of equipartitions.
double eps_k_hat_exact(const Matrix& h, int k, const ExactLimits& limits = {});

struct OracleErrors {
  double eps_k_oracle = 0.0;
  double eps_n = 0.0;
  double eps_k_hat = 0.0;
};

/// All three oracle error terms for one latent sample (eps_k_hat exact, so n
/// must respect `limits`).
OracleErrors oracle_errors(const Graphon& w, const LatentSample& latents, int k,
                           const ExactLimits& limits = {});

/// (1/n^2) max_{S,T} |sum_{i in S, j in T} m_ij|, exhaustive over S (n <= 22).
double cut_norm_exact(const Matrix& m);

/// min over relabelings sigma of cut_norm_exact(A^sigma - B) (n <= 8).
double hat_cut_distance_exact(const Matrix& a, const Matrix& b);

}  // namespace privgraphon
