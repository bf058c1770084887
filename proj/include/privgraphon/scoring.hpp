#pragma once

#include <cstdint>
#include <vector>

#include "privgraphon/metrics.hpp"
#include "privgraphon/types.hpp"

namespace privgraphon {

/// 4 d mu / n^2.
double score_sensitivity(double degree_cap, double mu, int n);

/// Block model and partition with the degree cap and entry cap they are
/// scored under.
struct ScoreContext {
  BlockModel b;
  Equipartition pi;
  double degree_cap = 0.0;
  double mu = 0.0;
  double sensitivity = 0.0;

  ScoreContext() = default;
  ScoreContext(BlockModel b, Equipartition pi, double degree_cap, double mu);
};

/// Symmetric fractional subgraph c of a graph, 0 <= c <= A, weighted degrees <= d.
struct FractionalSubgraph {
  Matrix c;
  /// sum_{i != j} w_ij c_ij
  double objective = 0.0;
  int n() const { return static_cast<int>(c.rows()); }
};

/// 2 <A, B_pi> - ||B_pi||_2^2.
double score(const BlockModel& b, const Equipartition& pi, const SimpleGraph& g);

/// The same score from block sums e(s,t) = sum_{pi(x)=s, pi(y)=t} A_xy.
double score_from_block_sums(const Matrix& b, const Matrix& block_sums, const std::vector<int>& sizes,
                             int n);

struct ScoreMax {
  double value = 0.0;
  Equipartition pi;
};

/// max over equipartitions of score(b, pi, g); ties go to the lexicographically
/// smallest assignment.
ScoreMax max_score_exact(const BlockModel& b, const SimpleGraph& g, const ExactLimits& limits = {});

/// max sum_{i != j} w_ij c_ij over fractional subgraphs with degree cap d, by
/// successive shortest paths on the bipartite double cover.
FractionalSubgraph solve_degree_capped_subgraph(const Matrix& weights, const SimpleGraph& g, double d);

/// Degree-capped extension of score(b, pi, .) for the context's pi.
double lipschitz_extended_score(const ScoreContext& ctx, const SimpleGraph& g);

enum class SearchMode { exact, heuristic };

struct ExtendedScoreOptions {
  SearchMode mode = SearchMode::exact;
  ExactLimits limits;
  int restarts = 10;
  std::uint64_t seed = 0;
};

/// max over pi of the extended score.
ScoreMax max_extended_score(const BlockModel& b, double degree_cap, double mu, const SimpleGraph& g,
                            const ExtendedScoreOptions& options = {});

/// All equipartitions of a graph's vertex set with their block sums, in
/// lexicographic order. Lets many block models be scored against one graph.
class PartitionTable {
 public:
  PartitionTable(const SimpleGraph& g, int k, const ExactLimits& limits = {});

  std::size_t size() const { return assignments_.size(); }
  int n() const { return n_; }
  int k() const { return k_; }
  const std::vector<int>& assignment(std::size_t i) const { return assignments_[i]; }
  double plain_score(const Matrix& b, std::size_t i) const;

  /// max over pi of the extended score (branch and bound over the plain score).
  ScoreMax max_extended_score(const BlockModel& b, double degree_cap) const;

 private:
  SimpleGraph graph_;
  int n_;
  int k_;
  int max_degree_;
  std::vector<std::vector<int>> assignments_;
  std::vector<Matrix> block_sums_;
  std::vector<std::vector<int>> sizes_;
};

}  // namespace privgraphon
