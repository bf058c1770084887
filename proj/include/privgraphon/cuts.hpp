#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "privgraphon/types.hpp"

namespace privgraphon {

/// Part sizes alpha and normalized cross-densities beta of a q-partition.
struct Quotient {
  int q = 0;
  Vector alpha;
  Matrix beta;
};

enum class QuotientProvenance { integer, fractional_grid };

struct QuotientSet {
  int q = 0;
  std::vector<Quotient> members;
  QuotientProvenance provenance = QuotientProvenance::integer;
  /// 1/m for fractional grids, 0 otherwise.
  double grid_resolution = 0.0;
  /// Every point of the continuum is within this L_inf distance of a member.
  double mesh_bound = 0.0;
  /// Members are stored in canonical form and stand for all their part
  /// relabelings.
  bool relabel_closed = true;
};

/// alpha_i = |V_i|/n, beta_ij = sum_{V_i x V_j} A / sum A (ordered pairs).
Quotient quotient_of_graph(const SimpleGraph& g, const std::vector<int>& partition, int q);

/// The same for a symmetric nonnegative weight matrix (diagonal included).
Quotient quotient_of_weighted(const Matrix& w, const std::vector<int>& partition, int q);

/// Lexicographically smallest of the q! part relabelings (alpha first, then
/// beta row-major).
Quotient canonical_form(const Quotient& x);

/// L_inf distance over the alpha coordinates and beta entries.
double quotient_distance(const Quotient& x, const Quotient& y);

/// All quotients over partitions of [n] into at most q parts, deduplicated.
QuotientSet all_quotients(const SimpleGraph& g, int q);
QuotientSet all_quotients_weighted(const Matrix& w, int q);

/// Fractional quotients of a step graphon with block values b and block
/// measures, with each block's mass split among the q parts on the 1/m grid.
QuotientSet fractional_quotients_of_block_model(const BlockModel& b, const std::vector<double>& block_measures,
                                                int q, double resolution);

/// sup over `from` of the distance to the nearest member of `to`.
double directed_hausdorff(const QuotientSet& from, const QuotientSet& to);

double hausdorff_distance(const QuotientSet& a, const QuotientSet& b);

/// CSV with header q,member_index,alpha_1..alpha_q,beta_11..beta_qq.
void write_quotient_csv(std::ostream& out, const QuotientSet& set);

}  // namespace privgraphon
