#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace privgraphon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when an input violates an operation's precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an exhaustive computation would exceed its configured size limit.
class LimitExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

// ---------------------------------------------------------------------------
// Graphons
// ---------------------------------------------------------------------------

/// Symmetric step function on [0,1]^2. Cell (i,j) is
/// [b_i, b_{i+1}) x [b_j, b_{j+1}); the last interval is closed.
/// Not required to be normalized: estimates rescaled by a density are step
/// functions too.
struct StepGraphon {
  Matrix values;
  std::vector<double> boundaries;

  StepGraphon() = default;
  StepGraphon(Matrix values, std::vector<double> boundaries);

  /// Uniform k-grid step function with the given values.
  static StepGraphon uniform(const Matrix& values);

  int blocks() const { return static_cast<int>(values.rows()); }
  std::vector<double> measures() const;
  int block_of(double x) const;
  double operator()(double x, double y) const;
  double integral() const;
  double sup_norm() const { return values.size() ? values.maxCoeff() : 0.0; }
};

struct HolderGraphon {
  double alpha = 1.0;
  double holder_constant = 1.0;
  double sup_norm = 1.0;
  std::function<double(double, double)> evaluator;
  /// Optional tag used for serialization ("holder_example" for the built-in family).
  std::string family;
};

/// Ground-truth model: a normalized (∫W = 1), symmetric, bounded function on [0,1]^2.
class Graphon {
 public:
  explicit Graphon(StepGraphon step);
  explicit Graphon(HolderGraphon holder);

  bool is_step() const { return std::holds_alternative<StepGraphon>(repr_); }
  const StepGraphon& step() const;
  const HolderGraphon& holder() const;

  double operator()(double x, double y) const;
  double sup_norm() const;

 private:
  std::variant<StepGraphon, HolderGraphon> repr_;
};

// ---------------------------------------------------------------------------
// Samples and graphs
// ---------------------------------------------------------------------------

struct LatentSample {
  std::vector<double> positions;  // generation order
  std::uint64_t seed = 0;
  int n() const { return static_cast<int>(positions.size()); }
};

struct EdgeProbabilityMatrix {
  Matrix q;
  double rho = 0.0;
  int n() const { return static_cast<int>(q.rows()); }
};

/// Unweighted simple graph on {0, ..., n-1}.
class SimpleGraph {
 public:
  SimpleGraph() = default;
  explicit SimpleGraph(int n);
  SimpleGraph(int n, const std::vector<std::pair<int, int>>& edges);

  int n() const { return n_; }
  std::size_t num_edges() const { return num_edges_; }
  bool has_edge(int i, int j) const;
  /// Returns false if the edge already existed.
  bool add_edge(int i, int j);
  bool remove_edge(int i, int j);
  /// Removes every edge incident to v (node-neighbor on the same vertex set).
  SimpleGraph isolate_vertex(int v) const;

  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  int max_degree() const;
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  /// Sorted list of pairs (i, j) with i < j.
  std::vector<std::pair<int, int>> edges() const;
  /// |E| / C(n,2); zero for n < 2.
  double density() const;
  Matrix adjacency() const;

  friend bool operator==(const SimpleGraph& a, const SimpleGraph& b);

 private:
  int n_ = 0;
  std::size_t num_edges_ = 0;
  std::vector<std::vector<int>> adj_;  // sorted
};

// ---------------------------------------------------------------------------
// Block models and partitions
// ---------------------------------------------------------------------------

enum class Scale { probability, graphon };

struct BlockModel {
  Matrix b;
  Scale scale = Scale::probability;

  BlockModel() = default;
  explicit BlockModel(Matrix b, Scale scale = Scale::probability);
  int k() const { return static_cast<int>(b.rows()); }
};

/// Map [n] -> [k] with every class size within 1 of n/k.
class Equipartition {
 public:
  Equipartition() = default;
  Equipartition(int k, std::vector<int> assignment);

  /// Classes {floor((i-1)n/k)+1, ..., floor(in/k)} in 0-based form.
  static Equipartition standard(int n, int k);

  int n() const { return static_cast<int>(assignment_.size()); }
  int k() const { return k_; }
  int operator[](int x) const { return assignment_[x]; }
  const std::vector<int>& assignment() const { return assignment_; }
  std::vector<int> class_sizes() const;

  /// True if the vector is a valid equipartition into k classes.
  static bool is_equipartition(int k, const std::vector<int>& assignment);

  friend bool operator==(const Equipartition& a, const Equipartition& b) {
    return a.k_ == b.k_ && a.assignment_ == b.assignment_;
  }

 private:
  int k_ = 0;
  std::vector<int> assignment_;
};

}  // namespace privgraphon
