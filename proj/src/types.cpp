#include "privgraphon/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "privgraphon/graphon.hpp"

namespace privgraphon {

StepGraphon::StepGraphon(Matrix v, std::vector<double> b)
    : values(std::move(v)), boundaries(std::move(b)) {
  require(values.rows() == values.cols() && values.rows() >= 1, "step values must be square");
  require(boundaries.size() == static_cast<std::size_t>(values.rows()) + 1,
          "step graphon needs k+1 boundaries");
  require(boundaries.front() == 0.0 && boundaries.back() == 1.0,
          "boundaries must start at 0 and end at 1");
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    require(boundaries[i] > boundaries[i - 1], "boundaries must be strictly increasing");
  require((values - values.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
          "step values must be symmetric");
  require(values.minCoeff() >= 0.0, "step values must be nonnegative");
  require(values.allFinite(), "step values must be finite");
}

StepGraphon StepGraphon::uniform(const Matrix& values) {
  const auto k = values.rows();
  std::vector<double> b(static_cast<std::size_t>(k) + 1);
  for (Eigen::Index i = 0; i <= k; ++i) b[i] = static_cast<double>(i) / static_cast<double>(k);
  b.back() = 1.0;
  return StepGraphon(values, std::move(b));
}

std::vector<double> StepGraphon::measures() const {
  std::vector<double> m(boundaries.size() - 1);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = boundaries[i + 1] - boundaries[i];
  return m;
}

int StepGraphon::block_of(double x) const {
  require(x >= 0.0 && x <= 1.0, "graphon argument outside [0,1]");
  auto first = boundaries.begin() + 1;
  auto last = boundaries.end() - 1;
  return static_cast<int>(std::upper_bound(first, last, x) - first);
}

double StepGraphon::operator()(double x, double y) const {
  return values(block_of(x), block_of(y));
}

double StepGraphon::integral() const {
  const auto m = measures();
  const Eigen::Map<const Vector> p(m.data(), static_cast<Eigen::Index>(m.size()));
  return p.dot(values * p);
}

Graphon::Graphon(StepGraphon step) : repr_(std::move(step)) {
  require(std::abs(graphon_integral(*this) - 1.0) <= 1e-9, "graphon must be normalized (integral 1)");
}

Graphon::Graphon(HolderGraphon holder) : repr_(std::move(holder)) {
  const auto& h = std::get<HolderGraphon>(repr_);
  require(h.alpha > 0.0 && h.alpha <= 1.0, "alpha must lie in (0,1]");
  require(static_cast<bool>(h.evaluator), "Hölder graphon needs an evaluator");
  require(h.sup_norm >= 0.0 && h.holder_constant >= 0.0, "Hölder bounds must be nonnegative");
  require(std::abs(graphon_integral(*this) - 1.0) <= 1e-9, "graphon must be normalized (integral 1)");
}

const StepGraphon& Graphon::step() const {
  require(is_step(), "graphon is not a step graphon");
  return std::get<StepGraphon>(repr_);
}

const HolderGraphon& Graphon::holder() const {
  require(!is_step(), "graphon is not a Hölder graphon");
  return std::get<HolderGraphon>(repr_);
}

double Graphon::operator()(double x, double y) const {
  if (const auto* s = std::get_if<StepGraphon>(&repr_)) return (*s)(x, y);
  return std::get<HolderGraphon>(repr_).evaluator(x, y);
}

double Graphon::sup_norm() const {
  if (const auto* s = std::get_if<StepGraphon>(&repr_)) return s->sup_norm();
  return std::get<HolderGraphon>(repr_).sup_norm;
}

// ---------------------------------------------------------------------------

SimpleGraph::SimpleGraph(int n) : n_(n), adj_(static_cast<std::size_t>(std::max(n, 0))) {
  require(n >= 0, "vertex count must be nonnegative");
}

SimpleGraph::SimpleGraph(int n, const std::vector<std::pair<int, int>>& edges) : SimpleGraph(n) {
  for (const auto& [i, j] : edges) {
    require(add_edge(i, j), "duplicate edge");
  }
}

bool SimpleGraph::has_edge(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) return false;
  const auto& a = adj_[i];
  return std::binary_search(a.begin(), a.end(), j);
}

bool SimpleGraph::add_edge(int i, int j) {
  require(i >= 0 && j >= 0 && i < n_ && j < n_, "edge endpoint out of range");
  require(i != j, "self-loops are not allowed");
  auto& a = adj_[i];
  auto it = std::lower_bound(a.begin(), a.end(), j);
  if (it != a.end() && *it == j) return false;
  a.insert(it, j);
  auto& b = adj_[j];
  b.insert(std::lower_bound(b.begin(), b.end(), i), i);
  ++num_edges_;
  return true;
}

bool SimpleGraph::remove_edge(int i, int j) {
  if (!has_edge(i, j)) return false;
  auto& a = adj_[i];
  a.erase(std::lower_bound(a.begin(), a.end(), j));
  auto& b = adj_[j];
  b.erase(std::lower_bound(b.begin(), b.end(), i));
  --num_edges_;
  return true;
}

SimpleGraph SimpleGraph::isolate_vertex(int v) const {
  require(v >= 0 && v < n_, "vertex out of range");
  SimpleGraph out = *this;
  for (int u : adj_[v]) {
    auto& b = out.adj_[u];
    b.erase(std::lower_bound(b.begin(), b.end(), v));
  }
  out.num_edges_ -= adj_[v].size();
  out.adj_[v].clear();
  return out;
}

int SimpleGraph::max_degree() const {
  int d = 0;
  for (const auto& a : adj_) d = std::max(d, static_cast<int>(a.size()));
  return d;
}

std::vector<std::pair<int, int>> SimpleGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(num_edges_);
  for (int i = 0; i < n_; ++i)
    for (int j : adj_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

double SimpleGraph::density() const {
  if (n_ < 2) return 0.0;
  return static_cast<double>(num_edges_) / (0.5 * n_ * (n_ - 1.0));
}

Matrix SimpleGraph::adjacency() const {
  Matrix a = Matrix::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j : adj_[i]) a(i, j) = 1.0;
  return a;
}

bool operator==(const SimpleGraph& a, const SimpleGraph& b) {
  return a.n_ == b.n_ && a.adj_ == b.adj_;
}

// ---------------------------------------------------------------------------

BlockModel::BlockModel(Matrix m, Scale s) : b(std::move(m)), scale(s) {
  require(b.rows() == b.cols() && b.rows() >= 1, "block model must be square and nonempty");
  require((b - b.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "block model must be symmetric");
  require(b.minCoeff() >= 0.0, "block model entries must be nonnegative");
}

Equipartition::Equipartition(int k, std::vector<int> assignment)
    : k_(k), assignment_(std::move(assignment)) {
  require(is_equipartition(k_, assignment_), "assignment is not an equipartition");
}

bool Equipartition::is_equipartition(int k, const std::vector<int>& assignment) {
  const int n = static_cast<int>(assignment.size());
  if (k < 1 || n < k) return false;
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int c : assignment) {
    if (c < 0 || c >= k) return false;
    ++sizes[c];
  }
  const double target = static_cast<double>(n) / k;
  return std::all_of(sizes.begin(), sizes.end(),
                     [&](int s) { return std::abs(s - target) < 1.0; });
}

Equipartition Equipartition::standard(int n, int k) {
  require(k >= 1 && n >= k, "standard equipartition needs 1 <= k <= n");
  std::vector<int> a(static_cast<std::size_t>(n));
  for (int i = 1; i <= k; ++i) {
    const long lo = static_cast<long>(i - 1) * n / k;
    const long hi = static_cast<long>(i) * n / k;
    for (long x = lo; x < hi; ++x) a[x] = i - 1;
  }
  return Equipartition(k, std::move(a));
}

std::vector<int> Equipartition::class_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(k_), 0);
  for (int c : assignment_) ++sizes[c];
  return sizes;
}

}  // namespace privgraphon
