#include "privgraphon/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>

#include "privgraphon/graphon.hpp"
#include "privgraphon/partition.hpp"
#include "privgraphon/rng.hpp"

namespace privgraphon {

CandidateGrid::CandidateGrid(int k, int n, double mu) : k_(k), n_(n), mu_(mu) {
  require(k >= 1, "k must be positive");
  require(n >= 1, "n must be positive");
  require(mu >= 0.0 && std::isfinite(mu), "mu must be finite and nonnegative");
  levels_ = static_cast<int>(std::floor(mu * n + 1e-9)) + 1;
}

std::vector<double> CandidateGrid::entry_values() const {
  std::vector<double> out(static_cast<std::size_t>(levels_));
  for (int v = 0; v < levels_; ++v) out[v] = static_cast<double>(v) / n_;
  return out;
}

double CandidateGrid::count() const { return std::pow(static_cast<double>(levels_), k_ * (k_ + 1) / 2); }

std::vector<int> CandidateGrid::levels_of(std::uint64_t index) const {
  const int entries = k_ * (k_ + 1) / 2;
  std::vector<int> out(static_cast<std::size_t>(entries));
  for (int e = entries - 1; e >= 0; --e) {
    out[e] = static_cast<int>(index % static_cast<std::uint64_t>(levels_));
    index /= static_cast<std::uint64_t>(levels_);
  }
  require(index == 0, "candidate index out of range");
  return out;
}

std::uint64_t CandidateGrid::index_of_levels(const std::vector<int>& levels) const {
  std::uint64_t index = 0;
  for (int v : levels) {
    require(v >= 0 && v < levels_, "grid level out of range");
    index = index * static_cast<std::uint64_t>(levels_) + static_cast<std::uint64_t>(v);
  }
  return index;
}

BlockModel CandidateGrid::at(std::uint64_t index) const {
  const auto lv = levels_of(index);
  Matrix b(k_, k_);
  int e = 0;
  for (int s = 0; s < k_; ++s)
    for (int t = s; t < k_; ++t, ++e) {
      b(s, t) = static_cast<double>(lv[e]) / n_;
      b(t, s) = b(s, t);
    }
  return BlockModel(std::move(b), Scale::probability);
}

std::uint64_t CandidateGrid::index_of(const BlockModel& b) const {
  require(b.k() == k_, "block model has the wrong k");
  std::vector<int> lv;
  for (int s = 0; s < k_; ++s)
    for (int t = s; t < k_; ++t) {
      const double scaled = b.b(s, t) * n_;
      const long level = std::lround(scaled);
      require(std::abs(scaled - level) <= 1e-9, "entry is not a multiple of 1/n");
      lv.push_back(static_cast<int>(level));
    }
  return index_of_levels(lv);
}

double laplace_sample(double scale, std::uint64_t seed) {
  require(scale > 0.0, "Laplace scale must be positive");
  Rng rng(seed);
  double u = rng.uniform() - 0.5;
  while (u == -0.5) u = rng.uniform() - 0.5;
  const double sign = (u > 0.0) - (u < 0.0);
  return -scale * sign * std::log(1.0 - 2.0 * std::abs(u));
}

double private_density(const SimpleGraph& g, double epsilon, std::uint64_t seed) {
  require(epsilon > 0.0, "epsilon must be positive");
  require(g.n() >= 2, "need at least two vertices");
  return g.density() + laplace_sample(4.0 / (g.n() * epsilon), seed);
}

double clamp_density(double rho_hat, int n) {
  return std::max(rho_hat, 1.0 / (static_cast<double>(n) * n));
}

std::string to_string(FitMode mode) {
  switch (mode) {
    case FitMode::exact: return "exact";
    case FitMode::heuristic: return "heuristic";
    case FitMode::mcmc: return "mcmc";
  }
  return "exact";
}

FitMode fit_mode_from_string(const std::string& text) {
  if (text == "exact") return FitMode::exact;
  if (text == "heuristic") return FitMode::heuristic;
  if (text == "mcmc") return FitMode::mcmc;
  throw ValidationError("unknown mode '" + text + "' (expected exact, heuristic or mcmc)");
}

namespace {

// Nearest grid level to each block average; exact ties go to the lower level.
Matrix round_to_grid(const Matrix& avg, const CandidateGrid& grid) {
  Matrix b(avg.rows(), avg.cols());
  const int n = grid.n();
  for (Eigen::Index t = 0; t < avg.cols(); ++t)
    for (Eigen::Index s = 0; s <= t; ++s) {
      const double scaled = 0.5 * (avg(s, t) + avg(t, s)) * n;
      double level = std::floor(scaled);
      if (scaled - level > 0.5) level += 1.0;
      level = std::clamp(level, 0.0, static_cast<double>(grid.levels() - 1));
      b(s, t) = level / n;
      b(t, s) = b(s, t);
    }
  return b;
}

Matrix block_average(const Matrix& sums, const std::vector<int>& sizes) {
  Matrix avg(sums.rows(), sums.cols());
  for (Eigen::Index t = 0; t < sums.cols(); ++t)
    for (Eigen::Index s = 0; s < sums.rows(); ++s) avg(s, t) = sums(s, t) / (double(sizes[s]) * sizes[t]);
  return avg;
}

// n^2 * ||B_pi - A||^2 from block sums.
double residual_from_sums(double a_sq, const Matrix& b, const Matrix& sums, const std::vector<int>& sizes) {
  double value = a_sq;
  for (Eigen::Index t = 0; t < b.cols(); ++t)
    for (Eigen::Index s = 0; s < b.rows(); ++s)
      value += b(s, t) * (b(s, t) * sizes[s] * sizes[t] - 2.0 * sums(s, t));
  return value;
}

}  // namespace

NonprivateEstimate fit_nonprivate(const SimpleGraph& g, int k, double lambda, FitMode mode,
                                  std::uint64_t seed, const FitOptions& options) {
  const int n = g.n();
  require(lambda >= 1.0, "lambda must be at least 1");
  require(k >= 1 && k <= n, "need 1 <= k <= n");
  require(mode != FitMode::mcmc, "mcmc mode applies to the private estimator only");
  NonprivateEstimate out;
  out.rho_g = g.density();
  out.mu = lambda * out.rho_g;
  out.lambda = lambda;
  out.mode = mode;
  const CandidateGrid grid(k, n, out.mu);
  const Matrix a = g.adjacency();
  const double a_sq = a.squaredNorm();

  if (mode == FitMode::exact) {
    if (grid.count() > kMaxExactCandidates)
      throw LimitExceeded("candidate grid too large for exact mode; use heuristic");
    check_exact_limits(n, k, options.limits);
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_index = 0;
    std::vector<int> best_assign;
    const double tol = 1e-9;
    for_each_equipartition(a, k, [&](const std::vector<int>& assign, const Matrix& sums,
                                     const std::vector<int>& sizes) {
      BlockModel b(round_to_grid(block_average(sums, sizes), grid));
      const double value = residual_from_sums(a_sq, b.b, sums, sizes);
      if (value < best - tol) {
        best = value;
        best_index = grid.index_of(b);
        best_assign = assign;
      } else if (value <= best + tol) {
        const std::uint64_t index = grid.index_of(b);
        if (index < best_index) {
          best_index = index;
          best_assign = assign;
        }
      }
    });
    out.b_hat = grid.at(best_index);
    out.alignment.pi = Equipartition(k, std::move(best_assign));
    out.alignment.distance = alignment_distance(out.b_hat, a, out.alignment.pi);
    out.alignment.method = AlignmentMethod::exact;
    return out;
  }

  require(options.restarts >= 1, "restarts must be at least 1");
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    auto assign = random_equipartition(n, k, rng).assignment();
    Matrix b;
    for (int iter = 0; iter < 100; ++iter) {
      const Equipartition pi(k, assign);
      b = round_to_grid(average_matrix_over_partition(a, pi).b, grid);
      if (swap_local_search(a, b, assign) == 0) break;
    }
    BlockModel model(b);
    Equipartition pi(k, std::move(assign));
    const double d = alignment_distance(model, a, pi);
    if (d < best) {
      best = d;
      out.b_hat = std::move(model);
      out.alignment.pi = std::move(pi);
    }
  }
  out.alignment.distance = best;
  out.alignment.method = AlignmentMethod::alternating;
  out.alignment.restarts_used = options.restarts;
  return out;
}

Mechanism make_mechanism(int n, int k, double rho_hat, double lambda, double epsilon) {
  require(epsilon > 0.0, "epsilon must be positive");
  require(lambda >= 1.0, "lambda must be at least 1");
  require(std::isfinite(rho_hat), "density estimate must be finite");
  Mechanism m;
  m.rho_hat = rho_hat;
  const double clamped = clamp_density(rho_hat, n);
  m.clamp_activated = clamped != rho_hat;
  m.lambda = lambda;
  m.epsilon = epsilon;
  m.degree_cap = lambda * clamped * n;
  m.mu = lambda * clamped;
  m.sensitivity = score_sensitivity(m.degree_cap, m.mu, n);
  m.inverse_temperature = epsilon / (4.0 * m.sensitivity);
  m.grid = CandidateGrid(k, n, m.mu);
  return m;
}

namespace {

std::vector<double> normalized_log(const std::vector<double>& log_weights) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - top);
  const double lse = top + std::log(total);
  std::vector<double> out(log_weights.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = log_weights[i] - lse;
  return out;
}

}  // namespace

ExactDistribution exact_output_distribution(const SimpleGraph& g, int k, double rho_hat, double lambda,
                                            double epsilon, const ExactLimits& limits) {
  ExactDistribution out;
  out.mechanism = make_mechanism(g.n(), k, rho_hat, lambda, epsilon);
  const auto& grid = out.mechanism.grid;
  if (grid.count() > kMaxExactCandidates)
    throw LimitExceeded("candidate grid too large for exact mode; use mcmc");
  const PartitionTable table(g, k, limits);
  const auto count = static_cast<std::uint64_t>(grid.count());
  out.scores.resize(count);
  std::vector<double> log_weights(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    out.scores[i] = table.max_extended_score(grid.at(i), out.mechanism.degree_cap).value;
    log_weights[i] = out.mechanism.inverse_temperature * out.scores[i];
  }
  out.log_probabilities = normalized_log(log_weights);
  out.probabilities.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) out.probabilities[i] = std::exp(out.log_probabilities[i]);
  return out;
}

std::size_t sample_categorical(const std::vector<double>& probabilities, std::uint64_t seed) {
  require(!probabilities.empty(), "no categories to sample from");
  Rng rng(seed);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  for (std::size_t i = probabilities.size(); i-- > 0;)
    if (probabilities[i] > 0.0) return i;
  return probabilities.size() - 1;
}

namespace {

void fill_from_mechanism(PrivateEstimate& out, const Mechanism& m) {
  out.rho_hat = m.rho_hat;
  out.epsilon = m.epsilon;
  out.lambda = m.lambda;
  out.mu = m.mu;
  out.degree_cap = m.degree_cap;
  out.sensitivity = m.sensitivity;
  out.clamp_activated = m.clamp_activated;
  out.candidate_count = m.grid.count();
}

}  // namespace

PrivateEstimate fit_private_exact(const SimpleGraph& g, int k, double lambda, double epsilon,
                                  std::uint64_t seed, const FitOptions& options) {
  require(epsilon > 0.0, "epsilon must be positive");
  const double rho_hat = private_density(g, epsilon, derive_seed(seed, 0));
  const ExactDistribution dist = exact_output_distribution(g, k, rho_hat, lambda, epsilon, options.limits);
  const std::size_t pick = sample_categorical(dist.probabilities, derive_seed(seed, 1));
  PrivateEstimate out;
  fill_from_mechanism(out, dist.mechanism);
  out.mode = FitMode::exact;
  out.exact_dp = true;
  out.candidate_index = pick;
  out.b_hat = dist.mechanism.grid.at(pick);
  out.sampled_score = dist.scores[pick];
  out.sampled_log_weight = dist.log_probabilities[pick];
  return out;
}

PrivateEstimate run_mechanism_chain(const SimpleGraph& g, int k, double rho_hat, double lambda,
                                    double epsilon, long steps, std::uint64_t seed,
                                    const FitOptions& options) {
  require(steps >= 1, "steps must be at least 1");
  const Mechanism m = make_mechanism(g.n(), k, rho_hat, lambda, epsilon);
  const auto& grid = m.grid;
  const bool exact_inner = g.n() <= options.limits.max_n && k <= options.limits.max_k && k <= g.n();
  std::optional<PartitionTable> table;
  if (exact_inner) table.emplace(g, k, options.limits);
  ExtendedScoreOptions heuristic;
  heuristic.mode = SearchMode::heuristic;
  heuristic.restarts = options.restarts;
  heuristic.seed = derive_seed(seed, 2);

  std::unordered_map<std::uint64_t, double> cache;
  auto score_of = [&](std::uint64_t index) {
    auto it = cache.find(index);
    if (it != cache.end()) return it->second;
    const BlockModel b = grid.at(index);
    const double v = exact_inner ? table->max_extended_score(b, m.degree_cap).value
                                 : max_extended_score(b, m.degree_cap, m.mu, g, heuristic).value;
    cache.emplace(index, v);
    return v;
  };

  PrivateEstimate out;
  fill_from_mechanism(out, m);
  out.mode = FitMode::mcmc;
  out.exact_dp = false;
  out.steps = steps;
  Rng rng(derive_seed(seed, 3));
  std::vector<int> state(static_cast<std::size_t>(k * (k + 1) / 2), 0);
  std::uint64_t index = 0;
  double current = score_of(index);
  const int top = grid.levels() - 1;
  for (long step = 0; step < steps; ++step) {
    const auto entry = static_cast<std::size_t>(rng.below(state.size()));
    const int move = rng.bernoulli(0.5) ? 1 : -1;
    const double u = rng.uniform();
    const int next_level = state[entry] + move;
    if (next_level >= 0 && next_level <= top) {
      state[entry] = next_level;
      const std::uint64_t proposal = grid.index_of_levels(state);
      const double proposed = score_of(proposal);
      const double log_ratio = m.inverse_temperature * (proposed - current);
      if (log_ratio >= 0.0 || u < std::exp(log_ratio)) {
        index = proposal;
        current = proposed;
        ++out.accepted;
      } else {
        state[entry] -= move;
      }
    }
    if (options.record_trace) {
      out.state_trace.push_back(index);
      out.score_trace.push_back(current);
    }
  }
  out.candidate_index = index;
  out.b_hat = grid.at(index);
  out.sampled_score = current;
  out.sampled_log_weight = m.inverse_temperature * current;
  return out;
}

PrivateEstimate fit_private_mcmc(const SimpleGraph& g, int k, double lambda, double epsilon, long steps,
                                 std::uint64_t seed, const FitOptions& options) {
  require(epsilon > 0.0, "epsilon must be positive");
  const double rho_hat = private_density(g, epsilon, derive_seed(seed, 0));
  return run_mechanism_chain(g, k, rho_hat, lambda, epsilon, steps, seed, options);
}

UtilityReport utility_check_exponential(const std::vector<double>& scores, double sensitivity,
                                        double epsilon_mech, double eta, int samples, std::uint64_t seed) {
  require(!scores.empty(), "no candidates");
  require(sensitivity > 0.0 && epsilon_mech > 0.0, "sensitivity and epsilon must be positive");
  require(eta > 0.0 && eta < 1.0, "eta must lie in (0,1)");
  require(samples >= 1, "samples must be positive");
  UtilityReport out;
  out.max_score = *std::max_element(scores.begin(), scores.end());
  out.bound = 2.0 * sensitivity / epsilon_mech * std::log(static_cast<double>(scores.size()) / eta);
  std::vector<double> log_weights(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) log_weights[i] = epsilon_mech * scores[i] / (2.0 * sensitivity);
  const auto log_p = normalized_log(log_weights);
  std::vector<double> p(scores.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_p[i]);
    if (out.max_score - scores[i] > out.bound) out.exact_violation_probability += p[i];
  }
  int violations = 0;
  for (int s = 0; s < samples; ++s) {
    const std::size_t pick = sample_categorical(p, derive_seed(seed, static_cast<std::uint64_t>(s)));
    if (out.max_score - scores[pick] > out.bound) ++violations;
  }
  out.empirical_violation_rate = static_cast<double>(violations) / samples;
  out.satisfied = out.empirical_violation_rate <= eta;
  return out;
}

}  // namespace privgraphon
