#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "privgraphon/metrics.hpp"
#include "privgraphon/scoring.hpp"
#include "privgraphon/types.hpp"

namespace privgraphon {

/// Symmetric k x k matrices whose entries are multiples of 1/n in [0, mu].
/// Candidates are indexed in lexicographic order of their row-major upper
/// triangles.
class CandidateGrid {
 public:
  CandidateGrid(int k, int n, double mu);

  int k() const { return k_; }
  int n() const { return n_; }
  double mu() const { return mu_; }
  /// Number of admissible values per entry: floor(mu n) + 1.
  int levels() const { return levels_; }
  std::vector<double> entry_values() const;
  /// levels^(k(k+1)/2), as a double since it can be astronomically large.
  double count() const;

  BlockModel at(std::uint64_t index) const;
  std::uint64_t index_of(const BlockModel& b) const;
  /// Level (0 .. levels-1) of each upper-triangular entry of candidate `index`.
  std::vector<int> levels_of(std::uint64_t index) const;
  std::uint64_t index_of_levels(const std::vector<int>& levels) const;

 private:
  int k_;
  int n_;
  double mu_;
  int levels_;
};

/// Largest candidate count the exact estimators accept.
inline constexpr double kMaxExactCandidates = 1e6;

/// Laplace(0, scale) by inverse CDF from the stream `seed`.
double laplace_sample(double scale, std::uint64_t seed);

/// rho(G) + Lap(4 / (n epsilon)): epsilon/2-node-private for the total budget
/// epsilon. The raw (possibly negative) value is returned.
double private_density(const SimpleGraph& g, double epsilon, std::uint64_t seed);

/// max(rho_hat, 1/n^2).
double clamp_density(double rho_hat, int n);

enum class FitMode { exact, heuristic, mcmc };

std::string to_string(FitMode mode);
FitMode fit_mode_from_string(const std::string& text);

struct FitOptions {
  ExactLimits limits;
  /// Multistart count for heuristic searches.
  int restarts = 10;
  /// Record per-step chain states and scores (mcmc only).
  bool record_trace = false;
};

struct NonprivateEstimate {
  BlockModel b_hat;
  double rho_g = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
  AlignmentResult alignment;
  FitMode mode = FitMode::exact;
};

/// argmin over the grid (mu = lambda rho(G)) of hat-delta_2(B, A).
NonprivateEstimate fit_nonprivate(const SimpleGraph& g, int k, double lambda, FitMode mode,
                                  std::uint64_t seed, const FitOptions& options = {});

/// Parameters of the exponential-mechanism stage for a given density estimate.
struct Mechanism {
  double rho_hat = 0.0;
  bool clamp_activated = false;
  double lambda = 0.0;
  double epsilon = 0.0;
  double degree_cap = 0.0;
  double mu = 0.0;
  double sensitivity = 0.0;
  /// epsilon / (4 sensitivity)
  double inverse_temperature = 0.0;
  CandidateGrid grid{1, 1, 0.0};
};

Mechanism make_mechanism(int n, int k, double rho_hat, double lambda, double epsilon);

/// Output distribution of the exponential-mechanism stage, in candidate order.
struct ExactDistribution {
  Mechanism mechanism;
  std::vector<double> scores;
  std::vector<double> log_probabilities;
  std::vector<double> probabilities;
};

ExactDistribution exact_output_distribution(const SimpleGraph& g, int k, double rho_hat, double lambda,
                                            double epsilon, const ExactLimits& limits = {});

struct PrivateEstimate {
  double rho_hat = 0.0;
  BlockModel b_hat;
  double epsilon = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double degree_cap = 0.0;
  double sensitivity = 0.0;
  bool clamp_activated = false;
  FitMode mode = FitMode::exact;
  /// False for the Metropolis sampler, whose output law only approximates the
  /// exponential mechanism.
  bool exact_dp = true;
  double candidate_count = 0.0;
  std::uint64_t candidate_index = 0;
  double sampled_score = 0.0;
  /// Normalized log probability of the sampled candidate (exact mode) or its
  /// unnormalized log weight (mcmc mode).
  double sampled_log_weight = 0.0;
  long steps = 0;
  long accepted = 0;
  std::vector<std::uint64_t> state_trace;
  std::vector<double> score_trace;
};

/// Categorical draw over `probabilities` with half-open cumulative intervals.
std::size_t sample_categorical(const std::vector<double>& probabilities, std::uint64_t seed);

/// Density estimate with half the budget, then one exact draw from the
/// exponential mechanism over the full grid.
PrivateEstimate fit_private_exact(const SimpleGraph& g, int k, double lambda, double epsilon,
                                  std::uint64_t seed, const FitOptions& options = {});

/// Metropolis chain over the grid for a fixed density estimate.
PrivateEstimate run_mechanism_chain(const SimpleGraph& g, int k, double rho_hat, double lambda,
                                    double epsilon, long steps, std::uint64_t seed,
                                    const FitOptions& options = {});

/// Density estimate with half the budget, then a Metropolis approximation of
/// the exponential mechanism.
PrivateEstimate fit_private_mcmc(const SimpleGraph& g, int k, double lambda, double epsilon, long steps,
                                 std::uint64_t seed, const FitOptions& options = {});

struct UtilityReport {
  double bound = 0.0;
  double max_score = 0.0;
  double empirical_violation_rate = 0.0;
  double exact_violation_probability = 0.0;
  bool satisfied = false;
};

/// Draws `samples` candidates with probability proportional to
/// exp(epsilon_mech * score / (2 sensitivity)) and checks that the score deficit
/// exceeds (2 sensitivity / epsilon_mech) ln(count / eta) at most an eta fraction of
/// the time.
UtilityReport utility_check_exponential(const std::vector<double>& scores, double sensitivity,
                                        double epsilon_mech, double eta, int samples, std::uint64_t seed);

}  // namespace privgraphon
