#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "privgraphon/estimators.hpp"
#include "privgraphon/metrics.hpp"
#include "privgraphon/types.hpp"

namespace privgraphon {

/// Target density as a function of n: either a constant or c log(n) / n.
struct RhoRule {
  enum class Kind { constant, log_over_n } kind = Kind::constant;
  double value = 0.5;
  double operator()(int n) const;
};

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  Graphon graphon;
  std::vector<int> n_list;
  int k_true = 0;
  int k_fit = 2;
  RhoRule rho_rule;
  /// Privacy budgets for the private estimator; empty means nonprivate only.
  std::vector<double> epsilon_list;
  double lambda = 2.0;
  int trials = 1;
  std::uint64_t master_seed = 0;
  bool run_nonprivate = true;
  bool run_private = true;
  FitMode nonprivate_mode = FitMode::heuristic;
  FitMode private_mode = FitMode::exact;
  long mcmc_steps = 2000;
  int restarts = 10;
  ExactLimits limits;
  bool record_runtime = false;
  std::string csv_path;
  std::string svg_path;

  ExperimentConfig();
  /// Throws ValidationError describing the first problem found.
  void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig read_experiment_config(const std::string& path);

struct TrialRecord {
  std::string experiment_id;
  int trial = 0;
  int n = 0;
  int k_fit = 0;
  double rho = 0.0;
  /// 0 for nonprivate rows.
  double epsilon = 0.0;
  double lambda = 0.0;
  /// rho(G) for nonprivate rows.
  double rho_hat = 0.0;
  double err_delta2_W = 0.0;
  double err_hatdelta2_Q = 0.0;
  double eps_n = 0.0;
  double eps_k_oracle = 0.0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  std::string mode;
  std::string alignment;
  std::string status = "ok";
  std::string reason;
};

/// Column names in TrialRecord field order.
const std::vector<std::string>& trial_record_header();

/// Value of a numeric column by name.
double record_field(const TrialRecord& r, const std::string& field);

/// Seed of trial `trial` at size n; shared by every estimator and budget.
std::uint64_t trial_seed(std::uint64_t master_seed, int n, int trial);

/// One graph draw at size n and every configured estimator row for it
/// (nonprivate first, then one row per epsilon). Module errors become failed
/// rows carrying the message as reason.
std::vector<TrialRecord> run_trial(const ExperimentConfig& config, int n, int trial);

/// All sizes and trials in (n, trial) order.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::string to_csv(const std::vector<TrialRecord>& records);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> x;
  std::vector<double> median_y;
  std::vector<int> successes;
};

/// Least squares of log(median y) on log(x), medians over successful rows per x.
RateFit rate_fit(const std::vector<TrialRecord>& records, const std::string& x_field, const std::string& y_field);

/// Same fit on plain (x, y) pairs.
RateFit rate_fit_points(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> values);

/// Log-log line plot of median y per x, one line per (mode, epsilon) series,
/// built from CSV text alone.
std::string svg_from_csv(const std::string& csv_text, const std::string& x_field, const std::string& y_field);

}  // namespace privgraphon
