#include "privgraphon/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "privgraphon/cuts.hpp"
#include "privgraphon/estimators.hpp"
#include "privgraphon/graphon.hpp"
#include "privgraphon/harness.hpp"
#include "privgraphon/io.hpp"
#include "privgraphon/metrics.hpp"
#include "privgraphon/rng.hpp"
#include "privgraphon/scoring.hpp"

namespace privgraphon {

namespace {

using nlohmann::json;

struct SampleArgs {
  std::string graphon;
  int n = 0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct FitArgs {
  std::string graph;
  bool is_private = false;
  bool nonprivate = false;
  int k = 2;
  double lambda = 2.0;
  std::optional<double> epsilon;
  std::string mode = "exact";
  std::uint64_t seed = 0;
  long steps = 10000;
  int restarts = 10;
  int max_n = ExactLimits{}.max_n;
  int max_k = ExactLimits{}.max_k;
  std::string out;
};

struct EvalArgs {
  std::string estimate;
  std::string graphon;
};

struct CutsArgs {
  std::string graph;
  std::string estimate;
  std::string compare;
  int q = 2;
  double resolution = 1.0 / 16;
  std::string out;
};

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::string svg;
  std::string x = "n";
  std::string y = "err_delta2_W";
};

struct OracleArgs {
  std::string graph;
  std::string estimate;
  std::string cut_with;
  int k = 0;
  int max_n = ExactLimits{}.max_n;
  int max_k = ExactLimits{}.max_k;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_text_file(path, text);
  }
}

int run_sample(const SampleArgs& a) {
  const Graphon w = io::read_graphon_file(a.graphon);
  require(a.n >= 1, "n must be positive");
  const auto latents = sample_latents(a.n, derive_seed(a.seed, 0));
  const auto q = edge_probability_matrix(w, latents, a.rho);
  const auto g = sample_graph(q, derive_seed(a.seed, 1));
  std::ostringstream text;
  text << "# sampled n=" << a.n << " rho=" << a.rho << " seed=" << a.seed << '\n';
  io::write_graph(text, g);
  emit(a.out, text.str());
  if (!a.out.empty() && a.out != "-")
    std::cout << "wrote " << a.out << " (" << g.n() << " vertices, " << g.num_edges() << " edges)\n";
  return 0;
}

int run_fit(const FitArgs& a) {
  if (a.epsilon) require(*a.epsilon > 0.0, "epsilon must be positive");
  require(!(a.is_private && a.nonprivate), "choose one of --private and --nonprivate");
  const SimpleGraph g = io::read_graph_file(a.graph);
  const FitMode mode = fit_mode_from_string(a.mode);
  FitOptions options;
  options.limits = {a.max_n, a.max_k};
  options.restarts = a.restarts;
  io::EstimateRecord record;
  if (a.is_private) {
    require(a.epsilon.has_value(), "--private needs --epsilon");
    require(mode != FitMode::heuristic, "private mode must be exact or mcmc");
    const auto fit = mode == FitMode::mcmc
                         ? fit_private_mcmc(g, a.k, a.lambda, *a.epsilon, a.steps, a.seed, options)
                         : fit_private_exact(g, a.k, a.lambda, *a.epsilon, a.seed, options);
    record = io::to_record(fit, g.n(), a.seed);
  } else {
    const auto fit = fit_nonprivate(g, a.k, a.lambda, mode, a.seed, options);
    record = io::to_record(fit, g.n(), a.seed);
  }
  emit(a.out, io::estimate_to_json(record));
  return 0;
}

int run_eval(const EvalArgs& a) {
  const auto e = io::read_estimate_file(a.estimate);
  const Graphon w = io::read_graphon_file(a.graphon);
  const double denominator = e.is_private ? clamp_density(e.rho_hat, std::max(e.n, 1)) : e.rho_hat;
  require(denominator > 0.0, "estimate has zero density; errors undefined");
  const StepGraphon fitted = StepGraphon::uniform(e.b_hat / denominator);
  json report;
  report["eps_k_oracle"] = eps_k_oracle(w, e.k);
  if (w.is_step()) {
    Delta2Options options;
    options.max_cells = 256;
    options.allow_upper_bound = true;
    const auto d = delta2_step_graphons(fitted, w.step(), options);
    report["delta2"] = d.distance;
    report["delta2_exact"] = d.exact;
  } else {
    const int fine = e.k * std::max(1, (16 + e.k - 1) / e.k);
    Delta2Options options;
    options.max_cells = 256;
    options.allow_upper_bound = true;
    const StepGraphon coarse = StepGraphon::uniform(average_graphon_over_uniform_partition(w, fine).b);
    report["delta2"] = eps_k_oracle(w, fine) + delta2_step_graphons(fitted, coarse, options).distance;
    report["delta2_exact"] = false;
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

int run_cuts(const CutsArgs& a) {
  require(a.graph.empty() != a.estimate.empty(), "give exactly one of --graph and --estimate");
  QuotientSet set;
  if (!a.graph.empty()) {
    set = all_quotients(io::read_graph_file(a.graph), a.q);
  } else {
    const auto e = io::read_estimate_file(a.estimate);
    std::vector<double> measures(static_cast<std::size_t>(e.k), 1.0 / e.k);
    set = fractional_quotients_of_block_model(BlockModel(e.b_hat), measures, a.q, a.resolution);
  }
  std::ostringstream csv;
  write_quotient_csv(csv, set);
  emit(a.out, csv.str());
  if (!a.compare.empty()) {
    const auto other = all_quotients(io::read_graph_file(a.compare), a.q);
    json report;
    report["hausdorff"] = hausdorff_distance(set, other);
    report["mesh_bound"] = set.mesh_bound;
    std::cerr << report.dump() << '\n';
  }
  return 0;
}

int run_experiment_cmd(const ExperimentArgs& a) {
  ExperimentConfig config = read_experiment_config(a.config);
  const std::string csv_path = a.out.empty() ? config.csv_path : a.out;
  const std::string svg_path = a.svg.empty() ? config.svg_path : a.svg;
  require(!csv_path.empty(), "no CSV output path (use --out or output.csv in the config)");
  const auto records = run_experiment(config);
  const std::string csv = to_csv(records);
  io::write_text_file(csv_path, csv);
  if (!svg_path.empty()) io::write_text_file(svg_path, svg_from_csv(csv, a.x, a.y));
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.status == "ok" ? 0 : 1;
  std::cout << "wrote " << records.size() << " rows to " << csv_path << " (" << failed << " failed)\n";
  return 0;
}

int run_oracle(const OracleArgs& a) {
  const SimpleGraph g = io::read_graph_file(a.graph);
  const ExactLimits limits{a.max_n, a.max_k};
  json report;
  report["n"] = g.n();
  report["density"] = g.density();
  const Matrix adj = g.adjacency();
  if (!a.estimate.empty()) {
    const auto e = io::read_estimate_file(a.estimate);
    const BlockModel b(e.b_hat);
    const auto align = hat_delta2_exact(b, adj, limits);
    report["hat_delta2"] = align.distance;
    report["hat_delta2_pi"] = align.pi.assignment();
    const auto best = max_score_exact(b, g, limits);
    report["max_score"] = best.value;
    if (e.mu > 0.0 && b.b.maxCoeff() <= e.mu + 1e-12) {
      const double d = e.mu * g.n();
      report["max_extended_score"] = max_extended_score(b, d, e.mu, g).value;
      report["degree_cap"] = d;
    }
  }
  if (a.k > 0) report["eps_k_hat"] = eps_k_hat_exact(adj, a.k, limits);
  if (!a.cut_with.empty()) {
    const SimpleGraph other = io::read_graph_file(a.cut_with);
    report["cut_distance"] = hat_cut_distance_exact(adj, other.adjacency());
    report["relabel_l2_distance"] = hat_delta2_relabel_exact(adj, other.adjacency());
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Node-private and nonprivate block-model estimation of graphons"};
  app.require_subcommand(1);

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw a W-random graph");
  sample_cmd->add_option("--graphon", sample.graphon, "Graphon JSON file")->required();
  sample_cmd->add_option("--n", sample.n, "Number of vertices")->required();
  sample_cmd->add_option("--rho", sample.rho, "Target density")->required();
  sample_cmd->add_option("--seed", sample.seed, "Random seed");
  sample_cmd->add_option("--out", sample.out, "Output graph file (stdout if omitted)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a k-block model to a graph");
  fit_cmd->add_option("--graph", fit.graph, "Graph file")->required();
  fit_cmd->add_flag("--private", fit.is_private, "Node-private estimator");
  fit_cmd->add_flag("--nonprivate", fit.nonprivate, "Least-squares estimator (default)");
  fit_cmd->add_option("--k", fit.k, "Number of blocks");
  fit_cmd->add_option("--lambda", fit.lambda, "Entry cap multiplier (>= 1)");
  fit_cmd->add_option("--epsilon", fit.epsilon, "Privacy budget");
  fit_cmd->add_option("--mode", fit.mode, "exact | heuristic | mcmc");
  fit_cmd->add_option("--seed", fit.seed, "Random seed");
  fit_cmd->add_option("--steps", fit.steps, "Chain length for mcmc mode");
  fit_cmd->add_option("--restarts", fit.restarts, "Local-search restarts");
  fit_cmd->add_option("--max-n", fit.max_n, "Largest n for exhaustive search");
  fit_cmd->add_option("--max-k", fit.max_k, "Largest k for exhaustive search");
  fit_cmd->add_option("--out", fit.out, "Output estimate file (stdout if omitted)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Compare an estimate with a graphon");
  eval_cmd->add_option("--estimate", eval.estimate, "Estimate JSON file")->required();
  eval_cmd->add_option("--graphon", eval.graphon, "Graphon JSON file")->required();

  CutsArgs cuts;
  auto* cuts_cmd = app.add_subcommand("cuts", "q-way cuts of a graph or fitted model");
  cuts_cmd->add_option("--graph", cuts.graph, "Graph file");
  cuts_cmd->add_option("--estimate", cuts.estimate, "Estimate JSON file (fractional cuts)");
  cuts_cmd->add_option("--q", cuts.q, "Number of parts");
  cuts_cmd->add_option("--resolution", cuts.resolution, "Fractional grid resolution 1/m");
  cuts_cmd->add_option("--compare", cuts.compare, "Second graph for the Hausdorff distance");
  cuts_cmd->add_option("--out", cuts.out, "Quotient CSV (stdout if omitted)");

  ExperimentArgs experiment;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a configured Monte Carlo experiment");
  experiment_cmd->add_option("--config", experiment.config, "Config JSON file")->required();
  experiment_cmd->add_option("--out", experiment.out, "CSV output path");
  experiment_cmd->add_option("--svg", experiment.svg, "Optional SVG plot path");
  experiment_cmd->add_option("--x", experiment.x, "Plot x column");
  experiment_cmd->add_option("--y", experiment.y, "Plot y column");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive reference computations");
  oracle_cmd->add_option("--graph", oracle.graph, "Graph file")->required();
  oracle_cmd->add_option("--estimate", oracle.estimate, "Estimate to align and score");
  oracle_cmd->add_option("--k", oracle.k, "Report the best k-block error of the adjacency");
  oracle_cmd->add_option("--cut-with", oracle.cut_with, "Second graph for the cut distance (n <= 8)");
  oracle_cmd->add_option("--max-n", oracle.max_n, "Largest n for exhaustive search");
  oracle_cmd->add_option("--max-k", oracle.max_k, "Largest k for exhaustive search");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*sample_cmd) return run_sample(sample);
    if (*fit_cmd) return run_fit(fit);
    if (*eval_cmd) return run_eval(eval);
    if (*cuts_cmd) return run_cuts(cuts);
    if (*experiment_cmd) return run_experiment_cmd(experiment);
    if (*oracle_cmd) return run_oracle(oracle);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const LimitExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace privgraphon
