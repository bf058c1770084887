#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "privgraphon/cli.hpp"
#include "privgraphon/estimators.hpp"
#include "privgraphon/graphon.hpp"
#include "privgraphon/harness.hpp"
#include "privgraphon/io.hpp"
#include "test_support.hpp"

using namespace privgraphon;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

const std::string kConfigDir = PRIVGRAPHON_CONFIG_DIR;

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "privgraphon");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream sink;
  auto* previous_out = std::cout.rdbuf(sink.rdbuf());
  auto* previous_err = std::cerr.rdbuf(sink.rdbuf());
  const int code = cli_main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(previous_out);
  std::cerr.rdbuf(previous_err);
  return code;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("privgraphon_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.experiment_id = "small";
  c.n_list = {6, 8};
  c.k_fit = 2;
  c.rho_rule.value = 0.5;
  c.epsilon_list = {1.0, 4.0};
  c.lambda = 2.0;
  c.trials = 2;
  c.master_seed = 11;
  c.nonprivate_mode = FitMode::exact;
  c.private_mode = FitMode::exact;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.rho_rule.value = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config();
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config();
  c.n_list = {1};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config();
  c.rho_rule.value = 0.9;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config();
  c.epsilon_list = {1.0, 0.0};
  CHECK_THROWS_AS(c.validate(), ValidationError);

  RhoRule rule{RhoRule::Kind::log_over_n, 2.0};
  CHECK(rule(100) == doctest::Approx(2.0 * std::log(100.0) / 100.0));

  CHECK_THROWS_AS(parse_experiment_config("{"), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"n_list": [8]})"), ValidationError);
  const auto parsed = read_experiment_config(kConfigDir + "/kblock.json");
  CHECK(parsed.experiment_id == "kblock");
  CHECK(parsed.n_list == std::vector<int>{8, 16, 32, 64});
  CHECK(parsed.private_mode == FitMode::mcmc);
  CHECK(parsed.graphon.is_step());
}

TEST_CASE("trial rows follow the seed derivation") {
  const ExperimentConfig c = small_config();
  const auto rows = run_trial(c, 8, 1);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mode == "nonprivate-exact");
  CHECK(rows[1].mode == "private-exact");
  CHECK(rows[1].epsilon == 1.0);
  CHECK(rows[2].epsilon == 4.0);
  const std::uint64_t ts = trial_seed(11, 8, 1);
  CHECK(ts == derive_seed(derive_seed(11, 8), 1));
  for (const auto& r : rows) {
    CHECK(r.status == "ok");
    CHECK(r.seed == ts);
    CHECK(r.alignment == "exact");
    CHECK(r.err_delta2_W >= 0.0);
    CHECK(r.err_hatdelta2_Q >= 0.0);
    CHECK(std::isfinite(r.err_delta2_W));
  }

  const auto latents = sample_latents(8, derive_seed(ts, 0));
  const SimpleGraph g = sample_graph(edge_probability_matrix(c.graphon, latents, 0.5), derive_seed(ts, 1));
  const auto fit = fit_nonprivate(g, 2, 2.0, FitMode::exact, derive_seed(ts, 2));
  const Matrix h = latent_matrix(c.graphon, latents);
  CHECK(rows[0].rho_hat == doctest::Approx(g.density()));
  CHECK(rows[0].eps_n == doctest::Approx(eps_n_with_latents(c.graphon, latents).constructive));
  CHECK(rows[0].err_hatdelta2_Q ==
        doctest::Approx(hat_delta2_exact(BlockModel(fit.b_hat.b / g.density(), Scale::graphon), h).distance));
  Delta2Options options;
  options.max_cells = 256;
  CHECK(rows[0].err_delta2_W ==
        doctest::Approx(delta2_step_graphons(StepGraphon::uniform(fit.b_hat.b / g.density()), c.graphon.step(), options)
                            .distance));

  const auto priv = fit_private_exact(g, 2, 2.0, 4.0, derive_seed(ts, 4));
  CHECK(rows[2].rho_hat == doctest::Approx(priv.rho_hat));
}

TEST_CASE("planted bipartite draw: the fit has zero residual") {
  Matrix v(2, 2);
  v << 0.0, 2.0, 2.0, 0.0;
  ExperimentConfig c = small_config();
  c.graphon = Graphon(StepGraphon(v, {0.0, 0.5, 1.0}));
  c.n_list = {8};
  c.run_private = false;
  c.epsilon_list.clear();
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 3; ++trial) {
    const std::uint64_t ts = trial_seed(c.master_seed, 8, trial);
    const auto latents = sample_latents(8, derive_seed(ts, 0));
    int left = 0;
    for (double x : latents.positions) left += x < 0.5;
    if (left != 4) continue;
    ++checked;
    const SimpleGraph g = sample_graph(edge_probability_matrix(c.graphon, latents, 0.5), derive_seed(ts, 1));
    CHECK(g.num_edges() == 16);
    const auto fit = fit_nonprivate(g, 2, 2.0, FitMode::exact, derive_seed(ts, 2));
    CHECK(fit.alignment.distance == 0.0);
    const auto rows = run_trial(c, 8, trial);
    REQUIRE(rows.size() == 1);
    const Matrix h = latent_matrix(c.graphon, latents);
    CHECK(rows[0].err_hatdelta2_Q ==
          doctest::Approx(hat_delta2_exact(BlockModel(fit.b_hat.b / g.density(), Scale::graphon), h).distance));
  }
  CHECK(checked == 3);
}

TEST_CASE("experiment output is deterministic and has the fixed header") {
  const ExperimentConfig c = small_config();
  const auto first = to_csv(run_experiment(c));
  const auto second = to_csv(run_experiment(c));
  CHECK(first == second);
  const std::string header =
      "experiment_id,trial,n,k_fit,rho,epsilon,lambda,rho_hat,err_delta2_W,err_hatdelta2_Q,eps_n,eps_k_oracle,"
      "runtime_ms,seed,mode,alignment,status,reason";
  CHECK(first.substr(0, first.find('\n')) == header);
  std::string joined;
  for (const auto& name : trial_record_header()) joined += (joined.empty() ? "" : ",") + name;
  CHECK(joined == header);
  CHECK(std::count(first.begin(), first.end(), '\n') == 1 + 2 * 2 * 3);

  ExperimentConfig other = c;
  other.master_seed = 12;
  CHECK(to_csv(run_experiment(other)) != first);
}

TEST_CASE("failed rows are kept with a reason") {
  ExperimentConfig c = small_config();
  c.n_list = {14};
  c.nonprivate_mode = FitMode::exact;
  c.run_private = false;
  const auto rows = run_trial(c, 14, 0);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "failed");
  CHECK_FALSE(rows[0].reason.empty());
  CHECK(rows[0].reason.find(',') == std::string::npos);
  CHECK(rows[0].err_delta2_W == 0.0);
}

TEST_CASE("Hölder graphons run through the harness") {
  ExperimentConfig c = small_config();
  c.graphon = holder_example_graphon(0.5);
  c.rho_rule.value = 0.3;
  c.n_list = {8};
  c.trials = 1;
  const auto rows = run_trial(c, 8, 0);
  for (const auto& r : rows) {
    CHECK(r.status == "ok");
    CHECK(r.eps_k_oracle > 0.0);
    CHECK(r.err_delta2_W > 0.0);
  }
}

TEST_CASE("rate fit") {
  const std::vector<double> x = {10, 20, 40, 80};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v);
  const auto linear = rate_fit_points(x, y);
  CHECK(linear.slope == doctest::Approx(1.0));
  CHECK(linear.r_squared == doctest::Approx(1.0));
  CHECK(linear.intercept == doctest::Approx(std::log(3.0)));

  y.clear();
  for (double v : x) y.push_back(0.7 * std::pow(v, -0.25));
  CHECK(std::abs(rate_fit_points(x, y).slope + 0.25) <= 1e-9);

  CHECK_THROWS_AS(rate_fit_points({1, 1, 2}, {1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(rate_fit_points({1, 2}, {1, 2}), ValidationError);

  std::vector<TrialRecord> records;
  for (int n : {16, 32, 64})
    for (int t = 0; t < 3; ++t) {
      TrialRecord r;
      r.n = n;
      r.err_delta2_W = std::pow(n, -0.5) * (t == 1 ? 1.0 : (t == 0 ? 0.5 : 4.0));
      records.push_back(r);
    }
  TrialRecord failed;
  failed.n = 128;
  failed.status = "failed";
  records.push_back(failed);
  const auto fit = rate_fit(records, "n", "err_delta2_W");
  CHECK(fit.slope == doctest::Approx(-0.5));
  CHECK(fit.successes == std::vector<int>{3, 3, 3});
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("SVG is derived from the CSV") {
  const auto csv = to_csv(run_experiment(small_config()));
  const auto svg = svg_from_csv(csv, "n", "err_hatdelta2_Q");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("nonprivate-exact") != std::string::npos);
  CHECK(svg == svg_from_csv(csv, "n", "err_hatdelta2_Q"));
  CHECK_THROWS_AS(svg_from_csv(csv, "n", "nonexistent"), ValidationError);
}

TEST_CASE("CLI round trip") {
  const fs::path dir = scratch_dir("roundtrip");
  const std::string graph = (dir / "g.txt").string();
  const std::string est = (dir / "e.json").string();
  const std::string priv = (dir / "p.json").string();
  const std::string graphon = kConfigDir + "/two_block.json";
  CHECK(run_cli({"sample", "--graphon", graphon, "--n", "10", "--rho", "0.5", "--seed", "3", "--out", graph}) == 0);
  const SimpleGraph g = io::read_graph_file(graph);
  CHECK(g.n() == 10);
  const auto latents = sample_latents(10, derive_seed(3, 0));
  CHECK(g == sample_graph(edge_probability_matrix(two_block_fixture(), latents, 0.5), derive_seed(3, 1)));

  CHECK(run_cli({"fit", "--graph", graph, "--nonprivate", "--k", "2", "--lambda", "2", "--mode", "exact", "--out",
                 est}) == 0);
  const auto record = io::read_estimate_file(est);
  CHECK_FALSE(record.is_private);
  CHECK(record.k == 2);
  CHECK(record.b_hat == fit_nonprivate(g, 2, 2.0, FitMode::exact, 0).b_hat.b);

  CHECK(run_cli({"fit", "--graph", graph, "--private", "--k", "2", "--lambda", "2", "--epsilon", "1", "--mode",
                 "exact", "--seed", "5", "--out", priv}) == 0);
  const auto p = io::read_estimate_file(priv);
  CHECK(p.is_private);
  CHECK(p.exact_dp);
  CHECK(p.b_hat == fit_private_exact(g, 2, 2.0, 1.0, 5).b_hat.b);

  CHECK(run_cli({"eval", "--estimate", est, "--graphon", graphon}) == 0);
  CHECK(run_cli({"cuts", "--graph", graph, "--q", "2", "--out", (dir / "q.csv").string()}) == 0);
  CHECK(run_cli({"cuts", "--estimate", est, "--q", "2", "--resolution", "0.25", "--compare", graph, "--out",
                 (dir / "f.csv").string()}) == 0);
  CHECK(run_cli({"oracle", "--graph", graph, "--estimate", est}) == 0);
}

TEST_CASE("CLI exit codes") {
  const fs::path dir = scratch_dir("codes");
  const std::string graph = (dir / "g.txt").string();
  CHECK(run_cli({"sample", "--graphon", kConfigDir + "/two_block.json", "--n", "6", "--rho", "0.5", "--out",
                 graph}) == 0);
  CHECK(run_cli({"fit", "--graph", graph, "--private", "--k", "2", "--lambda", "2", "--epsilon", "0"}) == 2);
  CHECK(run_cli({"fit", "--graph", graph, "--bogus"}) == 1);
  CHECK(run_cli({"nonsense"}) == 1);
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"fit", "--graph", (dir / "missing.txt").string(), "--nonprivate", "--k", "2"}) != 0);
  CHECK(run_cli({"sample", "--graphon", kConfigDir + "/two_block.json", "--n", "6", "--rho", "0.9"}) == 2);
}

TEST_CASE("CLI experiment on the shipped preset") {
  const fs::path dir = scratch_dir("preset");
  const std::string csv = (dir / "k.csv").string();
  const std::string svg = (dir / "k.svg").string();
  CHECK(run_cli({"experiment", "--config", kConfigDir + "/kblock.json", "--out", csv, "--svg", svg}) == 0);
  const std::string text = io::read_text_file(csv);
  std::string joined;
  for (const auto& name : trial_record_header()) joined += (joined.empty() ? "" : ",") + name;
  CHECK(text.substr(0, text.find('\n')) == joined);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 * 5 * 3);
  CHECK(fs::exists(svg));
  CHECK(io::read_text_file(svg) == svg_from_csv(text, "n", "err_delta2_W"));
}
