#include <doctest.h>

#include <map>

#include "privgraphon/estimators.hpp"
#include "privgraphon/graphon.hpp"
#include "privgraphon/partition.hpp"
#include "test_support.hpp"

using namespace privgraphon;
using namespace testing_support;

namespace {

SimpleGraph relabel(const SimpleGraph& g, const std::vector<int>& sigma) {
  SimpleGraph out(g.n());
  for (const auto& [i, j] : g.edges()) out.add_edge(sigma[i], sigma[j]);
  return out;
}

SimpleGraph complete_bipartite(int half) {
  SimpleGraph g(2 * half);
  for (int i = 0; i < half; ++i)
    for (int j = half; j < 2 * half; ++j) g.add_edge(i, j);
  return g;
}

SimpleGraph two_cliques(int half) {
  SimpleGraph g(2 * half);
  for (int i = 0; i < 2 * half; ++i)
    for (int j = i + 1; j < 2 * half; ++j)
      if ((i < half) == (j < half)) g.add_edge(i, j);
  return g;
}

}  // namespace

TEST_CASE("candidate grid indexing") {
  const CandidateGrid grid(2, 4, 0.5);
  CHECK(grid.levels() == 3);
  CHECK(grid.entry_values() == std::vector<double>{0.0, 0.25, 0.5});
  CHECK(grid.count() == 27.0);
  CHECK(grid.at(0).b.isZero());
  Matrix last(2, 2);
  last << 0.5, 0.5, 0.5, 0.5;
  CHECK(grid.at(26).b == last);
  // Upper triangle (b00, b01, b11), first entry most significant.
  CHECK(grid.levels_of(1) == std::vector<int>{0, 0, 1});
  CHECK(grid.levels_of(3) == std::vector<int>{0, 1, 0});
  CHECK(grid.levels_of(9) == std::vector<int>{1, 0, 0});

  std::vector<double> previous;
  for (std::uint64_t i = 0; i < 27; ++i) {
    const BlockModel b = grid.at(i);
    CHECK(grid.index_of(b) == i);
    CHECK(grid.index_of_levels(grid.levels_of(i)) == i);
    CHECK(b.b.isApprox(b.b.transpose()));
    CHECK(b.b.minCoeff() >= 0.0);
    CHECK(b.b.maxCoeff() <= 0.5);
    const std::vector<double> upper = {b.b(0, 0), b.b(0, 1), b.b(1, 1)};
    CHECK(upper > previous);
    previous = upper;
  }
  CHECK_THROWS_AS(grid.at(27), ValidationError);
  Matrix off(2, 2);
  off << 0.1, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(grid.index_of(BlockModel(off)), ValidationError);

  CHECK(CandidateGrid(3, 10, 0.35).levels() == 4);
  CHECK(CandidateGrid(3, 10, 0.35).count() == std::pow(4.0, 6));
  CHECK(CandidateGrid(1, 5, 0.0).count() == 1.0);
  CHECK(CandidateGrid(2, 10, 0.3).levels() == 4);
}

TEST_CASE("laplace sampler") {
  const double scale = 0.7;
  const int draws = 100000;
  double sum = 0.0;
  int tail = 0;
  for (int s = 0; s < draws; ++s) {
    const double x = laplace_sample(scale, static_cast<std::uint64_t>(s));
    sum += x;
    if (std::abs(x) > scale) ++tail;
  }
  CHECK(std::abs(sum / draws) <= 4.0 * std::sqrt(2.0) * scale / std::sqrt(double(draws)));
  CHECK(std::abs(static_cast<double>(tail) / draws - std::exp(-1.0)) <= 0.01);
  CHECK(laplace_sample(scale, 42) == laplace_sample(scale, 42));
  CHECK(laplace_sample(scale, 42) != laplace_sample(scale, 43));
  CHECK_THROWS_AS(laplace_sample(0.0, 1), ValidationError);
}

TEST_CASE("private density") {
  SimpleGraph k5(5);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) k5.add_edge(i, j);
  CHECK(k5.density() == 1.0);

  Rng rng(1);
  const SimpleGraph g = random_graph(100, 0.3, rng);
  for (int s = 0; s < 100; ++s) CHECK(std::abs(private_density(g, 1e6, s) - g.density()) < 1e-3);

  const int seeds = 10000;
  const double scale = 4.0 / (100 * 1.0);
  double sum = 0.0;
  for (int s = 0; s < seeds; ++s) sum += private_density(g, 1.0, s);
  const double se = std::sqrt(2.0) * scale / std::sqrt(double(seeds));
  CHECK(std::abs(sum / seeds - g.density()) <= 4.0 * se);

  CHECK_THROWS_AS(private_density(g, 0.0, 1), ValidationError);
  CHECK(clamp_density(-0.2, 10) == 0.01);
  CHECK(clamp_density(0.3, 10) == 0.3);
}

TEST_CASE("fit_nonprivate planted and degenerate instances") {
  const SimpleGraph bip = complete_bipartite(4);
  const auto fit = fit_nonprivate(bip, 2, 2.0, FitMode::exact, 1);
  CHECK(fit.alignment.distance < 1e-15);
  CHECK(fit.rho_g == doctest::Approx(16.0 / 28.0));
  CHECK(fit.mu == doctest::Approx(2.0 * 16.0 / 28.0));
  Matrix expected(2, 2);
  expected << 0, 1, 1, 0;
  CHECK(fit.b_hat.b == expected);
  CHECK(score(fit.b_hat, fit.alignment.pi, bip) == doctest::Approx(std::pow(frob_l2(bip.adjacency()), 2)));

  const auto heuristic = fit_nonprivate(bip, 2, 2.0, FitMode::heuristic, 1);
  CHECK(heuristic.alignment.distance < 1e-15);

  const auto empty = fit_nonprivate(SimpleGraph(6), 2, 2.0, FitMode::exact, 1);
  CHECK(empty.b_hat.b.isZero());
  CHECK(empty.alignment.distance == 0.0);
  CHECK(fit_nonprivate(SimpleGraph(6), 3, 2.0, FitMode::heuristic, 1).b_hat.b.isZero());

  CHECK_THROWS_AS(fit_nonprivate(bip, 2, 0.5, FitMode::exact, 1), ValidationError);
  CHECK_THROWS_AS(fit_nonprivate(bip, 2, 2.0, FitMode::mcmc, 1), ValidationError);
  CHECK_THROWS_AS(fit_nonprivate(SimpleGraph(14), 2, 2.0, FitMode::exact, 1), LimitExceeded);
}

TEST_CASE("fit_nonprivate exact equals the literal argmin over the grid") {
  Rng rng(2);
  for (int rep = 0; rep < 12; ++rep) {
    const int n = 4 + static_cast<int>(rng.below(4));
    const int k = 1 + static_cast<int>(rng.below(2));
    const double lambda = 1.0 + rng.uniform();
    const SimpleGraph g = random_graph(n, 0.2 + 0.6 * rng.uniform(), rng);
    const auto fit = fit_nonprivate(g, k, lambda, FitMode::exact, 1);
    const CandidateGrid grid(k, n, lambda * g.density());
    const Matrix a = g.adjacency();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(grid.count()); ++i) {
      const double d = brute_hat_delta2(grid.at(i).b, a);
      best = std::min(best, d);
      CHECK(fit.alignment.distance <= d + 1e-12);
    }
    CHECK(fit.alignment.distance == doctest::Approx(best).epsilon(1e-12));
    CHECK(hat_delta2_exact(fit.b_hat, a).distance == doctest::Approx(best).epsilon(1e-12));
    CHECK_NOTHROW(grid.index_of(fit.b_hat));
  }
}

TEST_CASE("fit_nonprivate exact is label invariant") {
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 6 + static_cast<int>(rng.below(3));
    const SimpleGraph g = random_graph(n, 0.5, rng);
    std::vector<int> sigma(static_cast<std::size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::shuffle(sigma.begin(), sigma.end(), rng);
    const double d1 = fit_nonprivate(g, 2, 2.0, FitMode::exact, 1).alignment.distance;
    const double d2 = fit_nonprivate(relabel(g, sigma), 2, 2.0, FitMode::exact, 1).alignment.distance;
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
  }
}

TEST_CASE("fit_nonprivate heuristic against exact at n=8") {
  Rng rng(4);
  int equal = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    const SimpleGraph g = random_graph(8, 0.5, rng);
    const double exact = fit_nonprivate(g, 2, 2.0, FitMode::exact, 1).alignment.distance;
    const auto h = fit_nonprivate(g, 2, 2.0, FitMode::heuristic, rng());
    CHECK(h.alignment.distance >= exact - 1e-12);
    CHECK(h.alignment.method == AlignmentMethod::alternating);
    if (h.alignment.distance <= exact + 1e-9) ++equal;
  }
  CHECK(equal >= 40);
}

TEST_CASE("mechanism parameters") {
  const Mechanism m = make_mechanism(10, 2, 0.3, 2.0, 1.0);
  CHECK(m.mu == doctest::Approx(0.6));
  CHECK(m.degree_cap == doctest::Approx(6.0));
  CHECK(m.sensitivity == doctest::Approx(4.0 * 6.0 * 0.6 / 100.0));
  CHECK(m.sensitivity == doctest::Approx(4.0 * 4.0 * 0.09 / 10.0));
  CHECK(m.inverse_temperature == doctest::Approx(1.0 / (4.0 * m.sensitivity)));
  CHECK_FALSE(m.clamp_activated);
  CHECK(m.grid.levels() == 7);

  const Mechanism c = make_mechanism(10, 2, -0.05, 2.0, 1.0);
  CHECK(c.clamp_activated);
  CHECK(c.rho_hat == -0.05);
  CHECK(c.mu == doctest::Approx(0.02));
  CHECK(c.grid.count() == 1.0);
  CHECK_THROWS_AS(make_mechanism(10, 2, 0.3, 2.0, 0.0), ValidationError);
}

TEST_CASE("single-candidate grid") {
  Rng rng(5);
  const SimpleGraph g = random_graph(6, 0.5, rng);
  const auto dist = exact_output_distribution(g, 2, 0.01, 1.0, 1.0);
  REQUIRE(dist.probabilities.size() == 1);
  CHECK(dist.probabilities[0] == 1.0);
  for (int s = 0; s < 10; ++s) CHECK(sample_categorical(dist.probabilities, s) == 0);
}

TEST_CASE("two equally scored candidates are sampled evenly") {
  SimpleGraph g(8);
  g.add_edge(0, 1);
  g.add_edge(2, 3);
  const auto dist = exact_output_distribution(g, 1, 0.1, 1.5, 1.0);
  REQUIRE(dist.probabilities.size() == 2);
  CHECK(dist.scores[0] == doctest::Approx(dist.scores[1]));
  int ones = 0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) ones += static_cast<int>(sample_categorical(dist.probabilities, s));
  CHECK(std::abs(static_cast<double>(ones) / seeds - 0.5) <= 0.02);
}

TEST_CASE("categorical sampling uses half-open intervals") {
  CHECK_THROWS_AS(sample_categorical({}, 1), ValidationError);
  const std::vector<double> p = {0.0, 1.0, 0.0};
  for (int s = 0; s < 100; ++s) CHECK(sample_categorical(p, s) == 1);
  const std::vector<double> q = {0.2, 0.3, 0.5};
  std::vector<int> counts(3);
  for (int s = 0; s < 20000; ++s) ++counts[sample_categorical(q, s)];
  for (int i = 0; i < 3; ++i) CHECK(std::abs(counts[i] / 20000.0 - q[i]) <= 0.015);
}

TEST_CASE("exact distribution is normalized and ordered by score") {
  Rng rng(6);
  const SimpleGraph g = random_graph(6, 0.5, rng);
  const auto dist = exact_output_distribution(g, 2, 0.3, 2.0, 1.0);
  CHECK(dist.probabilities.size() == 64);
  double total = 0.0;
  for (double p : dist.probabilities) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  const PartitionTable table(g, 2);
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(dist.scores[i] ==
          doctest::Approx(table.max_extended_score(dist.mechanism.grid.at(i), dist.mechanism.degree_cap).value));
    CHECK(std::exp(dist.log_probabilities[i]) == doctest::Approx(dist.probabilities[i]));
    for (std::size_t j = 0; j < 64; ++j) {
      const double log_ratio = dist.log_probabilities[i] - dist.log_probabilities[j];
      CHECK(log_ratio == doctest::Approx(dist.mechanism.inverse_temperature * (dist.scores[i] - dist.scores[j])));
    }
  }
}

TEST_CASE("exponential-mechanism privacy ratio on node-neighbors at n=5") {
  Rng rng(7);
  const double rho_hat = 0.5;
  for (double eps : {0.5, 2.0}) {
    double worst = 0.0;
    for (int rep = 0; rep < 40; ++rep) {
      const SimpleGraph g = random_graph(5, rng.uniform(), rng);
      const SimpleGraph h = g.isolate_vertex(static_cast<int>(rng.below(5)));
      const auto pg = exact_output_distribution(g, 2, rho_hat, 2.0, eps);
      const auto ph = exact_output_distribution(h, 2, rho_hat, 2.0, eps);
      for (std::size_t i = 0; i < pg.log_probabilities.size(); ++i)
        worst = std::max(worst, std::abs(pg.log_probabilities[i] - ph.log_probabilities[i]));
    }
    CHECK(worst <= eps / 2.0 + std::log1p(1e-9));
  }
}

TEST_CASE("fit_private_exact") {
  Rng rng(8);
  const SimpleGraph g = random_graph(6, 0.5, rng);
  const auto a = fit_private_exact(g, 2, 2.0, 1.0, 77);
  const auto b = fit_private_exact(g, 2, 2.0, 1.0, 77);
  CHECK(a.b_hat.b == b.b_hat.b);
  CHECK(a.rho_hat == b.rho_hat);
  CHECK(a.rho_hat == private_density(g, 1.0, derive_seed(77, 0)));
  CHECK(a.exact_dp);
  CHECK(a.mode == FitMode::exact);
  CHECK(a.candidate_count == CandidateGrid(2, 6, a.mu).count());
  CHECK(a.mu == doctest::Approx(2.0 * clamp_density(a.rho_hat, 6)));
  CHECK(a.candidate_index == CandidateGrid(2, 6, a.mu).index_of(a.b_hat));
  const auto dist = exact_output_distribution(g, 2, a.rho_hat, 2.0, 1.0);
  CHECK(a.sampled_log_weight == doctest::Approx(dist.log_probabilities[a.candidate_index]));
  CHECK(a.sampled_score == doctest::Approx(dist.scores[a.candidate_index]));
  CHECK_THROWS_AS(fit_private_exact(g, 2, 2.0, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(fit_private_exact(random_graph(12, 0.9, rng), 3, 8.0, 1e6, 1), LimitExceeded);
}

TEST_CASE("Metropolis chain basics") {
  Rng rng(9);
  const SimpleGraph g = random_graph(6, 0.5, rng);
  CHECK_THROWS_AS(run_mechanism_chain(g, 2, 0.3, 2.0, 1.0, 0, 1), ValidationError);
  const auto one = run_mechanism_chain(g, 2, 0.3, 2.0, 1.0, 1, 1);
  CHECK(one.steps == 1);
  CHECK_FALSE(one.exact_dp);
  CHECK(one.mode == FitMode::mcmc);
  CHECK_NOTHROW(CandidateGrid(2, 6, one.mu).index_of(one.b_hat));
  const auto again = run_mechanism_chain(g, 2, 0.3, 2.0, 1.0, 500, 3);
  CHECK(again.candidate_index == run_mechanism_chain(g, 2, 0.3, 2.0, 1.0, 500, 3).candidate_index);
  const auto full = fit_private_mcmc(g, 2, 2.0, 1.0, 50, 5);
  CHECK(full.rho_hat == private_density(g, 1.0, derive_seed(5, 0)));
}

TEST_CASE("Metropolis chain distribution matches the exact weights") {
  Rng rng(10);
  const SimpleGraph g = random_graph(6, 0.5, rng);
  const auto dist = exact_output_distribution(g, 2, 0.3, 2.0, 2.0);
  FitOptions options;
  options.record_trace = true;
  const long steps = 100000;
  const auto chain = run_mechanism_chain(g, 2, 0.3, 2.0, 2.0, steps, 11, options);
  REQUIRE(chain.state_trace.size() == static_cast<std::size_t>(steps));
  std::vector<double> freq(dist.probabilities.size(), 0.0);
  for (auto s : chain.state_trace) freq[s] += 1.0 / steps;
  double tv = 0.0;
  for (std::size_t i = 0; i < freq.size(); ++i) tv += 0.5 * std::abs(freq[i] - dist.probabilities[i]);
  CHECK(tv <= 0.1);
  for (std::size_t t = 0; t < 1000; ++t)
    CHECK(chain.score_trace[t] == doctest::Approx(dist.scores[chain.state_trace[t]]));
}

TEST_CASE("Metropolis chain climbs from the zero matrix on a planted instance") {
  const SimpleGraph g = two_cliques(6);
  FitOptions options;
  options.record_trace = true;
  const long steps = 20000;
  const auto chain = run_mechanism_chain(g, 2, g.density(), 2.0, 50.0, steps, 12, options);
  const std::size_t decile = steps / 10;
  double first = 0.0;
  double second = 0.0;
  for (std::size_t t = 0; t < decile / 2; ++t) first += chain.score_trace[t];
  for (std::size_t t = decile / 2; t < decile; ++t) second += chain.score_trace[t];
  CHECK(second >= first);
  CHECK(chain.accepted > 0);
}

TEST_CASE("utility check of the exponential mechanism") {
  const auto single = utility_check_exponential({0.3}, 0.1, 1.0, 0.1, 100, 1);
  CHECK(single.empirical_violation_rate == 0.0);
  CHECK(single.exact_violation_probability == 0.0);
  CHECK(single.satisfied);

  const auto uniform = utility_check_exponential(std::vector<double>(50, 0.2), 0.1, 1.0, 0.1, 1000, 2);
  CHECK(uniform.empirical_violation_rate == 0.0);
  CHECK(uniform.satisfied);

  const SimpleGraph g = two_cliques(4);
  for (int seed = 0; seed < 20; ++seed) {
    const auto dist = exact_output_distribution(g, 2, g.density(), 2.0, 1.0);
    const auto report =
        utility_check_exponential(dist.scores, dist.mechanism.sensitivity, 0.5, 0.1, 1000, static_cast<std::uint64_t>(seed));
    CHECK(report.empirical_violation_rate <= 0.1);
    CHECK(report.exact_violation_probability <= 0.1);
  }
  CHECK_THROWS_AS(utility_check_exponential({}, 0.1, 1.0, 0.1, 10, 1), ValidationError);
}
