#include "privgraphon/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "privgraphon/graphon.hpp"
#include "privgraphon/io.hpp"
#include "privgraphon/rng.hpp"

namespace privgraphon {

using nlohmann::json;

double RhoRule::operator()(int n) const {
  if (kind == Kind::constant) return value;
  return value * std::log(static_cast<double>(n)) / n;
}

namespace {

Graphon default_graphon() {
  Matrix v(2, 2);
  v << 1.5, 0.5, 0.5, 1.5;
  return Graphon(StepGraphon::uniform(v));
}

}  // namespace

ExperimentConfig::ExperimentConfig() : graphon(default_graphon()) {}

void ExperimentConfig::validate() const {
  require(!experiment_id.empty(), "experiment_id must be nonempty");
  require(experiment_id.find_first_of(",\n\"") == std::string::npos,
          "experiment_id must not contain commas, quotes or newlines");
  require(!n_list.empty(), "n_list must be nonempty");
  require(trials >= 1, "trials must be at least 1");
  require(k_fit >= 1, "k_fit must be positive");
  require(lambda >= 1.0, "lambda must be at least 1");
  require(restarts >= 1, "restarts must be at least 1");
  require(mcmc_steps >= 1, "mcmc_steps must be at least 1");
  require(run_nonprivate || run_private, "enable at least one estimator");
  require(nonprivate_mode != FitMode::mcmc, "nonprivate mode must be exact or heuristic");
  require(private_mode != FitMode::heuristic, "private mode must be exact or mcmc");
  if (run_private) require(!epsilon_list.empty(), "epsilon_list must be nonempty when the private estimator runs");
  for (double e : epsilon_list) require(e > 0.0, "epsilon must be positive");
  for (int n : n_list) {
    require(n >= 2, "every n must be at least 2");
    require(n >= k_fit, "every n must be at least k_fit");
    const double rho = rho_rule(n);
    require(rho > 0.0, "rho must be positive");
    require(rho <= 1.0, "rho must be at most 1");
    require(rho * graphon.sup_norm() <= 1.0 + 1e-12, "rho * sup|W| exceeds 1 for n = " + std::to_string(n));
  }
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    c.experiment_id = doc.value("experiment_id", c.experiment_id);
    c.graphon = io::parse_graphon(doc.at("graphon").dump());
    c.n_list = doc.at("n_list").get<std::vector<int>>();
    c.k_true = doc.value("k_true", c.graphon.is_step() ? c.graphon.step().blocks() : 0);
    c.k_fit = doc.at("k_fit").get<int>();
    const json& rule = doc.at("rho_rule");
    const std::string kind = rule.at("kind").get<std::string>();
    if (kind == "constant") {
      c.rho_rule.kind = RhoRule::Kind::constant;
      c.rho_rule.value = rule.at("value").get<double>();
    } else if (kind == "log_over_n") {
      c.rho_rule.kind = RhoRule::Kind::log_over_n;
      c.rho_rule.value = rule.at("c").get<double>();
    } else {
      throw ValidationError("rho_rule kind must be 'constant' or 'log_over_n'");
    }
    c.epsilon_list = doc.value("epsilon_list", std::vector<double>{});
    c.lambda = doc.at("lambda").get<double>();
    c.trials = doc.at("trials").get<int>();
    c.master_seed = doc.value("master_seed", std::uint64_t{0});
    if (doc.contains("estimators")) {
      const json& e = doc.at("estimators");
      c.run_nonprivate = e.value("nonprivate", c.run_nonprivate);
      c.run_private = e.value("private", c.run_private);
      c.nonprivate_mode = fit_mode_from_string(e.value("nonprivate_mode", to_string(c.nonprivate_mode)));
      c.private_mode = fit_mode_from_string(e.value("private_mode", to_string(c.private_mode)));
      c.mcmc_steps = e.value("mcmc_steps", c.mcmc_steps);
      c.restarts = e.value("restarts", c.restarts);
    }
    if (doc.contains("exact_limits")) {
      c.limits.max_n = doc.at("exact_limits").value("max_n", c.limits.max_n);
      c.limits.max_k = doc.at("exact_limits").value("max_k", c.limits.max_k);
    }
    c.record_runtime = doc.value("record_runtime", false);
    if (doc.contains("output")) {
      c.csv_path = doc.at("output").value("csv", std::string());
      c.svg_path = doc.at("output").value("svg", std::string());
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  return parse_experiment_config(io::read_text_file(path));
}

const std::vector<std::string>& trial_record_header() {
  static const std::vector<std::string> header = {
      "experiment_id", "trial",   "n",          "k_fit",         "rho",  "epsilon",
      "lambda",        "rho_hat", "err_delta2_W", "err_hatdelta2_Q", "eps_n", "eps_k_oracle",
      "runtime_ms",    "seed",    "mode",       "alignment",     "status", "reason"};
  return header;
}

double record_field(const TrialRecord& r, const std::string& field) {
  if (field == "trial") return r.trial;
  if (field == "n") return r.n;
  if (field == "k_fit") return r.k_fit;
  if (field == "rho") return r.rho;
  if (field == "epsilon") return r.epsilon;
  if (field == "lambda") return r.lambda;
  if (field == "rho_hat") return r.rho_hat;
  if (field == "err_delta2_W") return r.err_delta2_W;
  if (field == "err_hatdelta2_Q") return r.err_hatdelta2_Q;
  if (field == "eps_n") return r.eps_n;
  if (field == "eps_k_oracle") return r.eps_k_oracle;
  if (field == "runtime_ms") return r.runtime_ms;
  throw ValidationError("unknown numeric field '" + field + "'");
}

std::uint64_t trial_seed(std::uint64_t master_seed, int n, int trial) {
  return derive_seed(derive_seed(master_seed, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(trial));
}

namespace {

// Shared per-draw quantities.
struct TrialDraw {
  std::uint64_t seed = 0;
  double rho = 0.0;
  LatentSample latents;
  SimpleGraph graph;
  Matrix h;
  double eps_n = 0.0;
};

// delta_2(W, U) for a fitted model U on the uniform k-grid (graphon scale).
double delta2_to_graphon(const Graphon& w, const Matrix& fitted, double eps_k_fine, int fine_k) {
  const StepGraphon u = StepGraphon::uniform(fitted);
  Delta2Options options;
  options.max_cells = 256;
  options.allow_upper_bound = true;
  if (w.is_step()) return delta2_step_graphons(u, w.step(), options).distance;
  const StepGraphon coarse = StepGraphon::uniform(average_graphon_over_uniform_partition(w, fine_k).b);
  return eps_k_fine + delta2_step_graphons(u, coarse, options).distance;
}

std::string sanitize(std::string text) {
  for (char& ch : text)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  return text;
}

}  // namespace

std::vector<TrialRecord> run_trial(const ExperimentConfig& config, int n, int trial) {
  config.validate();
  const int k = config.k_fit;
  TrialDraw draw;
  draw.seed = trial_seed(config.master_seed, n, trial);
  draw.rho = config.rho_rule(n);

  TrialRecord base;
  base.experiment_id = config.experiment_id;
  base.trial = trial;
  base.n = n;
  base.k_fit = k;
  base.rho = draw.rho;
  base.lambda = config.lambda;
  base.seed = draw.seed;

  // Hölder graphons are compared through a finer uniform step approximation.
  const int fine_k = k * std::max(1, (16 + k - 1) / k);
  double eps_k_fine = 0.0;
  std::vector<TrialRecord> rows;
  try {
    draw.latents = sample_latents(n, derive_seed(draw.seed, 0));
    const auto q = edge_probability_matrix(config.graphon, draw.latents, draw.rho);
    draw.graph = sample_graph(q, derive_seed(draw.seed, 1));
    draw.h = latent_matrix(config.graphon, draw.latents);
    draw.eps_n = config.graphon.is_step() ? eps_n_with_latents(config.graphon, draw.latents).constructive
                                          : eps_n_grid(config.graphon, draw.latents);
    base.eps_n = draw.eps_n;
    base.eps_k_oracle = eps_k_oracle(config.graphon, k);
    if (!config.graphon.is_step()) eps_k_fine = eps_k_oracle(config.graphon, fine_k);
  } catch (const std::exception& e) {
    TrialRecord r = base;
    r.mode = "sampling";
    r.status = "failed";
    r.reason = sanitize(e.what());
    return {r};
  }

  const bool exact_alignment = n <= config.limits.max_n && k <= config.limits.max_k;
  auto finish = [&](TrialRecord& r, const Matrix& b_hat, double denominator) {
    require(denominator > 0.0, "zero density: errors undefined");
    const Matrix fitted = b_hat / denominator;
    r.err_delta2_W = delta2_to_graphon(config.graphon, fitted, eps_k_fine, fine_k);
    const BlockModel scaled(fitted, Scale::graphon);
    if (exact_alignment) {
      r.err_hatdelta2_Q = hat_delta2_exact(scaled, draw.h, config.limits).distance;
      r.alignment = "exact";
    } else {
      r.err_hatdelta2_Q =
          hat_delta2_heuristic(scaled, draw.h, config.restarts, derive_seed(draw.seed, 99)).distance;
      r.alignment = "alternating";
    }
  };

  using clock = std::chrono::steady_clock;
  auto run_row = [&](TrialRecord r, auto&& body) {
    const auto start = clock::now();
    try {
      body(r);
    } catch (const std::exception& e) {
      r.status = "failed";
      r.reason = sanitize(e.what());
      r.err_delta2_W = 0.0;
      r.err_hatdelta2_Q = 0.0;
    }
    if (config.record_runtime)
      r.runtime_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    rows.push_back(std::move(r));
  };

  FitOptions options;
  options.limits = config.limits;
  options.restarts = config.restarts;

  if (config.run_nonprivate) {
    TrialRecord r = base;
    r.mode = "nonprivate-" + to_string(config.nonprivate_mode);
    run_row(r, [&](TrialRecord& row) {
      const auto fit = fit_nonprivate(draw.graph, k, config.lambda, config.nonprivate_mode,
                                      derive_seed(draw.seed, 2), options);
      row.rho_hat = fit.rho_g;
      finish(row, fit.b_hat.b, fit.rho_g);
    });
  }
  if (config.run_private) {
    for (std::size_t j = 0; j < config.epsilon_list.size(); ++j) {
      TrialRecord r = base;
      r.epsilon = config.epsilon_list[j];
      r.mode = "private-" + to_string(config.private_mode);
      run_row(r, [&](TrialRecord& row) {
        const std::uint64_t seed = derive_seed(draw.seed, 3 + j);
        const auto fit = config.private_mode == FitMode::mcmc
                             ? fit_private_mcmc(draw.graph, k, config.lambda, row.epsilon, config.mcmc_steps, seed,
                                                options)
                             : fit_private_exact(draw.graph, k, config.lambda, row.epsilon, seed, options);
        row.rho_hat = fit.rho_hat;
        finish(row, fit.b_hat.b, clamp_density(fit.rho_hat, n));
      });
    }
  }
  return rows;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<TrialRecord> out;
  for (int n : config.n_list)
    for (int t = 0; t < config.trials; ++t) {
      auto rows = run_trial(config, n, t);
      out.insert(out.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    }
  return out;
}

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  const auto& header = trial_record_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  std::ostringstream row;
  row << std::setprecision(12);
  for (const auto& r : records) {
    row.str("");
    row << r.experiment_id << ',' << r.trial << ',' << r.n << ',' << r.k_fit << ',' << r.rho << ',' << r.epsilon
        << ',' << r.lambda << ',' << r.rho_hat << ',' << r.err_delta2_W << ',' << r.err_hatdelta2_Q << ','
        << r.eps_n << ',' << r.eps_k_oracle << ',' << r.runtime_ms << ',' << r.seed << ',' << r.mode << ','
        << r.alignment << ',' << r.status << ',' << r.reason << '\n';
    out << row.str();
  }
}

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

double median(std::vector<double> values) {
  require(!values.empty(), "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

RateFit rate_fit_points(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "x and y differ in length");
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  require(distinct.size() >= 3, "rate fit needs at least 3 distinct x values");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "rate fit needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  RateFit out;
  out.x = x;
  out.median_y = y;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return out;
}

RateFit rate_fit(const std::vector<TrialRecord>& records, const std::string& x_field, const std::string& y_field) {
  std::map<double, std::vector<double>> groups;
  for (const auto& r : records)
    if (r.status == "ok") groups[record_field(r, x_field)].push_back(record_field(r, y_field));
  require(groups.size() >= 3, "rate fit needs at least 3 distinct x values");
  std::vector<double> x;
  std::vector<double> y;
  std::vector<int> counts;
  for (const auto& [key, values] : groups) {
    x.push_back(key);
    y.push_back(median(values));
    counts.push_back(static_cast<int>(values.size()));
  }
  RateFit out = rate_fit_points(x, y);
  out.successes = std::move(counts);
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string svg_from_csv(const std::string& csv_text, const std::string& x_field, const std::string& y_field) {
  std::istringstream in(csv_text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "CSV is empty");
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    require(it != header.end(), "CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cx = column(x_field);
  const std::size_t cy = column(y_field);
  const std::size_t cmode = column("mode");
  const std::size_t ceps = column("epsilon");
  const std::size_t cstatus = column("status");

  std::map<std::string, std::map<double, std::vector<double>>> series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() < header.size() || f[cstatus] != "ok") continue;
    const double x = std::stod(f[cx]);
    const double y = std::stod(f[cy]);
    if (!(x > 0.0 && y > 0.0)) continue;
    std::string name = f[cmode];
    if (std::stod(f[ceps]) > 0.0) name += " eps=" + f[ceps];
    series[name][x].push_back(y);
  }
  require(!series.empty(), "no successful rows with positive values to plot");

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  std::map<std::string, std::vector<std::pair<double, double>>> points;
  for (const auto& [name, groups] : series)
    for (const auto& [x, ys] : groups) {
      const double y = median(ys);
      points[name].emplace_back(std::log10(x), std::log10(y));
      x_lo = std::min(x_lo, std::log10(x));
      x_hi = std::max(x_hi, std::log10(x));
      y_lo = std::min(y_lo, std::log10(y));
      y_hi = std::max(y_hi, std::log10(y));
    }
  if (x_hi - x_lo < 1e-9) x_hi = x_lo + 1.0;
  if (y_hi - y_lo < 1e-9) y_hi = y_lo + 1.0;

  const double width = 640;
  const double height = 420;
  const double left = 70;
  const double right = 200;
  const double top = 30;
  const double bottom = 50;
  auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * (width - left - right); };
  auto py = [&](double v) { return height - bottom - (v - y_lo) / (y_hi - y_lo) * (height - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

  std::ostringstream svg;
  svg << std::setprecision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_field << " (log scale)</text>\n";
  svg << "<text x=\"16\" y=\"" << (top + height - bottom) / 2 << "\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (top + height - bottom) / 2 << ")\" text-anchor=\"middle\">median " << y_field << " (log scale)</text>\n";
  for (const double v : {x_lo, x_hi})
    svg << "<text x=\"" << px(v) << "\" y=\"" << height - bottom + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
        << std::pow(10.0, v) << "</text>\n";
  for (const double v : {y_lo, y_hi})
    svg << "<text x=\"" << left - 6 << "\" y=\"" << py(v) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
        << std::pow(10.0, v) << "</text>\n";
  std::size_t index = 0;
  for (const auto& [name, pts] : points) {
    const char* color = colors[index % (sizeof(colors) / sizeof(colors[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) svg << px(x) << ',' << py(y) << ' ';
    svg << "\"/>\n";
    for (const auto& [x, y] : pts)
      svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(index);
    svg << "<text x=\"" << width - right + 10 << "\" y=\"" << ly + 4 << "\" font-size=\"12\" fill=\"" << color
        << "\">" << name << "</text>\n";
    ++index;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace privgraphon
