#include "privgraphon/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "privgraphon/graphon.hpp"

namespace privgraphon::io {

using nlohmann::json;

SimpleGraph read_graph(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    const std::string where = "graph file line " + std::to_string(line_no) + ": ";
    if (n < 0) {
      std::string tag;
      require(static_cast<bool>(fields >> tag >> n) && tag == "n", where + "expected 'n <count>'");
      require(n >= 0, where + "vertex count must be nonnegative");
      continue;
    }
    int i = 0;
    int j = 0;
    require(static_cast<bool>(fields >> i >> j), where + "expected 'i j'");
    require(i >= 0 && j < n && i < j, where + "need 0 <= i < j < n");
    edges.emplace_back(i, j);
  }
  require(n >= 0, "graph file has no 'n <count>' line");
  SimpleGraph g(n);
  for (const auto& [i, j] : edges) require(g.add_edge(i, j), "graph file lists an edge twice");
  return g;
}

void write_graph(std::ostream& out, const SimpleGraph& g) {
  out << "n " << g.n() << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

SimpleGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open graph file " + path);
  return read_graph(in);
}

void write_graph_file(const std::string& path, const SimpleGraph& g) {
  std::ostringstream out;
  write_graph(out, g);
  write_text_file(path, out.str());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

namespace {

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(what + " is not valid JSON: " + e.what());
  }
}

Matrix matrix_from_row_major(const json& values, int k, const std::string& what) {
  require(values.is_array() && values.size() == static_cast<std::size_t>(k) * k,
          what + " must be a row-major array of k*k numbers");
  Matrix m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = values.at(static_cast<std::size_t>(i * k + j)).get<double>();
  return m;
}

json row_major(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

}  // namespace

Graphon parse_graphon(const std::string& json_text) {
  const json doc = parse_json(json_text, "graphon file");
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "step") {
      const int k = doc.at("k").get<int>();
      require(k >= 1, "graphon k must be positive");
      std::vector<double> boundaries;
      if (doc.contains("boundaries")) {
        boundaries = doc.at("boundaries").get<std::vector<double>>();
      } else {
        for (int i = 0; i <= k; ++i) boundaries.push_back(static_cast<double>(i) / k);
      }
      return Graphon(StepGraphon(matrix_from_row_major(doc.at("values"), k, "graphon values"), boundaries));
    }
    if (kind == "holder") {
      const std::string family = doc.value("family", std::string("holder_example"));
      require(family == "holder_example", "unknown holder family '" + family + "'");
      return holder_example_graphon(doc.at("alpha").get<double>());
    }
    throw ValidationError("graphon kind must be 'step' or 'holder'");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed graphon file: ") + e.what());
  }
}

std::string graphon_to_json(const Graphon& w) {
  json doc;
  if (w.is_step()) {
    const auto& s = w.step();
    doc["kind"] = "step";
    doc["k"] = s.blocks();
    doc["boundaries"] = s.boundaries;
    doc["values"] = row_major(s.values);
  } else {
    doc["kind"] = "holder";
    doc["family"] = w.holder().family;
    doc["alpha"] = w.holder().alpha;
  }
  return doc.dump(2) + "\n";
}

Graphon read_graphon_file(const std::string& path) { return parse_graphon(read_text_file(path)); }

EstimateRecord to_record(const NonprivateEstimate& e, int n, std::uint64_t seed) {
  EstimateRecord r;
  r.is_private = false;
  r.n = n;
  r.k = e.b_hat.k();
  r.mu = e.mu;
  r.rho_hat = e.rho_g;
  r.lambda = e.lambda;
  r.b_hat = e.b_hat.b;
  r.mode = to_string(e.mode);
  r.seed = seed;
  r.objective = e.alignment.distance;
  return r;
}

EstimateRecord to_record(const PrivateEstimate& e, int n, std::uint64_t seed) {
  EstimateRecord r;
  r.is_private = true;
  r.n = n;
  r.k = e.b_hat.k();
  r.mu = e.mu;
  r.rho_hat = e.rho_hat;
  r.epsilon = e.epsilon;
  r.lambda = e.lambda;
  r.b_hat = e.b_hat.b;
  r.mode = to_string(e.mode);
  r.seed = seed;
  r.exact_dp = e.exact_dp;
  r.clamp_activated = e.clamp_activated;
  r.candidate_count = e.candidate_count;
  return r;
}

std::string estimate_to_json(const EstimateRecord& e) {
  json doc;
  doc["private"] = e.is_private;
  doc["n"] = e.n;
  doc["k"] = e.k;
  doc["mu"] = e.mu;
  doc["rho_hat"] = e.rho_hat;
  doc["epsilon"] = e.epsilon;
  doc["lambda"] = e.lambda;
  doc["b_hat"] = row_major(e.b_hat);
  doc["mode"] = e.mode;
  doc["seed"] = e.seed;
  doc["exact_dp"] = e.exact_dp;
  doc["clamp_activated"] = e.clamp_activated;
  doc["candidate_count"] = e.candidate_count;
  doc["objective"] = e.objective;
  return doc.dump(2) + "\n";
}

EstimateRecord parse_estimate(const std::string& json_text) {
  const json doc = parse_json(json_text, "estimate");
  try {
    EstimateRecord e;
    e.is_private = doc.at("private").get<bool>();
    e.n = doc.at("n").get<int>();
    e.k = doc.at("k").get<int>();
    require(e.k >= 1, "estimate k must be positive");
    e.mu = doc.at("mu").get<double>();
    e.rho_hat = doc.at("rho_hat").get<double>();
    e.epsilon = doc.value("epsilon", 0.0);
    e.lambda = doc.at("lambda").get<double>();
    e.b_hat = matrix_from_row_major(doc.at("b_hat"), e.k, "b_hat");
    e.mode = doc.at("mode").get<std::string>();
    e.seed = doc.value("seed", std::uint64_t{0});
    e.exact_dp = doc.value("exact_dp", true);
    e.clamp_activated = doc.value("clamp_activated", false);
    e.candidate_count = doc.value("candidate_count", 0.0);
    e.objective = doc.value("objective", 0.0);
    return e;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed estimate: ") + ex.what());
  }
}

EstimateRecord read_estimate_file(const std::string& path) { return parse_estimate(read_text_file(path)); }

}  // namespace privgraphon::io
