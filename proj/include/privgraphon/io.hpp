#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "privgraphon/estimators.hpp"
#include "privgraphon/types.hpp"

namespace privgraphon::io {

/// Graph files: first line "n <count>", then one "i j" line per edge (0-based,
/// i < j). Blank lines and lines starting with '#' are ignored.
SimpleGraph read_graph(std::istream& in);
void write_graph(std::ostream& out, const SimpleGraph& g);
SimpleGraph read_graph_file(const std::string& path);
void write_graph_file(const std::string& path, const SimpleGraph& g);

/// Graphon JSON: {"kind":"step","k":2,"boundaries":[...],"values":[row-major]}
/// or {"kind":"holder","family":"holder_example","alpha":0.5}.
Graphon parse_graphon(const std::string& json_text);
std::string graphon_to_json(const Graphon& w);
Graphon read_graphon_file(const std::string& path);

/// Fitted model as stored on disk.
struct EstimateRecord {
  bool is_private = false;
  int n = 0;
  int k = 0;
  double mu = 0.0;
  /// Density estimate (private) or rho(G) (nonprivate).
  double rho_hat = 0.0;
  double epsilon = 0.0;
  double lambda = 0.0;
  Matrix b_hat;
  std::string mode;
  std::uint64_t seed = 0;
  bool exact_dp = true;
  bool clamp_activated = false;
  double candidate_count = 0.0;
  /// hat-delta_2(B, A) of the fit (nonprivate only).
  double objective = 0.0;
};

EstimateRecord to_record(const NonprivateEstimate& e, int n, std::uint64_t seed);
EstimateRecord to_record(const PrivateEstimate& e, int n, std::uint64_t seed);
std::string estimate_to_json(const EstimateRecord& e);
EstimateRecord parse_estimate(const std::string& json_text);
EstimateRecord read_estimate_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace privgraphon::io
