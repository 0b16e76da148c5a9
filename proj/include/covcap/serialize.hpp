#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "covcap/blockopt.hpp"
#include "covcap/covariance.hpp"
#include "covcap/matrix.hpp"

// JSON schemas for every on-disk artifact: matrices, covariance specs,
// sample sets, run configurations, and the analyze/solve/verify report
// payloads. Schema violations throw ParseError.
namespace covcap::io {

using json = nlohmann::json;

// {"rows": R, "cols": C, "re": [...], "im": [...]}, row-major entry order.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

// {"M", "N", "noise_power", "kron_sum": [{"R": mat, "T": mat}, ...]} or
// {"M", "N", "noise_power", "dense": mat}.
json spec_to_json(const CovarianceSpec& spec);
CovarianceSpec spec_from_json(const json& j);

// {"seed", "count", "samples": [mat...]}; "symmetrized_by" present only for
// symmetrized sets.
json samples_to_json(const ChannelSampleSet& set);
ChannelSampleSet samples_from_json(const json& j);

json capacity_to_json(const CapacityEstimate& est);  // {"mean","stderr","count"}
json kkt_to_json(const KKTReport& kkt);  // {"mu","complementarity":[...],"trace_gap"}
json structure_to_json(const BlockStructure& bs);  // {"sizes":[...],"U":mat}
BlockStructure structure_from_json(const json& j);

// Full solve report: {"structure", "blocks":[mat...], "capacity", "kkt",
// "iterations", "converged"}.
json solve_report_to_json(const SolveResult& result);

// A solution candidate parsed from any of: a solve report, a RunReport
// wrapping one under "report", or a bare matrix (treated as one full block).
struct ParsedSolution {
  BlockStructure structure;
  std::vector<HermitianMatrix> blocks;
};
ParsedSolution solution_from_json(const json& j);

// Run configuration shared by all subcommands.
struct RunConfig {
  CovarianceSpec spec;
  double power = 1.0;          // transmit power budget p
  std::size_t samples = 1000;  // Monte Carlo sample count S
  std::uint64_t seed = 1;
  bool symmetrize = true;  // close the sample set under the block sign group
  SolverOptions solver;
  std::string output_path;  // default report destination; --out overrides
};
RunConfig config_from_json(const json& j);
json config_to_json(const RunConfig& cfg);

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace covcap::io
