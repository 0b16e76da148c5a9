// covcap — command-line front end for the block-diagonal ergodic-capacity
// pipeline: analyze a covariance spec, solve for the optimal input
// covariance, verify a candidate against the KKT conditions, or emit channel
// samples. All runs are deterministic in the config (seed included); the
// COVCAP_THREADS variable only changes wall time, never results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covcap/blockopt.hpp"
#include "covcap/commutant.hpp"
#include "covcap/covariance.hpp"
#include "covcap/errors.hpp"
#include "covcap/serialize.hpp"
#include "covcap/version.hpp"

namespace {

namespace io = covcap::io;
using covcap::cplx;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitNoConvergence = 3;

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

void emit(const std::string& command, const io::RunConfig& cfg,
          json payload, double wall_time_s, const std::string& out_path) {
  json report;
  report["command"] = command;
  report["version"] = covcap::kVersion;
  report["config"] = io::config_to_json(cfg);
  report["report"] = std::move(payload);
  report["wall_time_s"] = wall_time_s;
  const std::string& path =
      out_path.empty() ? cfg.output_path : out_path;
  if (path.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    io::write_json_file(path, report);
  }
}

struct AnalyzeOutcome {
  covcap::AlgebraBasis basis;
  covcap::ProjectionResolution resolution;
  json payload;
};

AnalyzeOutcome run_analyze(const io::RunConfig& cfg) {
  const covcap::HermitianMatrix sigma = covcap::assemble(cfg.spec);
  AnalyzeOutcome out;
  out.basis =
      covcap::commutant_basis(sigma, cfg.spec.M(), cfg.spec.N());
  out.resolution = covcap::minimal_resolution(out.basis, cfg.seed);
  const covcap::StarReport star = covcap::verify_star_algebra(out.basis);
  const covcap::SeparabilityVerdict verdict =
      covcap::separability_certificate(sigma, cfg.spec);

  json payload;
  payload["commutant_dim"] = out.basis.dim;
  payload["rank_profile"] = covcap::rank_profile(out.resolution);
  json projections = json::array();
  for (const covcap::HermitianMatrix& p : out.resolution.projections) {
    projections.push_back(io::matrix_to_json(p.base()));
  }
  payload["projections"] = std::move(projections);
  payload["star_residuals"] =
      json{{"product_residual", star.product_residual},
           {"adjoint_residual", star.adjoint_residual},
           {"unit_residual", star.unit_residual}};
  payload["separability"] =
      json{{"status", verdict.status ==
                              covcap::Separability::kCertifiedSeparable
                          ? "CertifiedSeparable"
                          : "Inconclusive"},
           {"hs_distance", verdict.hs_distance}};
  out.payload = std::move(payload);
  return out;
}

struct SolveOutcome {
  covcap::SolveResult result;
  covcap::ChannelSampleSet set;
  json payload;
};

SolveOutcome run_solve(const io::RunConfig& cfg) {
  if (cfg.samples < 100) {
    std::cerr << "warning: only " << cfg.samples
              << " Monte Carlo samples; estimates will be noisy (recommend >= "
                 "100)\n";
  }
  AnalyzeOutcome analysis = run_analyze(cfg);
  const covcap::ProjectionResolution transposed =
      covcap::transpose_resolution(analysis.resolution);
  const covcap::BlockStructure bs =
      covcap::build_block_structure(transposed);

  SolveOutcome out;
  out.set = covcap::sample_channels(cfg.spec, cfg.samples, cfg.seed);
  if (cfg.symmetrize && bs.c > 1) {
    out.set = covcap::symmetrize_samples(out.set, covcap::sign_generators(bs));
  }
  out.result = covcap::solve_blocks(out.set, bs, cfg.power,
                                    cfg.spec.noise_power(), cfg.solver);
  out.payload = io::solve_report_to_json(out.result);
  return out;
}

int cmd_analyze(const io::RunConfig& cfg, const std::string& out_path) {
  Timer timer;
  AnalyzeOutcome out = run_analyze(cfg);
  emit("analyze", cfg, std::move(out.payload), timer.seconds(), out_path);
  return kExitOk;
}

int cmd_solve(const io::RunConfig& cfg, const std::string& out_path) {
  Timer timer;
  SolveOutcome out = run_solve(cfg);
  const bool converged = out.result.converged;
  emit("solve", cfg, std::move(out.payload), timer.seconds(), out_path);
  if (!converged) {
    std::cerr << "error: solver did not reach tol_kkt within "
              << cfg.solver.max_iter << " iterations; best iterate written\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

int cmd_verify(const io::RunConfig& cfg, const std::string& out_path,
               const std::string& candidate_path, double tol,
               bool against_solve) {
  Timer timer;
  const io::ParsedSolution sol =
      io::solution_from_json(io::load_json_file(candidate_path));
  if (sol.structure.dim() != cfg.spec.N()) {
    throw covcap::InvalidSpec("candidate dimension " +
                              std::to_string(sol.structure.dim()) +
                              " does not match spec N = " +
                              std::to_string(cfg.spec.N()));
  }
  covcap::BlockCovariance bc{sol.blocks, sol.structure};

  covcap::ChannelSampleSet set =
      covcap::sample_channels(cfg.spec, cfg.samples, cfg.seed);
  if (cfg.symmetrize && sol.structure.c > 1) {
    set = covcap::symmetrize_samples(set,
                                     covcap::sign_generators(sol.structure));
  }
  const covcap::KKTReport kkt =
      covcap::kkt_verify(set, bc, cfg.power, cfg.spec.noise_power());
  const covcap::HermitianMatrix q = covcap::assemble_Q(bc);
  const covcap::CapacityEstimate capacity =
      covcap::capacity_estimate(set, q, cfg.spec.noise_power());

  const bool optimal =
      kkt.max_complementarity() <= tol && kkt.trace_gap <= tol;
  json payload;
  payload["kkt"] = io::kkt_to_json(kkt);
  payload["capacity"] = io::capacity_to_json(capacity);
  payload["tol"] = tol;
  payload["optimal_within_tol"] = optimal;

  if (against_solve) {
    const covcap::SolveResult fresh = run_solve(cfg).result;
    const covcap::EquivalenceReport eq = covcap::solution_equivalence(
        set, q, covcap::assemble_Q(fresh.bc), std::max(tol, 1e-12));
    payload["equivalence"] = json{{"equivalent", eq.equivalent},
                                  {"max_deviation", eq.max_deviation}};
  }

  emit("verify", cfg, std::move(payload), timer.seconds(), out_path);
  return kExitOk;
}

int cmd_sample(const io::RunConfig& cfg, const std::string& out_path) {
  covcap::ChannelSampleSet set;
  if (cfg.samples == 0) {
    set.seed = cfg.seed;  // empty set, no RNG touched
  } else {
    set = covcap::sample_channels(cfg.spec, cfg.samples, cfg.seed);
  }
  const std::string& path = out_path.empty() ? cfg.output_path : out_path;
  if (path.empty()) {
    std::cout << io::samples_to_json(set).dump(2) << '\n';
  } else {
    io::write_json_file(path, io::samples_to_json(set));
  }
  return kExitOk;
}

double parse_tol(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw covcap::ParseError("--tol: cannot parse \"" + text + "\"");
  }
  if (used != text.size() || std::isnan(value) || value < 0.0) {
    throw covcap::ParseError("--tol: cannot parse \"" + text + "\"");
  }
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-diagonal ergodic-capacity toolkit"};
  app.set_version_flag("--version", std::string(covcap::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string candidate_path;
  std::string tol_text = "1e-7";
  bool against_solve = false;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Commutant structure and separability of a covariance spec");
  analyze->add_option("--config", config_path, "Run configuration JSON")
      ->required();
  analyze->add_option("--out", out_path, "Report destination (default stdout)");

  CLI::App* solve = app.add_subcommand(
      "solve", "Optimize the block input covariance on Monte Carlo samples");
  solve->add_option("--config", config_path, "Run configuration JSON")
      ->required();
  solve->add_option("--out", out_path, "Report destination (default stdout)");

  CLI::App* verify = app.add_subcommand(
      "verify", "KKT-certify a candidate solution (optionally vs fresh solve)");
  verify->add_option("--config", config_path, "Run configuration JSON")
      ->required();
  verify->add_option("--out", out_path, "Report destination (default stdout)");
  verify
      ->add_option("--candidate", candidate_path,
                   "Candidate file: solve report, run report, or bare matrix")
      ->required();
  verify->add_option("--tol", tol_text,
                     "Optimality tolerance (float or \"inf\", default 1e-7)");
  verify->add_flag("--against-solve", against_solve,
                   "Also run a fresh solve and test whether the two solutions "
                   "are equivalent through the sampled channels");

  CLI::App* sample = app.add_subcommand(
      "sample", "Draw channel realizations and write the sample-set file");
  sample->add_option("--config", config_path, "Run configuration JSON")
      ->required();
  sample->add_option("--out", out_path, "Sample-set destination (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    const io::RunConfig cfg =
        io::config_from_json(io::load_json_file(config_path));
    if (analyze->parsed()) return cmd_analyze(cfg, out_path);
    if (solve->parsed()) return cmd_solve(cfg, out_path);
    if (verify->parsed()) {
      return cmd_verify(cfg, out_path, candidate_path, parse_tol(tol_text),
                        against_solve);
    }
    if (sample->parsed()) return cmd_sample(cfg, out_path);
  } catch (const covcap::GenericityFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const covcap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
