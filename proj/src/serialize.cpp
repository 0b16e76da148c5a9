#include "covcap/serialize.hpp"

#include <fstream>
#include <utility>

#include "covcap/errors.hpp"

namespace covcap::io {
namespace {

const json& require(const json& j, const char* key, const char* context) {
  if (!j.is_object()) {
    throw ParseError(std::string(context) + ": expected a JSON object");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(std::string(context) + ": missing field \"" + key + "\"");
  }
  return *it;
}

double as_double(const json& j, const char* what) {
  if (!j.is_number()) {
    throw ParseError(std::string(what) + ": expected a number");
  }
  return j.get<double>();
}

std::uint64_t as_u64(const json& j, const char* what) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  throw ParseError(std::string(what) + ": expected a non-negative integer");
}

std::size_t as_size(const json& j, const char* what) {
  return static_cast<std::size_t>(as_u64(j, what));
}

std::vector<double> as_double_array(const json& j, const char* what) {
  if (!j.is_array()) {
    throw ParseError(std::string(what) + ": expected an array");
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& v : j) out.push_back(as_double(v, what));
  return out;
}

HermitianMatrix hermitian_from_json(const json& j, const char* what) {
  try {
    return HermitianMatrix(matrix_from_json(j));
  } catch (const NotHermitian& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  json re = json::array();
  json im = json::array();
  for (const cplx& v : m.entries()) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

ComplexMatrix matrix_from_json(const json& j) {
  const std::size_t rows = as_size(require(j, "rows", "matrix"), "matrix.rows");
  const std::size_t cols = as_size(require(j, "cols", "matrix"), "matrix.cols");
  const std::vector<double> re =
      as_double_array(require(j, "re", "matrix"), "matrix.re");
  const std::vector<double> im =
      as_double_array(require(j, "im", "matrix"), "matrix.im");
  if (re.size() != rows * cols || im.size() != rows * cols) {
    throw ParseError("matrix: re/im length does not match rows*cols");
  }
  std::vector<cplx> entries(rows * cols);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i] = cplx(re[i], im[i]);
  }
  try {
    return ComplexMatrix(rows, cols, std::move(entries));
  } catch (const Error& e) {
    throw ParseError(std::string("matrix: ") + e.what());
  }
}

json spec_to_json(const CovarianceSpec& spec) {
  json j;
  j["M"] = spec.M();
  j["N"] = spec.N();
  j["noise_power"] = spec.noise_power();
  if (spec.is_kron()) {
    json terms = json::array();
    for (const KronTerm& term : spec.kron_terms()) {
      json t;
      t["R"] = matrix_to_json(term.R.base());
      t["T"] = matrix_to_json(term.T.base());
      terms.push_back(std::move(t));
    }
    j["kron_sum"] = std::move(terms);
  } else {
    j["dense"] = matrix_to_json(spec.dense_sigma().base());
  }
  return j;
}

CovarianceSpec spec_from_json(const json& j) {
  const std::size_t m = as_size(require(j, "M", "spec"), "spec.M");
  const std::size_t n = as_size(require(j, "N", "spec"), "spec.N");
  const double noise =
      as_double(require(j, "noise_power", "spec"), "spec.noise_power");
  const bool has_kron = j.is_object() && j.contains("kron_sum");
  const bool has_dense = j.is_object() && j.contains("dense");
  if (has_kron == has_dense) {
    throw ParseError("spec: exactly one of \"kron_sum\" or \"dense\" required");
  }
  if (has_kron) {
    const json& terms_json = j.at("kron_sum");
    if (!terms_json.is_array()) {
      throw ParseError("spec.kron_sum: expected an array");
    }
    std::vector<KronTerm> terms;
    for (const json& t : terms_json) {
      terms.push_back(
          KronTerm{hermitian_from_json(require(t, "R", "spec.kron_sum term"),
                                       "spec.kron_sum.R"),
                   hermitian_from_json(require(t, "T", "spec.kron_sum term"),
                                       "spec.kron_sum.T")});
    }
    return CovarianceSpec::kron_sum(m, n, noise, std::move(terms));
  }
  return CovarianceSpec::dense(m, n, noise,
                               hermitian_from_json(j.at("dense"), "spec.dense"));
}

json samples_to_json(const ChannelSampleSet& set) {
  json j;
  j["seed"] = set.seed;
  j["count"] = set.count;
  json samples = json::array();
  for (const ComplexMatrix& h : set.samples) {
    samples.push_back(matrix_to_json(h));
  }
  j["samples"] = std::move(samples);
  if (!set.symmetrized_by.empty()) {
    json group = json::array();
    for (const ComplexMatrix& u : set.symmetrized_by) {
      group.push_back(matrix_to_json(u));
    }
    j["symmetrized_by"] = std::move(group);
  }
  return j;
}

ChannelSampleSet samples_from_json(const json& j) {
  ChannelSampleSet set;
  set.seed = as_u64(require(j, "seed", "samples"), "samples.seed");
  set.count = as_size(require(j, "count", "samples"), "samples.count");
  const json& samples_json = require(j, "samples", "samples");
  if (!samples_json.is_array()) {
    throw ParseError("samples.samples: expected an array");
  }
  for (const json& h : samples_json) {
    set.samples.push_back(matrix_from_json(h));
  }
  if (j.contains("symmetrized_by")) {
    const json& group = j.at("symmetrized_by");
    if (!group.is_array()) {
      throw ParseError("samples.symmetrized_by: expected an array");
    }
    for (const json& u : group) {
      set.symmetrized_by.push_back(matrix_from_json(u));
    }
  }
  for (const ComplexMatrix& h : set.samples) {
    if (h.rows() != set.samples.front().rows() ||
        h.cols() != set.samples.front().cols()) {
      throw ParseError("samples: inconsistent sample dimensions");
    }
  }
  return set;
}

json capacity_to_json(const CapacityEstimate& est) {
  json j;
  j["mean"] = est.mean;
  j["stderr"] = est.std_error;
  j["count"] = est.count;
  return j;
}

json kkt_to_json(const KKTReport& kkt) {
  json j;
  j["mu"] = kkt.mu;
  j["complementarity"] = kkt.complementarity;
  j["trace_gap"] = kkt.trace_gap;
  return j;
}

json structure_to_json(const BlockStructure& bs) {
  json j;
  j["sizes"] = bs.sizes;
  j["U"] = matrix_to_json(bs.U);
  return j;
}

BlockStructure structure_from_json(const json& j) {
  BlockStructure bs;
  const json& sizes_json = require(j, "sizes", "structure");
  if (!sizes_json.is_array() || sizes_json.empty()) {
    throw ParseError("structure.sizes: expected a non-empty array");
  }
  std::size_t total = 0;
  for (const json& s : sizes_json) {
    const std::size_t l = as_size(s, "structure.sizes");
    if (l == 0) throw ParseError("structure.sizes: zero block size");
    bs.sizes.push_back(l);
    total += l;
  }
  bs.c = bs.sizes.size();
  bs.U = matrix_from_json(require(j, "U", "structure"));
  if (bs.U.rows() != total || bs.U.cols() != total) {
    throw ParseError("structure.U: dimensions do not match the block sizes");
  }
  const ComplexMatrix defect =
      matmul(adjoint(bs.U), bs.U) - ComplexMatrix::identity(total);
  if (hs_norm(defect) > 1e-8 * std::max(1.0, std::sqrt(double(total)))) {
    throw InvalidSpec("structure.U: not unitary within tolerance");
  }
  return bs;
}

json solve_report_to_json(const SolveResult& result) {
  json j;
  j["structure"] = structure_to_json(result.bc.structure);
  json blocks = json::array();
  for (const HermitianMatrix& q : result.bc.blocks) {
    blocks.push_back(matrix_to_json(q.base()));
  }
  j["blocks"] = std::move(blocks);
  j["capacity"] = capacity_to_json(result.capacity);
  j["kkt"] = kkt_to_json(result.kkt);
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  return j;
}

ParsedSolution solution_from_json(const json& j) {
  if (j.is_object() && j.contains("report")) {
    return solution_from_json(j.at("report"));  // RunReport wrapper
  }
  if (j.is_object() && j.contains("structure") && j.contains("blocks")) {
    ParsedSolution sol;
    sol.structure = structure_from_json(j.at("structure"));
    const json& blocks_json = j.at("blocks");
    if (!blocks_json.is_array() || blocks_json.size() != sol.structure.c) {
      throw ParseError("solution.blocks: expected one matrix per block");
    }
    for (std::size_t k = 0; k < sol.structure.c; ++k) {
      HermitianMatrix q =
          hermitian_from_json(blocks_json[k], "solution.blocks");
      if (q.dim() != sol.structure.sizes[k]) {
        throw ParseError("solution.blocks: block dimension mismatch");
      }
      sol.blocks.push_back(std::move(q));
    }
    return sol;
  }
  if (j.is_object() && j.contains("rows")) {
    // Bare matrix: one full block in the standard basis.
    HermitianMatrix q = hermitian_from_json(j, "solution");
    ParsedSolution sol;
    sol.structure.U = ComplexMatrix::identity(q.dim());
    sol.structure.sizes = {q.dim()};
    sol.structure.c = 1;
    sol.blocks.push_back(std::move(q));
    return sol;
  }
  throw ParseError(
      "solution: expected a solve report, a run report, or a matrix");
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg{spec_from_json(require(j, "spec", "config"))};
  if (j.contains("power")) {
    cfg.power = as_double(j.at("power"), "config.power");
  }
  if (!(cfg.power > 0.0)) {
    throw ParseError("config.power: must be positive");
  }
  if (j.contains("samples")) {
    cfg.samples = as_size(j.at("samples"), "config.samples");
  }
  if (j.contains("seed")) {
    cfg.seed = as_u64(j.at("seed"), "config.seed");
  }
  if (j.contains("symmetrize")) {
    const json& s = j.at("symmetrize");
    if (!s.is_boolean()) {
      throw ParseError("config.symmetrize: expected a boolean");
    }
    cfg.symmetrize = s.get<bool>();
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (!s.is_object()) throw ParseError("config.solver: expected an object");
    if (s.contains("max_iter")) {
      cfg.solver.max_iter = as_size(s.at("max_iter"), "config.solver.max_iter");
      if (cfg.solver.max_iter == 0) {
        throw ParseError("config.solver.max_iter: must be >= 1");
      }
    }
    if (s.contains("tol_kkt")) {
      cfg.solver.tol_kkt = as_double(s.at("tol_kkt"), "config.solver.tol_kkt");
      if (!(cfg.solver.tol_kkt > 0.0)) {
        throw ParseError("config.solver.tol_kkt: must be positive");
      }
    }
  }
  if (j.contains("output_path")) {
    const json& o = j.at("output_path");
    if (!o.is_string()) throw ParseError("config.output_path: expected a string");
    cfg.output_path = o.get<std::string>();
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["spec"] = spec_to_json(cfg.spec);
  j["power"] = cfg.power;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["symmetrize"] = cfg.symmetrize;
  j["solver"] = json{{"max_iter", cfg.solver.max_iter},
                     {"tol_kkt", cfg.solver.tol_kkt}};
  if (!cfg.output_path.empty()) j["output_path"] = cfg.output_path;
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path);
}

}  // namespace covcap::io
