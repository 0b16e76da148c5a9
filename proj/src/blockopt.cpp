#include "covcap/blockopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "covcap/errors.hpp"
#include "covcap/kernels.hpp"
#include "covcap/parallel.hpp"

namespace covcap {
namespace {

ComplexMatrix col_slice(const ComplexMatrix& a, std::size_t j0,
                        std::size_t j1) {
  ComplexMatrix out(a.rows(), j1 - j0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = j0; j < j1; ++j) out(i, j - j0) = a(i, j);
  }
  return out;
}

bool is_numerically_diagonal(const ComplexMatrix& a, double tol) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j && std::abs(a(i, j)) > tol) return false;
    }
  }
  return true;
}

// Euclidean projection of x onto the truncated simplex {y >= 0, sum y <= p}.
std::vector<double> project_truncated_simplex(std::vector<double> x,
                                              double p) {
  double clamped_sum = 0.0;
  for (double v : x) clamped_sum += std::max(v, 0.0);
  if (clamped_sum <= p) {
    for (double& v : x) v = std::max(v, 0.0);
    return x;
  }
  // Active budget: project onto {y >= 0, sum y = p} by the sorted-threshold
  // rule.
  std::vector<double> u = x;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double prefix = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    prefix += u[j];
    const double candidate = (prefix - p) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) tau = candidate;
  }
  for (double& v : x) v = std::max(v - tau, 0.0);
  return x;
}

struct Stats {
  double sum = 0.0;
  double sum_sq = 0.0;
};

CapacityEstimate stats_to_estimate(const Stats& st, std::size_t count) {
  CapacityEstimate est;
  est.count = count;
  if (count == 0) return est;
  est.mean = st.sum / static_cast<double>(count);
  if (count > 1) {
    double var = (st.sum_sq - static_cast<double>(count) * est.mean * est.mean) /
                 static_cast<double>(count - 1);
    var = std::max(var, 0.0);
    est.std_error = std::sqrt(var / static_cast<double>(count));
  }
  return est;
}

// Fixed-sample evaluator for the block-restricted objective. The per-sample
// products W_s = H_s U are precomputed once; every objective/gradient pass
// then works in the rotated coordinates where Q is block diagonal.
class Evaluator {
 public:
  Evaluator(const ChannelSampleSet& set, const BlockStructure& bs,
            double noise_power)
      : bs_(bs), inv_noise_(1.0 / noise_power), m_(set.samples.front().rows()) {
    const std::size_t n = bs.dim();
    if (set.samples.front().cols() != n) {
      throw DimensionMismatch("solver: samples have " +
                              std::to_string(set.samples.front().cols()) +
                              " columns but the structure is " +
                              std::to_string(n) + "-dimensional");
    }
    w_.assign(set.samples.size(), ComplexMatrix());
    par::parallel_for_chunks(set.samples.size(),
                             [&](std::size_t begin, std::size_t end) {
                               for (std::size_t s = begin; s < end; ++s) {
                                 w_[s] = matmul(set.samples[s], bs.U);
                               }
                             });
  }

  std::size_t count() const { return w_.size(); }

  // I_M + (1/sigma^2) sum_l W_l Q_l W_l^H for one sample.
  ComplexMatrix response(std::size_t s,
                         const std::vector<HermitianMatrix>& blocks) const {
    ComplexMatrix a = ComplexMatrix::identity(m_);
    for (std::size_t k = 0; k < bs_.c; ++k) {
      const ComplexMatrix wk = col_slice(w_[s], bs_.offset(k), bs_.offset(k + 1));
      const ComplexMatrix t = matmul(wk, blocks[k].base());
      a = a + cplx(inv_noise_, 0.0) * matmul(t, adjoint(wk));
    }
    return a;
  }

  Stats stats(const std::vector<HermitianMatrix>& blocks) const {
    auto map = [&](std::size_t begin, std::size_t end) {
      Stats st;
      for (std::size_t s = begin; s < end; ++s) {
        ComplexMatrix a = response(s, blocks);
        if (!cholesky_lower(a)) {
          throw Error("capacity: response matrix is not positive definite; "
                      "input covariance blocks are corrupted");
        }
        const double v = logdet_from_cholesky(a);
        st.sum += v;
        st.sum_sq += v * v;
      }
      return st;
    };
    auto combine = [](Stats a, Stats b) {
      return Stats{a.sum + b.sum, a.sum_sq + b.sum_sq};
    };
    return par::chunked_reduce(count(), map, combine, Stats{});
  }

  double objective(const std::vector<HermitianMatrix>& blocks) const {
    return stats(blocks).sum / static_cast<double>(count());
  }

  // Mean per-block gradients G_k (Hermitian PSD).
  std::vector<ComplexMatrix> gradient(
      const std::vector<HermitianMatrix>& blocks) const {
    auto map = [&](std::size_t begin, std::size_t end) {
      std::vector<ComplexMatrix> acc(bs_.c);
      for (std::size_t k = 0; k < bs_.c; ++k) {
        acc[k] = ComplexMatrix(bs_.sizes[k], bs_.sizes[k]);
      }
      for (std::size_t s = begin; s < end; ++s) {
        ComplexMatrix a = response(s, blocks);
        if (!cholesky_lower(a)) {
          throw Error("gradient: response matrix is not positive definite");
        }
        ComplexMatrix z = w_[s];
        forward_subst(a, z);  // z = L^{-1} W, so Z^H Z = W^H M^{-1} W
        for (std::size_t k = 0; k < bs_.c; ++k) {
          const ComplexMatrix zk = col_slice(z, bs_.offset(k), bs_.offset(k + 1));
          acc[k] = acc[k] + matmul(adjoint(zk), zk);
        }
      }
      return acc;
    };
    auto combine = [&](std::vector<ComplexMatrix> a,
                       std::vector<ComplexMatrix> b) {
      for (std::size_t k = 0; k < a.size(); ++k) a[k] = a[k] + b[k];
      return a;
    };
    std::vector<ComplexMatrix> zero(bs_.c);
    for (std::size_t k = 0; k < bs_.c; ++k) {
      zero[k] = ComplexMatrix(bs_.sizes[k], bs_.sizes[k]);
    }
    std::vector<ComplexMatrix> total =
        par::chunked_reduce(count(), map, combine, zero);
    const double scale = inv_noise_ / static_cast<double>(count());
    for (ComplexMatrix& g : total) g = hermitian_part(cplx(scale, 0.0) * g);
    return total;
  }

 private:
  const BlockStructure& bs_;
  double inv_noise_;
  std::size_t m_;
  std::vector<ComplexMatrix> w_;
};

KKTReport kkt_from_gradient(const std::vector<ComplexMatrix>& g,
                            const std::vector<HermitianMatrix>& blocks,
                            double p) {
  KKTReport report;
  double mu = 0.0;
  for (const ComplexMatrix& gk : g) {
    mu = std::max(mu, max_eigenvalue(HermitianMatrix(gk)));
  }
  report.mu = mu;
  double trace_sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const std::size_t l = g[k].rows();
    const ComplexMatrix psi =
        cplx(mu, 0.0) * ComplexMatrix::identity(l) - g[k];
    report.stationarity_residuals.push_back(
        hs_norm(g[k] - cplx(mu, 0.0) * ComplexMatrix::identity(l) + psi));
    report.psd_slack_violations.push_back(
        std::max(0.0, -min_eigenvalue(HermitianMatrix(psi))));
    report.complementarity.push_back(
        std::abs(trace(matmul(psi, blocks[k].base()))));
    trace_sum += trace(blocks[k].base()).real();
  }
  report.trace_gap = std::abs(trace_sum - p);
  return report;
}

std::vector<HermitianMatrix> shifted_blocks(
    const std::vector<HermitianMatrix>& blocks,
    const std::vector<ComplexMatrix>& g, double t) {
  std::vector<HermitianMatrix> out;
  out.reserve(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    out.emplace_back(blocks[k].base() + cplx(t, 0.0) * g[k]);
  }
  return out;
}

double block_distance(const std::vector<HermitianMatrix>& a,
                      const std::vector<HermitianMatrix>& b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = hs_norm(a[k].base() - b[k].base());
    sq += d * d;
  }
  return std::sqrt(sq);
}

void check_feasible(const BlockCovariance& bc, double p) {
  double trace_sum = 0.0;
  for (const HermitianMatrix& q : bc.blocks) {
    if (!is_psd(q)) {
      throw IndefiniteMatrix("block covariance has an indefinite block");
    }
    trace_sum += trace(q.base()).real();
  }
  if (trace_sum > p + 1e-9) {
    throw InvalidSpec("block covariance exceeds the power budget: trace " +
                      std::to_string(trace_sum) + " > " + std::to_string(p));
  }
}

}  // namespace

std::size_t BlockStructure::offset(std::size_t k) const {
  std::size_t o = 0;
  for (std::size_t i = 0; i < k; ++i) o += sizes[i];
  return o;
}

BlockStructure build_block_structure(const ProjectionResolution& res) {
  if (res.projections.empty()) {
    throw Error("build_block_structure: empty resolution");
  }
  const std::size_t n = res.projections.front().dim();
  BlockStructure bs;
  bs.U = ComplexMatrix(n, n);
  bs.sizes = res.ranks;
  bs.c = res.projections.size();

  std::size_t col = 0;
  for (std::size_t j = 0; j < res.projections.size(); ++j) {
    const ComplexMatrix& p = res.projections[j].base();
    const std::size_t rank = res.ranks[j];
    std::size_t placed = 0;
    if (is_numerically_diagonal(p, 1e-12)) {
      // Canonical basis vectors keep diagonal resolutions (identity,
      // coordinate projections) in the natural order.
      for (std::size_t i = 0; i < n && placed < rank; ++i) {
        if (p(i, i).real() > 0.5) {
          bs.U(i, col + placed) = 1.0;
          ++placed;
        }
      }
    } else {
      const EigSystem es = herm_eig(res.projections[j]);
      for (std::size_t k = 0; k < n && placed < rank; ++k) {
        if (es.values[k] > 0.5) {
          for (std::size_t i = 0; i < n; ++i) {
            bs.U(i, col + placed) = es.vectors(i, k);
          }
          ++placed;
        }
      }
    }
    if (placed != rank) {
      throw ResidualExceeded(
          "build_block_structure: projection " + std::to_string(j) +
          " does not have the recorded rank " + std::to_string(rank));
    }
    col += rank;
  }
  if (col != n) {
    throw ResidualExceeded("build_block_structure: ranks do not sum to " +
                           std::to_string(n));
  }

  // Modified Gram-Schmidt cleanup; the columns are already orthonormal to
  // roughly the projection tolerances.
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = bs.U(i, j);
    for (std::size_t prev = 0; prev < j; ++prev) {
      cplx overlap(0.0, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        overlap += std::conj(bs.U(i, prev)) * v[i];
      }
      for (std::size_t i = 0; i < n; ++i) v[i] -= overlap * bs.U(i, prev);
    }
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm_sq += std::norm(v[i]);
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    for (std::size_t i = 0; i < n; ++i) bs.U(i, j) = v[i] * inv_norm;
  }

  const ComplexMatrix gram =
      matmul(adjoint(bs.U), bs.U) - ComplexMatrix::identity(n);
  if (hs_norm(gram) > 1e-9) {
    throw ResidualExceeded("build_block_structure: U failed orthonormality");
  }
  for (std::size_t j = 0; j < bs.c; ++j) {
    ComplexMatrix indicator(n, n);
    for (std::size_t i = bs.offset(j); i < bs.offset(j + 1); ++i) {
      indicator(i, i) = 1.0;
    }
    const ComplexMatrix rotated =
        matmul(adjoint(bs.U), matmul(res.projections[j].base(), bs.U));
    if (hs_norm(rotated - indicator) > kStarTol) {
      throw ResidualExceeded(
          "build_block_structure: U does not diagonalize projection " +
          std::to_string(j));
    }
  }
  return bs;
}

HermitianMatrix assemble_Q(const BlockCovariance& bc) {
  const std::size_t n = bc.structure.dim();
  ComplexMatrix block_diag(n, n);
  for (std::size_t k = 0; k < bc.structure.c; ++k) {
    const std::size_t o = bc.structure.offset(k);
    const ComplexMatrix& q = bc.blocks[k].base();
    for (std::size_t i = 0; i < q.rows(); ++i) {
      for (std::size_t j = 0; j < q.cols(); ++j) {
        block_diag(o + i, o + j) = q(i, j);
      }
    }
  }
  const ComplexMatrix q =
      matmul(bc.structure.U, matmul(block_diag, adjoint(bc.structure.U)));
  return HermitianMatrix(hermitian_part(q));
}

BlockCovariance uniform_blocks(const BlockStructure& bs, double p) {
  const double per_dim = p / static_cast<double>(bs.dim());
  BlockCovariance bc;
  bc.structure = bs;
  for (std::size_t k = 0; k < bs.c; ++k) {
    bc.blocks.push_back(HermitianMatrix(
        cplx(per_dim, 0.0) * ComplexMatrix::identity(bs.sizes[k])));
  }
  return bc;
}

std::vector<ComplexMatrix> sign_generators(const BlockStructure& bs) {
  std::vector<ComplexMatrix> gens;
  const std::size_t n = bs.dim();
  for (std::size_t j = 1; j < bs.c; ++j) {
    ComplexMatrix eps(n, n);
    const std::size_t boundary = bs.offset(j);
    for (std::size_t i = 0; i < n; ++i) {
      eps(i, i) = i < boundary ? 1.0 : -1.0;
    }
    gens.push_back(matmul(bs.U, matmul(eps, adjoint(bs.U))));
  }
  return gens;
}

CapacityEstimate capacity_estimate(const ChannelSampleSet& set,
                                   const HermitianMatrix& q,
                                   double noise_power) {
  if (set.samples.empty()) throw Error("capacity_estimate: empty sample set");
  if (!(noise_power > 0.0)) throw Error("capacity_estimate: noise_power <= 0");
  if (!is_psd(q)) {
    throw IndefiniteMatrix("capacity_estimate: Q is not PSD within tolerance");
  }
  const std::size_t m = set.samples.front().rows();
  const double inv_noise = 1.0 / noise_power;
  auto map = [&](std::size_t begin, std::size_t end) {
    Stats st;
    for (std::size_t s = begin; s < end; ++s) {
      const ComplexMatrix& h = set.samples[s];
      ComplexMatrix a = ComplexMatrix::identity(m) +
                        cplx(inv_noise, 0.0) *
                            matmul(matmul(h, q.base()), adjoint(h));
      if (!cholesky_lower(a)) {
        throw Error("capacity_estimate: I + HQH^H/noise is not positive "
                    "definite; inputs are corrupted");
      }
      const double v = logdet_from_cholesky(a);
      st.sum += v;
      st.sum_sq += v * v;
    }
    return st;
  };
  auto combine = [](Stats a, Stats b) {
    return Stats{a.sum + b.sum, a.sum_sq + b.sum_sq};
  };
  const Stats st =
      par::chunked_reduce(set.samples.size(), map, combine, Stats{});
  return stats_to_estimate(st, set.samples.size());
}

std::vector<HermitianMatrix> capacity_gradient(const ChannelSampleSet& set,
                                               const BlockCovariance& bc,
                                               double noise_power) {
  if (set.samples.empty()) throw Error("capacity_gradient: empty sample set");
  Evaluator ev(set, bc.structure, noise_power);
  std::vector<HermitianMatrix> out;
  for (ComplexMatrix& g : ev.gradient(bc.blocks)) {
    out.emplace_back(g);
  }
  return out;
}

std::vector<HermitianMatrix> project_blocks(
    const std::vector<HermitianMatrix>& blocks, double p) {
  if (!(p > 0.0)) throw Error("project_blocks: power budget must be positive");
  std::vector<EigSystem> systems;
  systems.reserve(blocks.size());
  double trace_sum = 0.0;
  double min_eig = 0.0;
  for (const HermitianMatrix& b : blocks) {
    systems.push_back(herm_eig(b));
    for (double v : systems.back().values) {
      trace_sum += v;
      min_eig = std::min(min_eig, v);
    }
  }
  if (min_eig >= 0.0 && trace_sum <= p) return blocks;  // already feasible

  std::vector<double> pooled;
  for (const EigSystem& es : systems) {
    pooled.insert(pooled.end(), es.values.begin(), es.values.end());
  }
  const std::vector<double> projected = project_truncated_simplex(pooled, p);

  std::vector<HermitianMatrix> out;
  out.reserve(blocks.size());
  std::size_t pos = 0;
  for (const EigSystem& es : systems) {
    const std::size_t l = es.values.size();
    ComplexMatrix b(l, l);
    for (std::size_t k = 0; k < l; ++k) {
      const double lambda = projected[pos + k];
      if (lambda == 0.0) continue;
      for (std::size_t i = 0; i < l; ++i) {
        const cplx vi = es.vectors(i, k);
        for (std::size_t j = 0; j < l; ++j) {
          b(i, j) += lambda * vi * std::conj(es.vectors(j, k));
        }
      }
    }
    pos += l;
    out.emplace_back(hermitian_part(b));
  }
  return out;
}

KKTReport kkt_verify(const ChannelSampleSet& set, const BlockCovariance& bc,
                     double p, double noise_power) {
  check_feasible(bc, p);
  Evaluator ev(set, bc.structure, noise_power);
  return kkt_from_gradient(ev.gradient(bc.blocks), bc.blocks, p);
}

double KKTReport::max_complementarity() const {
  double m = 0.0;
  for (double v : complementarity) m = std::max(m, v);
  return m;
}

SolveResult solve_blocks(const ChannelSampleSet& set, const BlockStructure& bs,
                         double p, double noise_power,
                         const SolverOptions& opts) {
  if (set.samples.empty()) throw Error("solve_blocks: empty sample set");
  if (!(p > 0.0)) throw Error("solve_blocks: power budget must be positive");
  if (!(noise_power > 0.0)) throw Error("solve_blocks: noise_power <= 0");
  Evaluator ev(set, bs, noise_power);

  SolveResult result;
  result.bc = uniform_blocks(bs, p);
  std::vector<HermitianMatrix>& blocks = result.bc.blocks;

  double objective = ev.objective(blocks);
  result.objective_trace.push_back(objective);

  bool converged = false;
  std::size_t iterations = 0;
  // Once objective improvements fall below double precision, Armijo tests
  // become meaningless even though the gradient is still accurate. The loop
  // then switches to fixed-step projected iterations, whose contraction keeps
  // tightening the KKT residuals down to machine precision. The polish step
  // restarts from step_init and shrinks only when the iterate movement stops
  // decreasing, homing in on the contractive range from above.
  bool armijo_usable = true;
  const double armijo_floor = 1e-6 * opts.step_init;
  double polish_step = opts.step_init;
  double polish_prev_move = 0.0;
  while (iterations < opts.max_iter) {
    const std::vector<ComplexMatrix> g = ev.gradient(blocks);
    const KKTReport probe = kkt_from_gradient(g, blocks, p);
    const std::vector<HermitianMatrix> pg_point =
        project_blocks(shifted_blocks(blocks, g, 1.0), p);
    const double pg_norm = block_distance(pg_point, blocks);
    if (probe.max_complementarity() <= opts.tol_kkt &&
        pg_norm <= opts.tol_kkt) {
      converged = true;
      break;
    }

    if (armijo_usable) {
      // Armijo backtracking along the projection arc. A step that has to
      // shrink past the floor signals that objective differences are below
      // the precision of the sample average, not that no ascent exists.
      double step = opts.step_init;
      bool accepted = false;
      while (step >= armijo_floor) {
        std::vector<HermitianMatrix> candidate =
            project_blocks(shifted_blocks(blocks, g, step), p);
        double ascent = 0.0;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
          ascent +=
              hs_inner(g[k], candidate[k].base() - blocks[k].base()).real();
        }
        const double candidate_objective = ev.objective(candidate);
        if (ascent > 0.0 &&
            candidate_objective >= objective + opts.armijo_c1 * ascent) {
          blocks = std::move(candidate);
          objective = candidate_objective;
          accepted = true;
          break;
        }
        step *= opts.armijo_shrink;
      }
      if (accepted) {
        const double improvement = objective - result.objective_trace.back();
        result.objective_trace.push_back(objective);
        ++iterations;
        // Improvements at the resolution of the sample average mean the
        // line search is comparing rounding noise; hand over to the polish
        // starting from the next (freshly differentiated) iterate.
        if (improvement <= 1e-14 * std::max(1.0, std::abs(objective))) {
          armijo_usable = false;
          polish_step = opts.step_init;
          polish_prev_move = std::numeric_limits<double>::infinity();
        }
        continue;
      }
      armijo_usable = false;
      polish_step = opts.step_init;
      polish_prev_move = std::numeric_limits<double>::infinity();
    }

    std::vector<HermitianMatrix> candidate =
        project_blocks(shifted_blocks(blocks, g, polish_step), p);
    const double move = block_distance(candidate, blocks);
    if (move == 0.0) break;  // exact fixed point of the projected step
    if (move >= polish_prev_move && polish_step > 1e-12) polish_step *= 0.5;
    polish_prev_move = move;
    blocks = std::move(candidate);
    ++iterations;
  }

  result.iterations = iterations;
  const std::vector<ComplexMatrix> g_final = ev.gradient(blocks);
  result.kkt = kkt_from_gradient(g_final, blocks, p);
  if (!converged) {
    // The loop may have exited on a vanishing Armijo step right at the
    // optimum; re-check the stopping rule before declaring failure.
    const double pg_norm = block_distance(
        project_blocks(shifted_blocks(blocks, g_final, 1.0), p), blocks);
    converged = result.kkt.max_complementarity() <= opts.tol_kkt &&
                pg_norm <= opts.tol_kkt;
  }
  result.converged = converged;
  result.capacity = stats_to_estimate(ev.stats(blocks), ev.count());
  return result;
}

SolveResult solve_full(const ChannelSampleSet& set, std::size_t n, double p,
                       double noise_power, const SolverOptions& opts) {
  BlockStructure trivial;
  trivial.U = ComplexMatrix::identity(n);
  trivial.sizes = {n};
  trivial.c = 1;
  return solve_blocks(set, trivial, p, noise_power, opts);
}

HermitianMatrix pinch_covariance(const HermitianMatrix& q,
                                 const BlockStructure& bs) {
  const std::size_t n = bs.dim();
  if (q.dim() != n) throw DimensionMismatch("pinch_covariance: dim mismatch");
  ComplexMatrix rotated = matmul(adjoint(bs.U), matmul(q.base(), bs.U));
  std::vector<std::size_t> block_of(n);
  for (std::size_t k = 0; k < bs.c; ++k) {
    for (std::size_t i = bs.offset(k); i < bs.offset(k + 1); ++i) {
      block_of[i] = k;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (block_of[i] != block_of[j]) rotated(i, j) = 0.0;
    }
  }
  const ComplexMatrix back = matmul(bs.U, matmul(rotated, adjoint(bs.U)));
  return HermitianMatrix(hermitian_part(back));
}

std::vector<double> kronecker_power_reference(const HermitianMatrix& r,
                                              const HermitianMatrix& t,
                                              double p, double noise_power,
                                              const ChannelSampleSet& set) {
  (void)r;  // the receive factor shapes the samples, not the parameterization
  if (set.samples.empty()) {
    throw Error("kronecker_power_reference: empty sample set");
  }
  const std::size_t n = t.dim();
  const std::size_t m = set.samples.front().rows();
  if (set.samples.front().cols() != n) {
    throw DimensionMismatch("kronecker_power_reference: sample shape");
  }
  // Eigenbasis of T^t = conj(T): conjugated eigenvectors of T.
  const ComplexMatrix u = conjugate(herm_eig(t).vectors);
  std::vector<ComplexMatrix> w(set.samples.size());
  par::parallel_for_chunks(set.samples.size(),
                           [&](std::size_t begin, std::size_t end) {
                             for (std::size_t s = begin; s < end; ++s) {
                               w[s] = matmul(set.samples[s], u);
                             }
                           });
  const double inv_noise = 1.0 / noise_power;

  auto response = [&](std::size_t s, const std::vector<double>& powers) {
    ComplexMatrix a = ComplexMatrix::identity(m);
    for (std::size_t k = 0; k < n; ++k) {
      if (powers[k] == 0.0) continue;
      const double scale = inv_noise * powers[k];
      for (std::size_t i = 0; i < m; ++i) {
        const cplx wi = w[s](i, k);
        for (std::size_t j = 0; j < m; ++j) {
          a(i, j) += scale * wi * std::conj(w[s](j, k));
        }
      }
    }
    return a;
  };
  auto objective = [&](const std::vector<double>& powers) {
    auto map = [&](std::size_t begin, std::size_t end) {
      double sum = 0.0;
      for (std::size_t s = begin; s < end; ++s) {
        ComplexMatrix a = response(s, powers);
        if (!cholesky_lower(a)) {
          throw Error("kronecker_power_reference: indefinite response");
        }
        sum += logdet_from_cholesky(a);
      }
      return sum;
    };
    const double total = par::chunked_reduce(
        set.samples.size(), map, [](double a, double b) { return a + b; },
        0.0);
    return total / static_cast<double>(set.samples.size());
  };
  auto gradient = [&](const std::vector<double>& powers) {
    auto map = [&](std::size_t begin, std::size_t end) {
      std::vector<double> acc(n, 0.0);
      for (std::size_t s = begin; s < end; ++s) {
        ComplexMatrix a = response(s, powers);
        if (!cholesky_lower(a)) {
          throw Error("kronecker_power_reference: indefinite response");
        }
        ComplexMatrix z = w[s];
        forward_subst(a, z);
        for (std::size_t k = 0; k < n; ++k) {
          double col = 0.0;
          for (std::size_t i = 0; i < m; ++i) col += std::norm(z(i, k));
          acc[k] += col;
        }
      }
      return acc;
    };
    auto combine = [&](std::vector<double> a, std::vector<double> b) {
      for (std::size_t k = 0; k < n; ++k) a[k] += b[k];
      return a;
    };
    std::vector<double> total = par::chunked_reduce(
        set.samples.size(), map, combine, std::vector<double>(n, 0.0));
    const double scale = inv_noise / static_cast<double>(set.samples.size());
    for (double& v : total) v *= scale;
    return total;
  };

  // Same two-phase scheme as solve_blocks: Armijo while objective
  // comparisons carry information, then fixed-step projected iterations to
  // drive the projected-gradient residual to machine precision.
  std::vector<double> powers(n, p / static_cast<double>(n));
  double value = objective(powers);
  bool armijo_usable = true;
  double polish_step = 1.0;
  double polish_prev_move = 0.0;
  for (std::size_t iter = 0; iter < 20000; ++iter) {
    const std::vector<double> g = gradient(powers);
    std::vector<double> pg_point = powers;
    for (std::size_t k = 0; k < n; ++k) pg_point[k] += g[k];
    pg_point = project_truncated_simplex(pg_point, p);
    double pg_norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      pg_norm += (pg_point[k] - powers[k]) * (pg_point[k] - powers[k]);
    }
    if (std::sqrt(pg_norm) <= 1e-12) break;

    if (armijo_usable) {
      double step = 1.0;
      bool accepted = false;
      while (step >= 1e-6) {
        std::vector<double> candidate = powers;
        for (std::size_t k = 0; k < n; ++k) candidate[k] += step * g[k];
        candidate = project_truncated_simplex(candidate, p);
        double ascent = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          ascent += g[k] * (candidate[k] - powers[k]);
        }
        const double candidate_value = objective(candidate);
        if (ascent > 0.0 && candidate_value >= value + 1e-4 * ascent) {
          const double improvement = candidate_value - value;
          powers = std::move(candidate);
          value = candidate_value;
          accepted = true;
          if (improvement <= 1e-14 * std::max(1.0, std::abs(value))) {
            armijo_usable = false;
            polish_step = 1.0;
            polish_prev_move = std::numeric_limits<double>::infinity();
          }
          break;
        }
        step *= 0.5;
      }
      if (accepted) continue;
      armijo_usable = false;
      polish_step = 1.0;
      polish_prev_move = std::numeric_limits<double>::infinity();
    }

    std::vector<double> candidate = powers;
    for (std::size_t k = 0; k < n; ++k) candidate[k] += polish_step * g[k];
    candidate = project_truncated_simplex(candidate, p);
    double move = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      move += (candidate[k] - powers[k]) * (candidate[k] - powers[k]);
    }
    move = std::sqrt(move);
    if (move == 0.0) break;  // exact fixed point of the projected step
    if (move >= polish_prev_move && polish_step > 1e-12) polish_step *= 0.5;
    polish_prev_move = move;
    powers = std::move(candidate);
  }
  return powers;
}

EquivalenceReport solution_equivalence(const ChannelSampleSet& set,
                                       const HermitianMatrix& q1,
                                       const HermitianMatrix& q2, double tol) {
  if (set.samples.empty()) {
    throw Error("solution_equivalence: empty sample set");
  }
  if (!is_psd(q1) || !is_psd(q2)) {
    throw IndefiniteMatrix("solution_equivalence: inputs must be PSD");
  }
  const double trace_diff =
      std::abs(trace(q1.base()).real() - trace(q2.base()).real());
  if (trace_diff > tol * std::max(1.0, std::abs(trace(q1.base()).real()))) {
    throw Error("solution_equivalence: traces differ by " +
                std::to_string(trace_diff));
  }
  const ComplexMatrix diff = q1.base() - q2.base();
  auto map = [&](std::size_t begin, std::size_t end) {
    double worst = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
      const ComplexMatrix& h = set.samples[s];
      const double dev = hs_norm(matmul(matmul(h, diff), adjoint(h)));
      const double ref =
          hs_norm(matmul(matmul(h, q1.base()), adjoint(h)));
      worst = std::max(worst, dev / std::max(1.0, ref));
    }
    return worst;
  };
  const double max_dev = par::chunked_reduce(
      set.samples.size(), map,
      [](double a, double b) { return std::max(a, b); }, 0.0);
  return {max_dev <= tol, max_dev};
}

}  // namespace covcap
