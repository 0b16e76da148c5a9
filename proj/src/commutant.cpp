#include "covcap/commutant.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "covcap/errors.hpp"
#include "covcap/rng.hpp"

namespace covcap {
namespace {

// (I_M (x) A) Sigma - Sigma (I_M (x) A).
ComplexMatrix commutation_defect(const ComplexMatrix& sigma,
                                 const ComplexMatrix& a, std::size_t m) {
  const ComplexMatrix lifted = kron(ComplexMatrix::identity(m), a);
  return matmul(lifted, sigma) - matmul(sigma, lifted);
}

// Eigenvalue clusters of an ascending list: a new cluster starts when the gap
// exceeds kClusterTolScale * (spread + 1).
std::vector<std::pair<std::size_t, std::size_t>> cluster_ranges(
    const std::vector<double>& values) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  if (values.empty()) return ranges;
  const double spread = values.back() - values.front();
  const double tol = kClusterTolScale * (spread + 1.0);
  std::size_t start = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] - values[i - 1] > tol) {
      ranges.emplace_back(start, i);
      start = i;
    }
  }
  ranges.emplace_back(start, values.size());
  return ranges;
}

}  // namespace

AlgebraBasis commutant_basis(const HermitianMatrix& sigma, std::size_t m,
                             std::size_t n,
                             std::vector<double>* singular_values) {
  if (sigma.dim() != m * n) {
    throw DimensionMismatch("commutant_basis: covariance dimension " +
                            std::to_string(sigma.dim()) + " is not " +
                            std::to_string(m) + "*" + std::to_string(n));
  }
  // Matrix of the linear map A -> (I (x) A) Sigma - Sigma (I (x) A) in the
  // matrix-unit basis of A; its nullspace is the commutant.
  const std::size_t mn = m * n;
  ComplexMatrix k(mn * mn, n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      ComplexMatrix unit(n, n);
      unit(a, b) = 1.0;
      const ComplexMatrix defect = commutation_defect(sigma.base(), unit, m);
      const std::size_t col = a * n + b;
      for (std::size_t r = 0; r < mn * mn; ++r) {
        k(r, col) = defect.data()[r];
      }
    }
  }
  const ComplexMatrix null_basis =
      svd_nullspace(k, kNullTolScale, singular_values);

  AlgebraBasis basis;
  basis.N = n;
  basis.dim = null_basis.cols();
  basis.elements.reserve(basis.dim);
  const double sigma_norm = hs_norm(sigma.base());
  for (std::size_t c = 0; c < null_basis.cols(); ++c) {
    std::vector<cplx> entries(n * n);
    for (std::size_t r = 0; r < n * n; ++r) entries[r] = null_basis(r, c);
    ComplexMatrix element(n, n, std::move(entries));
    const double defect =
        hs_norm(commutation_defect(sigma.base(), element, m));
    if (defect > kStarTol * std::max(1.0, sigma_norm)) {
      throw ResidualExceeded(
          "commutant_basis: nullspace element fails the commutation check "
          "(residual " +
          std::to_string(defect) + ")");
    }
    basis.elements.push_back(std::move(element));
  }
  return basis;
}

ComplexMatrix span_project(const AlgebraBasis& basis, const ComplexMatrix& x,
                           double* residual) {
  ComplexMatrix proj(x.rows(), x.cols());
  for (const ComplexMatrix& b : basis.elements) {
    proj = proj + hs_inner(b, x) * b;
  }
  if (residual != nullptr) *residual = hs_norm(x - proj);
  return proj;
}

StarReport verify_star_algebra(const AlgebraBasis& basis) {
  StarReport report{0.0, 0.0, 0.0};
  double r = 0.0;
  for (const ComplexMatrix& bk : basis.elements) {
    for (const ComplexMatrix& bl : basis.elements) {
      span_project(basis, matmul(bk, bl), &r);
      report.product_residual = std::max(report.product_residual, r);
    }
    span_project(basis, adjoint(bk), &r);
    report.adjoint_residual = std::max(report.adjoint_residual, r);
  }
  span_project(basis, ComplexMatrix::identity(basis.N), &r);
  report.unit_residual = r;
  return report;
}

ProjectionResolution minimal_resolution(const AlgebraBasis& basis,
                                        std::uint64_t seed) {
  const std::size_t n = basis.N;
  // Hermitian generating set: real combinations of these span the Hermitian
  // part of the algebra.
  std::vector<ComplexMatrix> herm;
  herm.reserve(2 * basis.elements.size());
  const cplx half_over_i(0.0, -0.5);
  for (const ComplexMatrix& b : basis.elements) {
    const ComplexMatrix bh = adjoint(b);
    herm.push_back(0.5 * (b + bh));
    herm.push_back(half_over_i * (b - bh));
  }

  std::string last_failure = "no attempts made";
  for (std::uint64_t attempt = 0; attempt < 5; ++attempt) {
    rng::GaussianStream stream(seed, rng::kStreamGeneric, attempt);
    ComplexMatrix x(n, n);
    for (const ComplexMatrix& g : herm) {
      x = x + cplx(stream.next_real(), 0.0) * g;
    }
    const EigSystem es = herm_eig(HermitianMatrix(x));
    const auto ranges = cluster_ranges(es.values);

    ProjectionResolution res;
    bool ok = true;
    for (const auto& [begin, end] : ranges) {
      ComplexMatrix p(n, n);
      for (std::size_t k = begin; k < end; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          const cplx vi = es.vectors(i, k);
          for (std::size_t j = 0; j < n; ++j) {
            p(i, j) += vi * std::conj(es.vectors(j, k));
          }
        }
      }
      p = hermitian_part(p);
      // The spectral projection must itself belong to the algebra ...
      double span_residual = 0.0;
      span_project(basis, p, &span_residual);
      if (span_residual > kMinimalTol) {
        ok = false;
        last_failure = "projection outside the span (residual " +
                       std::to_string(span_residual) + ")";
        break;
      }
      // ... and must be minimal: P B P = lambda P for every basis element.
      const double p_trace = trace(p).real();
      for (const ComplexMatrix& b : basis.elements) {
        const ComplexMatrix pbp = matmul(p, matmul(b, p));
        const cplx lambda = trace(pbp) / p_trace;
        if (hs_norm(pbp - lambda * p) > kMinimalTol) {
          ok = false;
          last_failure = "projection not minimal";
          break;
        }
      }
      if (!ok) break;
      res.projections.emplace_back(p);
      res.ranks.push_back(
          static_cast<std::size_t>(std::llround(p_trace)));
    }
    if (!ok) continue;

    // Structural sanity on the full resolution.
    std::size_t total_rank = 0;
    for (std::size_t r : res.ranks) total_rank += r;
    ComplexMatrix sum(n, n);
    for (const HermitianMatrix& p : res.projections) sum = sum + p.base();
    if (total_rank != n ||
        hs_norm(sum - ComplexMatrix::identity(n)) > kStarTol) {
      last_failure = "projections do not resolve the identity";
      continue;
    }
    return res;
  }
  throw GenericityFailure("minimal_resolution: no valid resolution after 5 "
                          "attempts; last failure: " +
                          last_failure);
}

std::vector<std::size_t> rank_profile(const ProjectionResolution& res) {
  std::vector<std::size_t> profile = res.ranks;
  std::sort(profile.begin(), profile.end());
  return profile;
}

ProjectionResolution transpose_resolution(const ProjectionResolution& res) {
  ProjectionResolution out;
  out.ranks = res.ranks;
  out.projections.reserve(res.projections.size());
  for (const HermitianMatrix& p : res.projections) {
    out.projections.emplace_back(transpose(p.base()));
  }
  return out;
}

SymmetryReport is_symmetry(const HermitianMatrix& sigma, std::size_t m,
                           std::size_t n, const ComplexMatrix& u) {
  if (sigma.dim() != m * n || u.rows() != n || u.cols() != n) {
    throw DimensionMismatch("is_symmetry: incompatible shapes");
  }
  const double unitary_defect =
      hs_norm(matmul(adjoint(u), u) - ComplexMatrix::identity(n));
  if (unitary_defect >
      kEigTol * std::max(1.0, std::sqrt(static_cast<double>(n)))) {
    throw NonUnitary("is_symmetry: matrix is not unitary (defect " +
                     std::to_string(unitary_defect) + ")");
  }
  const double sigma_norm = hs_norm(sigma.base());
  if (sigma_norm == 0.0) return {true, 0.0};
  const double residual =
      hs_norm(commutation_defect(sigma.base(), transpose(u), m)) / sigma_norm;
  return {residual <= kStarTol, residual};
}

std::vector<KronTerm> pinch_decomposition(const std::vector<KronTerm>& terms,
                                          const ProjectionResolution& res) {
  std::vector<KronTerm> out;
  out.reserve(terms.size());
  for (const KronTerm& term : terms) {
    const std::size_t n = term.T.dim();
    ComplexMatrix pinched(n, n);
    for (const HermitianMatrix& p : res.projections) {
      pinched = pinched + matmul(p.base(), matmul(term.T.base(), p.base()));
    }
    out.push_back({term.R, HermitianMatrix(hermitian_part(pinched))});
  }
  ComplexMatrix original;
  ComplexMatrix reassembled;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const ComplexMatrix a = kron(terms[i].R.base(), terms[i].T.base());
    const ComplexMatrix b = kron(out[i].R.base(), out[i].T.base());
    original = i == 0 ? a : original + a;
    reassembled = i == 0 ? b : reassembled + b;
  }
  const double residual = hs_norm(reassembled - original);
  if (residual > kStarTol * std::max(1.0, hs_norm(original))) {
    throw ResidualExceeded(
        "pinch_decomposition: reassembled covariance deviates by " +
        std::to_string(residual) +
        "; the resolution does not lie in the commutant");
  }
  return out;
}

}  // namespace covcap
